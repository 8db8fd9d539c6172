#include "persfit/rng.hpp"

#include "persfit/errors.hpp"

#include <cmath>

namespace persfit {

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    std::uint64_t z = base + (index + 1) * 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = 1.0 - uniform(); // (0, 1]
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * M_PI * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

double Rng::truncated_normal(double sigma, double lo, double hi) {
    if (!(lo < hi))
        throw DomainError("truncated_normal: empty interval");
    for (int i = 0; i < 1000; ++i) {
        const double x = sigma * normal();
        if (x >= lo && x <= hi)
            return x;
    }
    // Pathological bounds; fall back to a clamped draw.
    return std::clamp(sigma * normal(), lo, hi);
}

std::int64_t Rng::index(std::int64_t n) {
    if (n <= 0)
        throw DomainError("index: n must be positive");
    const auto i = static_cast<std::int64_t>(uniform() * static_cast<double>(n));
    return std::min(i, n - 1);
}

} // namespace persfit
