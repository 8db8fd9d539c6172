#pragma once

#include <cstdint>

namespace persfit {

/// Maximum mismatch between the analytic Jacobian and central finite
/// differences, per block, over randomized camera/gravity configurations.
/// Entries are |analytic - fd| / max(|fd|, 1e-3), so values below 1e-5
/// mean agreement to 1e-5 relative (1e-8 absolute near zero).
struct JacobianCheckReport {
    double up_gravity = 0.0;
    double up_logf = 0.0;
    double up_k = 0.0;
    double lat_gravity = 0.0;
    double lat_logf = 0.0;
    double lat_k = 0.0;
    int trials = 0;

    double overall() const;
    bool passes(double tol = 1e-5) const { return overall() < tol; }
};

/// Runs `trials` seeded configurations cycling through the pinhole and
/// radial models over the synthetic sampling ranges. Pixels outside the
/// invertible distortion range or close to its fold are excluded.
JacobianCheckReport run_jacobian_check(std::uint64_t seed, int trials);

} // namespace persfit
