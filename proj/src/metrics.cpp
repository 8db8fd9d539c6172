#include "persfit/metrics.hpp"

#include "persfit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace persfit {

namespace {
constexpr double kRadToDeg = 180.0 / M_PI;

double wrap_angle(double a) {
    while (a > M_PI)
        a -= 2.0 * M_PI;
    while (a < -M_PI)
        a += 2.0 * M_PI;
    return a;
}
} // namespace

ErrorSample angular_errors(const CameraParams &gt_camera, const GravityDir &gt_gravity,
                           const CameraParams &est_camera, const GravityDir &est_gravity) {
    if (gt_camera.width != est_camera.width || gt_camera.height != est_camera.height)
        throw DimensionMismatchError("angular_errors: image sizes differ");
    ErrorSample e;
    e.roll_err_deg = std::abs(wrap_angle(gt_gravity.roll() - est_gravity.roll())) * kRadToDeg;
    e.pitch_err_deg = std::abs(gt_gravity.pitch() - est_gravity.pitch()) * kRadToDeg;
    e.gravity_err_deg = angle_between(gt_gravity, est_gravity) * kRadToDeg;
    e.vfov_err_deg = std::abs(vfov(gt_camera) - vfov(est_camera)) * kRadToDeg;
    e.pixel_dist_err_px = pixel_distortion_error(gt_camera, est_camera.k);
    return e;
}

double auc(const std::vector<double> &errors_deg, double threshold_deg) {
    if (errors_deg.empty())
        throw DomainError("auc: empty error list");
    if (!(threshold_deg > 0.0))
        throw DomainError("auc: threshold must be positive");
    double area = 0.0;
    for (double e : errors_deg) {
        if (!std::isfinite(e))
            continue; // failure: never recalled
        const double clamped = std::max(e, 1.0);
        area += std::max(0.0, threshold_deg - clamped);
    }
    return 100.0 * area / (threshold_deg * static_cast<double>(errors_deg.size()));
}

double pixel_distortion_error(const CameraParams &gt_camera, const Eigen::Vector2d &est_k,
                              int stride) {
    if (stride < 1)
        throw DomainError("pixel_distortion_error: stride must be >= 1");
    double total = 0.0;
    long count = 0;
    for (int y = 0; y < gt_camera.height; y += stride) {
        for (int x = 0; x < gt_camera.width; x += stride) {
            const Eigen::Vector2d p(x + 0.5, y + 0.5);
            const Eigen::Vector2d qd = normalize_point(gt_camera, p);
            Eigen::Vector2d q;
            try {
                q = undistort(gt_camera, qd);
            } catch (const NonInvertibleError &) {
                continue;
            }
            const double r2 = q.squaredNorm();
            const double d_gt = 1.0 + r2 * (gt_camera.k[0] + r2 * gt_camera.k[1]);
            const double d_est = 1.0 + r2 * (est_k[0] + r2 * est_k[1]);
            total += gt_camera.f * std::abs(d_gt - d_est) * q.norm();
            ++count;
        }
    }
    if (count == 0)
        return 0.0;
    return total / static_cast<double>(count);
}

double median(std::vector<double> values) {
    if (values.empty())
        throw DomainError("median: empty list");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return 0.5 * (values[(n - 1) / 2] + values[n / 2]);
}

std::string benchmark_report(const std::vector<ErrorSample> &samples) {
    if (samples.empty())
        throw DomainError("benchmark_report: no samples");
    std::vector<double> roll, pitch, fov;
    roll.reserve(samples.size());
    pitch.reserve(samples.size());
    fov.reserve(samples.size());
    for (const ErrorSample &s : samples) {
        roll.push_back(s.roll_err_deg);
        pitch.push_back(s.pitch_err_deg);
        fov.push_back(s.vfov_err_deg);
    }
    std::ostringstream out;
    out << "median_roll\tmedian_pitch\tmedian_vfov"
        << "\tauc_roll@1\tauc_roll@5\tauc_roll@10"
        << "\tauc_pitch@1\tauc_pitch@5\tauc_pitch@10"
        << "\tauc_vfov@1\tauc_vfov@5\tauc_vfov@10\n";
    char buf[32];
    auto put = [&](double v, bool last = false) {
        std::snprintf(buf, sizeof(buf), "%.2f", v);
        out << buf << (last ? "\n" : "\t");
    };
    put(median(roll));
    put(median(pitch));
    put(median(fov));
    for (const auto *errs : {&roll, &pitch, &fov})
        for (double t : {1.0, 5.0, 10.0})
            put(auc(*errs, t), errs == &fov && t == 10.0);
    return out.str();
}

} // namespace persfit
