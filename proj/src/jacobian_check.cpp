#include "persfit/jacobian_check.hpp"

#include "persfit/camera.hpp"
#include "persfit/field.hpp"
#include "persfit/gravity.hpp"
#include "persfit/parallel.hpp"
#include "persfit/residuals.hpp"
#include "persfit/rng.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace persfit {

namespace {

constexpr double kDegToRad = M_PI / 180.0;

double block_error(const Eigen::MatrixXd &a, const Eigen::MatrixXd &b, long row0, long rows,
                   int col0, int cols) {
    double worst = 0.0;
    for (long r = row0; r < row0 + rows; ++r)
        for (int c = col0; c < col0 + cols; ++c) {
            const double ref = b(r, c);
            const double err = std::abs(a(r, c) - ref) / std::max(std::abs(ref), 1e-3);
            worst = std::max(worst, err);
        }
    return worst;
}

} // namespace

double JacobianCheckReport::overall() const {
    return std::max({up_gravity, up_logf, up_k, lat_gravity, lat_logf, lat_k});
}

JacobianCheckReport run_jacobian_check(std::uint64_t seed, int trials) {
    std::vector<JacobianCheckReport> reports(trials);
    parallel_for(trials, [&](std::int64_t t) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
        const int size = 64;
        const double roll = rng.uniform(-45.0, 45.0) * kDegToRad;
        const double pitch = rng.uniform(-45.0, 45.0) * kDegToRad;
        const double vfov_rad = rng.uniform(20.0, 105.0) * kDegToRad;
        const double f = focal_from_vfov(vfov_rad, size);

        CameraParams camera;
        switch (t % 3) {
        case 0:
            camera = make_pinhole(f, size, size);
            break;
        case 1:
            camera = make_radial1(f, rng.truncated_normal(0.07, -0.3, 0.3) * vfov_rad, size, size);
            break;
        default:
            camera = make_radial2(f, rng.truncated_normal(0.07, -0.3, 0.3) * vfov_rad,
                                  rng.truncated_normal(0.0175, -0.075, 0.075) * vfov_rad, size,
                                  size);
            break;
        }
        const GravityDir gravity = gravity_from_roll_pitch(roll, pitch);

        PerspectiveField field = render_field(camera, gravity);
        // Exclude pixels where the radial profile slope is small: the
        // derivative is legitimate there but finite differences lose
        // accuracy near the fold.
        for (int y = 0; y < size; ++y) {
            for (int x = 0; x < size; ++x) {
                const PixelEval e =
                    evaluate_pixel(camera, gravity, {x + 0.5, y + 0.5});
                const double slope = e.d + 2.0 * e.dprime * e.r2;
                if (e.saturated || e.degenerate || slope < 0.2 || e.wnorm < 1e-3) {
                    const std::size_t i = field.index(x, y);
                    field.conf_up[i] = 0.0;
                    field.conf_lat[i] = 0.0;
                }
            }
        }

        ParameterLayout layout;
        layout.k_free = distortion_dim(camera.model);
        const int stride = 8; // 64 pixels per configuration
        const ResidualBlock analytic =
            jacobian(camera, gravity, field, layout, stride, JacobianMode::Analytic);
        const ResidualBlock fd =
            jacobian(camera, gravity, field, layout, stride, JacobianMode::FiniteDifference);

        JacobianCheckReport &rep = reports[t];
        rep.trials = 1;
        // Included pixels keep full confidence, so rows come in clean
        // triples: up_x, up_y, latitude.
        long row = 0;
        const long n = analytic.rows();
        while (row < n) {
            rep.up_gravity = std::max(rep.up_gravity, block_error(analytic.J, fd.J, row, 2, 0, 2));
            rep.up_logf = std::max(rep.up_logf, block_error(analytic.J, fd.J, row, 2, 2, 1));
            if (layout.k_free > 0)
                rep.up_k = std::max(rep.up_k,
                                    block_error(analytic.J, fd.J, row, 2, 3, layout.k_free));
            rep.lat_gravity =
                std::max(rep.lat_gravity, block_error(analytic.J, fd.J, row + 2, 1, 0, 2));
            rep.lat_logf = std::max(rep.lat_logf, block_error(analytic.J, fd.J, row + 2, 1, 2, 1));
            if (layout.k_free > 0)
                rep.lat_k = std::max(rep.lat_k,
                                     block_error(analytic.J, fd.J, row + 2, 1, 3, layout.k_free));
            row += 3;
        }
    });

    JacobianCheckReport total;
    for (const JacobianCheckReport &rep : reports) {
        total.up_gravity = std::max(total.up_gravity, rep.up_gravity);
        total.up_logf = std::max(total.up_logf, rep.up_logf);
        total.up_k = std::max(total.up_k, rep.up_k);
        total.lat_gravity = std::max(total.lat_gravity, rep.lat_gravity);
        total.lat_logf = std::max(total.lat_logf, rep.lat_logf);
        total.lat_k = std::max(total.lat_k, rep.lat_k);
        total.trials += rep.trials;
    }
    return total;
}

} // namespace persfit
