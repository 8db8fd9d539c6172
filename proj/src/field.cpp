#include "persfit/field.hpp"

#include "persfit/errors.hpp"
#include "persfit/parallel.hpp"

#include <cmath>
#include <string>

namespace persfit {

namespace {
constexpr double kDegenerateNorm = 1e-12;
}

void PerspectiveField::validate() const {
    const std::size_t n = size();
    if (width < 1 || height < 1)
        throw DomainError("field: empty grid");
    if (up_x.size() != n || up_y.size() != n || latitude.size() != n || conf_up.size() != n ||
        conf_lat.size() != n)
        throw DimensionMismatchError("field: grid sizes disagree");
    for (std::size_t i = 0; i < n; ++i) {
        const double norm = std::hypot(up_x[i], up_y[i]);
        if (std::abs(norm - 1.0) > 1e-6)
            throw DomainError("field: up-vector at index " + std::to_string(i) +
                              " is not unit (norm " + std::to_string(norm) + ")");
        if (std::abs(latitude[i]) > M_PI / 2 + 1e-9)
            throw DomainError("field: latitude out of range at index " + std::to_string(i));
        if (conf_up[i] < 0.0 || conf_up[i] > 1.0 || conf_lat[i] < 0.0 || conf_lat[i] > 1.0)
            throw DomainError("field: confidence out of range at index " + std::to_string(i));
    }
}

PerspectiveField make_field(int width, int height) {
    PerspectiveField f;
    f.width = width;
    f.height = height;
    const std::size_t n = static_cast<std::size_t>(width) * height;
    f.up_x.assign(n, 0.0);
    f.up_y.assign(n, -1.0);
    f.latitude.assign(n, 0.0);
    f.conf_up.assign(n, 1.0);
    f.conf_lat.assign(n, 1.0);
    return f;
}

PixelEval evaluate_pixel(const CameraParams &params, const GravityDir &g,
                         const Eigen::Vector2d &p) {
    PixelEval e;
    const Eigen::Vector2d qd = normalize_point(params, p);
    e.uv = undistort_saturated(params, qd, &e.saturated);
    const double u = e.uv[0];
    const double v = e.uv[1];
    e.r2 = u * u + v * v;
    e.d = distortion_scale(params, e.r2);
    e.dprime = distortion_scale_derivative(params, e.r2);
    e.ubar = Eigen::Vector2d(u * g.z() - g.x(), v * g.z() - g.y());
    e.s = e.uv.dot(e.ubar);
    // w = (d I + 2 d' uv uv^T) ubar, the image of ubar under the distortion
    // Jacobian; collinear with the directional derivative of the projection
    // along -g.
    e.w = e.d * e.ubar + 2.0 * e.dprime * e.s * e.uv;
    e.wnorm = e.w.norm();
    if (e.wnorm > kDegenerateNorm) {
        e.up = e.w / e.wnorm;
    } else {
        e.degenerate = true;
        e.up = Eigen::Vector2d(0.0, -1.0);
    }
    e.nnorm = std::sqrt(e.r2 + 1.0);
    e.sin_lat = (u * g.x() + v * g.y() + g.z()) / e.nnorm;
    e.lat = std::asin(std::clamp(e.sin_lat, -1.0, 1.0));
    return e;
}

Eigen::Vector2d up_vector_at(const CameraParams &params, const GravityDir &g,
                             const Eigen::Vector2d &p) {
    const PixelEval e = evaluate_pixel(params, g, p);
    if (e.degenerate)
        throw DegeneratePixelError("up-vector undefined at pixel (" + std::to_string(p[0]) +
                                   ", " + std::to_string(p[1]) + ")");
    return e.up;
}

double latitude_at(const CameraParams &params, const GravityDir &g, const Eigen::Vector2d &p) {
    return evaluate_pixel(params, g, p).lat;
}

PerspectiveField render_field(const CameraParams &params, const GravityDir &g) {
    params.validate();
    PerspectiveField f = make_field(params.width, params.height);
    parallel_for(params.height, [&](std::int64_t y) {
        for (int x = 0; x < params.width; ++x) {
            const Eigen::Vector2d p(x + 0.5, y + 0.5);
            const PixelEval e = evaluate_pixel(params, g, p);
            const std::size_t i = f.index(x, static_cast<int>(y));
            f.up_x[i] = e.up[0];
            f.up_y[i] = e.up[1];
            f.latitude[i] = e.lat;
            if (e.degenerate)
                f.conf_up[i] = 0.0;
            if (e.saturated) {
                f.up_x[i] = 0.0;
                f.up_y[i] = -1.0;
                f.latitude[i] = 0.0;
                f.conf_up[i] = 0.0;
                f.conf_lat[i] = 0.0;
            }
        }
    });
    return f;
}

namespace {

struct BilinearWeights {
    int x0, x1, y0, y1;
    double wx, wy;
};

BilinearWeights bilinear_setup(const PerspectiveField &field, const Eigen::Vector2d &pos) {
    // Grid value (i, j) sits at the pixel center (i+0.5, j+0.5).
    const double gx = std::clamp(pos[0] - 0.5, 0.0, static_cast<double>(field.width - 1));
    const double gy = std::clamp(pos[1] - 0.5, 0.0, static_cast<double>(field.height - 1));
    BilinearWeights b;
    b.x0 = static_cast<int>(std::floor(gx));
    b.y0 = static_cast<int>(std::floor(gy));
    b.x0 = std::min(b.x0, field.width - 1);
    b.y0 = std::min(b.y0, field.height - 1);
    b.x1 = std::min(b.x0 + 1, field.width - 1);
    b.y1 = std::min(b.y0 + 1, field.height - 1);
    b.wx = gx - b.x0;
    b.wy = gy - b.y0;
    return b;
}

double bilerp(const std::vector<double> &grid, const PerspectiveField &f,
              const BilinearWeights &b) {
    const double top = (1.0 - b.wx) * grid[f.index(b.x0, b.y0)] + b.wx * grid[f.index(b.x1, b.y0)];
    const double bot = (1.0 - b.wx) * grid[f.index(b.x0, b.y1)] + b.wx * grid[f.index(b.x1, b.y1)];
    return (1.0 - b.wy) * top + b.wy * bot;
}

} // namespace

Eigen::Vector2d sample_up(const PerspectiveField &field, const Eigen::Vector2d &pos, bool *ok) {
    const BilinearWeights b = bilinear_setup(field, pos);
    Eigen::Vector2d u(bilerp(field.up_x, field, b), bilerp(field.up_y, field, b));
    const double n = u.norm();
    if (n < 1e-9) {
        *ok = false;
        return Eigen::Vector2d(0.0, -1.0);
    }
    *ok = true;
    return u / n;
}

double sample_latitude(const PerspectiveField &field, const Eigen::Vector2d &pos) {
    const BilinearWeights b = bilinear_setup(field, pos);
    return bilerp(field.latitude, field, b);
}

} // namespace persfit
