#pragma once

#include "persfit/camera.hpp"
#include "persfit/gravity.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <vector>

namespace persfit {

/// Per-pixel up-vector and latitude grids with confidences, all H x W
/// row-major. Grid entry (x, y) describes the pixel center (x+0.5, y+0.5).
struct PerspectiveField {
    int width = 0;
    int height = 0;
    std::vector<double> up_x;     // unit up-vector, x component
    std::vector<double> up_y;     // unit up-vector, y component
    std::vector<double> latitude; // radians in [-pi/2, pi/2]
    std::vector<double> conf_up;  // in [0, 1]
    std::vector<double> conf_lat; // in [0, 1]

    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * width + x;
    }
    std::size_t size() const { return static_cast<std::size_t>(width) * height; }
    Eigen::Vector2d up(int x, int y) const {
        const std::size_t i = index(x, y);
        return {up_x[i], up_y[i]};
    }

    /// Throws DomainError when grids disagree in size, an up-vector is not
    /// unit (+/- 1e-6), a latitude leaves [-pi/2, pi/2], or a confidence
    /// leaves [0, 1].
    void validate() const;
};

PerspectiveField make_field(int width, int height);

/// Everything the forward model knows about one pixel. The same evaluation
/// backs rendering and the solver residuals, so a rendered field has
/// exactly zero residual against its own parameters.
struct PixelEval {
    Eigen::Vector2d uv;       // undistorted normalized coordinates
    Eigen::Vector2d ubar;     // (u gz - gx, v gz - gy)
    Eigen::Vector2d w;        // unnormalized up direction after distortion
    Eigen::Vector2d up;       // w / |w| (unit); (0,-1) when degenerate
    double wnorm = 0.0;
    double sin_lat = 0.0;     // n.g / |n| with n = (u, v, 1)
    double lat = 0.0;
    double r2 = 0.0;          // u^2 + v^2
    double d = 1.0;           // distortion scale at r2
    double dprime = 0.0;      // dd/d(r2)
    double s = 0.0;           // (u, v) . ubar
    double nnorm = 1.0;       // |(u, v, 1)|
    bool saturated = false;   // pixel outside the invertible distortion range
    bool degenerate = false;  // |w| ~ 0: gravity vanishing point
};

PixelEval evaluate_pixel(const CameraParams &params, const GravityDir &g,
                         const Eigen::Vector2d &p);

/// Unit up-vector at pixel p. Throws DegeneratePixelError at the gravity
/// vanishing point. Out-of-model pixels evaluate at the fold radius.
Eigen::Vector2d up_vector_at(const CameraParams &params, const GravityDir &g,
                             const Eigen::Vector2d &p);

/// Latitude (radians) of the back-projected ray at pixel p. Total.
double latitude_at(const CameraParams &params, const GravityDir &g, const Eigen::Vector2d &p);

/// Renders the full field at pixel centers with unit confidences.
/// Degenerate pixels get up = (0,-1) and conf_up = 0; pixels outside the
/// invertible distortion range get both confidences set to 0.
PerspectiveField render_field(const CameraParams &params, const GravityDir &g);

/// Bilinear interpolation at a continuous pixel position, clamped to the
/// grid of pixel centers. Up-vectors are renormalized after interpolation;
/// `ok` is cleared when the interpolated up-vector vanishes.
Eigen::Vector2d sample_up(const PerspectiveField &field, const Eigen::Vector2d &pos, bool *ok);
double sample_latitude(const PerspectiveField &field, const Eigen::Vector2d &pos);

} // namespace persfit
