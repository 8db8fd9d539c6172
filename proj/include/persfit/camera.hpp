#pragma once

#include <Eigen/Core>

#include <iosfwd>
#include <optional>
#include <string>

namespace persfit {

enum class CameraModel { Pinhole, Radial1, Radial2 };

const char *to_string(CameraModel model);
CameraModel camera_model_from_string(const std::string &name);

/// Number of distortion coefficients optimized for a model (0, 1 or 2).
int distortion_dim(CameraModel model);

/// Pinhole / polynomial-radial camera intrinsics. Square pixels, no skew.
/// Normalized coordinates are (p - c) / f; the radial models scale them by
/// d(r^2) = 1 + k1 r^2 + k2 r^4 before applying the focal length.
struct CameraParams {
    CameraModel model = CameraModel::Pinhole;
    double f = 1.0;              // focal length [px]
    Eigen::Vector2d c{0.0, 0.0}; // principal point [px]
    Eigen::Vector2d k{0.0, 0.0}; // (k1, k2); unused entries are exactly 0
    int width = 1;
    int height = 1;

    // Throws DomainError when an invariant is broken (f <= 0, empty image,
    // or nonzero coefficients not supported by the model).
    void validate() const;
};

CameraParams make_pinhole(double f, int width, int height);
CameraParams make_radial1(double f, double k1, int width, int height);
CameraParams make_radial2(double f, double k1, double k2, int width, int height);

/// (p - c) / f
Eigen::Vector2d normalize_point(const CameraParams &params, const Eigen::Vector2d &p);
/// f * q + c
Eigen::Vector2d denormalize_point(const CameraParams &params, const Eigen::Vector2d &q);

/// Radial scale d(r^2) = 1 + k1 r^2 + k2 r^4 at squared radius r2.
double distortion_scale(const CameraParams &params, double r2);
/// dd/d(r^2) = k1 + 2 k2 r^2.
double distortion_scale_derivative(const CameraParams &params, double r2);

/// Applies the radial distortion to normalized coordinates. Identity for
/// pinhole and for k = 0.
Eigen::Vector2d distort(const CameraParams &params, const Eigen::Vector2d &q);

/// Radius r* where the radial profile r * d(r^2) stops being monotone, if
/// any. Points with distorted radius beyond r* d(r*^2) are out of model.
std::optional<double> fold_radius(const CameraParams &params);

/// Inverts the distortion by Newton iteration on the scalar radial profile
/// (max 50 iterations, |dr| <= 1e-12). Throws NonInvertibleError when the
/// input lies outside the invertible radius or the iteration fails.
Eigen::Vector2d undistort(const CameraParams &params, const Eigen::Vector2d &qd);

/// Saturating variant used by the solver: inputs beyond the invertible
/// radius are clamped to the fold point instead of failing. `saturated` is
/// set when clamping occurred (the result then carries no radial gradient).
Eigen::Vector2d undistort_saturated(const CameraParams &params, const Eigen::Vector2d &qd,
                                    bool *saturated);

/// vfov = 2 atan(H / (2 f)), in radians.
double vfov(const CameraParams &params);
double vfov_from_focal(double f, int height);
/// f = (H/2) / tan(vfov/2). Throws DomainError unless vfov in (0, pi).
double focal_from_vfov(double vfov_rad, int height);

/// Text format: one key=value per line, keys exactly
/// model,width,height,f,cx,cy,k1,k2; floats with 17 significant digits.
/// Reading rejects unknown or duplicate keys and validates the result.
/// |k1| > 0.5 produces a warning on stderr but is accepted.
std::string write_camera_text(const CameraParams &params);
CameraParams read_camera_text(const std::string &text);
void save_camera(const CameraParams &params, const std::string &path);
CameraParams load_camera(const std::string &path);

} // namespace persfit
