#pragma once

#include "persfit/camera.hpp"
#include "persfit/gravity.hpp"

#include <string>
#include <vector>

namespace persfit {

/// Per-image evaluation errors, degrees / pixels; +inf encodes a failure.
struct ErrorSample {
    double roll_err_deg = std::numeric_limits<double>::infinity();
    double pitch_err_deg = std::numeric_limits<double>::infinity();
    double gravity_err_deg = std::numeric_limits<double>::infinity();
    double vfov_err_deg = std::numeric_limits<double>::infinity();
    double pixel_dist_err_px = std::numeric_limits<double>::infinity();
};

ErrorSample angular_errors(const CameraParams &gt_camera, const GravityDir &gt_gravity,
                           const CameraParams &est_camera, const GravityDir &est_gravity);

/// Area under the recall curve up to threshold_deg, as a percentage.
/// Every error is clamped to at least 1 degree before integration; +inf
/// (or NaN) errors never recall. Piecewise-exact: the step recall function
/// integrates to sum(max(0, t - clamp(e))) / (N t). Throws DomainError on
/// an empty list.
double auc(const std::vector<double> &errors_deg, double threshold_deg);

/// Mean pixel displacement between the ground-truth distortion and the
/// candidate coefficients, both applied at the ground-truth focal length
/// over the undistorted normalized grid of in-frame pixel centers
/// (subsampled by `stride`). Pixels outside the invertible range of the
/// ground-truth distortion are skipped.
double pixel_distortion_error(const CameraParams &gt_camera, const Eigen::Vector2d &est_k,
                              int stride = 4);

/// Median with the lower/upper midpoint average for even counts.
double median(std::vector<double> values);

/// Tab-separated benchmark table: a header line and one data row with
/// median roll/pitch/vfov and AUC at 1/5/10 degrees, two decimals.
std::string benchmark_report(const std::vector<ErrorSample> &samples);

} // namespace persfit
