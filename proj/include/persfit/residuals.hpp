#pragma once

#include "persfit/camera.hpp"
#include "persfit/field.hpp"
#include "persfit/gravity.hpp"

#include <Eigen/Core>

#include <vector>

namespace persfit {

/// Free-parameter column layout shared by the residual assembly and the
/// optimizer: [per-image gravity tangents (2 each) ..., log f, k...].
/// Fixed parameters contribute no columns.
struct ParameterLayout {
    int num_images = 1;
    bool gravity_free = true;
    bool focal_free = true;
    int k_free = 0; // number of free distortion coefficients (0..2)

    int gravity_cols() const { return gravity_free ? 2 * num_images : 0; }
    int gravity_col(int image) const { return 2 * image; }
    int focal_col() const { return gravity_cols(); }
    int k_col(int j) const { return gravity_cols() + (focal_free ? 1 : 0) + j; }
    int num_params() const { return gravity_cols() + (focal_free ? 1 : 0) + k_free; }
};

/// Stacked residuals for the active pixels: per pixel two up-vector rows
/// (weighted by conf_up) and one latitude row comparing sin(latitude)
/// (weighted by conf_lat). Rows with zero weight are dropped. J has one
/// column per free parameter in layout order; it is empty when the block
/// was assembled without a Jacobian.
struct ResidualBlock {
    Eigen::VectorXd r;
    Eigen::VectorXd w;
    Eigen::MatrixXd J;
    // Confidence mass of active pixels outside the invertible distortion
    // range vs. all active pixels; the optimizer bounds its growth.
    double saturated_weight = 0.0;
    double total_weight = 0.0;
    long rows() const { return r.size(); }
    double cost() const { return (w.array() * r.array().square()).sum(); }
};

enum class JacobianMode { Analytic, FiniteDifference };

/// Current optimization state: one camera (shared across images) and one
/// gravity direction per image.
struct ProblemState {
    CameraParams camera;
    std::vector<GravityDir> gravity;
};

/// Applies an update in layout order: gravity via sphere retraction, focal
/// multiplicatively through log f, distortion additively.
ProblemState apply_step(const ProblemState &state, const ParameterLayout &layout,
                        const Eigen::VectorXd &delta);

/// Assembles residuals (and the Jacobian when requested) for all images on
/// a regular stride-subsampled pixel grid. Throws DimensionMismatchError
/// when the fields disagree with the camera size or the layout.
ResidualBlock assemble(const ProblemState &state,
                       const std::vector<const PerspectiveField *> &fields,
                       const ParameterLayout &layout, int stride, bool with_jacobian,
                       JacobianMode mode = JacobianMode::Analytic);

/// Single-image convenience wrappers.
ResidualBlock residuals(const CameraParams &camera, const GravityDir &gravity,
                        const PerspectiveField &field, int stride = 1);
ResidualBlock jacobian(const CameraParams &camera, const GravityDir &gravity,
                       const PerspectiveField &field, const ParameterLayout &layout,
                       int stride = 1, JacobianMode mode = JacobianMode::Analytic);

} // namespace persfit
