#pragma once

#include "persfit/camera.hpp"
#include "persfit/field.hpp"
#include "persfit/gravity.hpp"
#include "persfit/lm.hpp"
#include "persfit/residuals.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace persfit {

enum class Sharing { Independent, SharedIntrinsics, SharedGravityRig };
enum class InitStrategy { Trivial, Heuristic, Solver };

struct ParamPrior {
    double value = 0.0;
    double std = 1.0;
};

struct RansacConfig {
    int iterations = 100;
    double up_threshold_rad = 2.0 * M_PI / 180.0;
    double lat_threshold_rad = 2.0 * M_PI / 180.0;
    std::uint64_t seed = 0;
    int max_scored_pixels = 4096;     // scoring subsample cap per channel
    double min_vfov_rad = 5.0 * M_PI / 180.0;
    double max_vfov_rad = 170.0 * M_PI / 180.0;
    int focal_grid = 64;              // coarse grid for the 1-D focal search
};

struct CalibrationOptions {
    CameraModel model = CameraModel::Pinhole;
    Sharing sharing = Sharing::Independent;
    InitStrategy init = InitStrategy::Trivial;
    int stride = 1;
    std::optional<GravityDir> fixed_gravity;
    std::optional<double> fixed_focal;
    std::optional<Eigen::Vector2d> fixed_distortion;
    std::optional<ParamPrior> focal_prior; // on f, in pixels
    std::optional<ParamPrior> k1_prior;
    std::optional<ParamPrior> k2_prior;
    LMConfig lm;
    RansacConfig ransac;

    /// Rejects layouts where a parameter is both fixed and prior-regularized.
    void validate() const;
};

struct ImageEstimate {
    GravityDir gravity;
    double sigma_gravity_rad = 0.0; // sqrt of the tangent-covariance trace
    double sigma_roll_rad = 0.0;
    double sigma_pitch_rad = 0.0;
};

struct CameraEstimate {
    CameraParams params;
    double sigma_f_px = 0.0;
    double sigma_vfov_rad = 0.0; // |dvfov/dlogf| * std(logf)
    double sigma_k1 = 0.0;
    double sigma_k2 = 0.0;
};

struct CalibrationResult {
    std::vector<ImageEstimate> images;
    std::vector<CameraEstimate> cameras; // one entry when intrinsics are shared
    std::vector<LMTrace> traces;         // one entry when intrinsics are shared
    LMStatus status = LMStatus::MaxIters;
    InitStrategy init_used = InitStrategy::Trivial;
};

/// g = (0, 1, 0), f = 0.7 max(W, H), k = 0.
std::pair<GravityDir, double> init_trivial(int width, int height);

/// Reads the field at the principal point: (gx, gy) = -alpha * up_c with
/// alpha chosen for unit norm, gz = sin(latitude_c); the focal comes from
/// the latitude span of the central column. Throws DegenerateHeuristicError
/// when the span is empty or the center up-vector vanishes.
std::pair<GravityDir, double> init_heuristic(const PerspectiveField &field);

struct SolverInit {
    GravityDir gravity;
    double focal = 0.0;
    double score = 0.0;
    std::vector<std::uint8_t> up_inliers;  // full-grid masks of the winner
    std::vector<std::uint8_t> lat_inliers;
};

/// Minimal-solver RANSAC: each sample takes two up-vectors and one
/// latitude; given a focal each up-vector is one linear constraint on g,
/// and the focal is found by a 1-D root search on the latitude constraint.
/// Hypotheses are scored by the confidence-weighted inlier count. Throws
/// InsufficientSamplesError / NoHypothesisError.
SolverInit init_solver(const PerspectiveField &field, const RansacConfig &config);

/// Fits camera parameters and per-image gravity to the fields. All fields
/// share one camera when sharing = SharedIntrinsics; Independent runs one
/// problem per field. Prior terms are appended to the residual stack as
/// (theta - prior) / std rows with unit weight.
CalibrationResult calibrate(const std::vector<const PerspectiveField *> &fields,
                            const CalibrationOptions &options);

CalibrationResult calibrate(const PerspectiveField &field, const CalibrationOptions &options);

} // namespace persfit
