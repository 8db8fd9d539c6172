#pragma once

#include "persfit/camera.hpp"
#include "persfit/field.hpp"
#include "persfit/gravity.hpp"
#include "persfit/rng.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace persfit {

enum class ConfMode { Unit, OracleInlier };

struct NoiseSpec {
    double sigma_up_deg = 0.0;  // std of the up-vector rotation angle
    double sigma_lat_deg = 0.0; // std of the latitude perturbation
    double outlier_frac = 0.0;  // fraction of pixels replaced by noise
    ConfMode conf_mode = ConfMode::Unit;
};

/// Ground-truth parameters plus a rendered (optionally perturbed) field.
/// Regenerating with the same seed reproduces the scenario bitwise.
struct Scenario {
    CameraParams camera;
    GravityDir gravity;
    PerspectiveField field;
    NoiseSpec noise;
    std::uint64_t seed = 0;
    std::vector<std::uint8_t> outlier_mask; // 1 where the pixel was replaced
};

/// Draws a camera/gravity configuration: roll, pitch ~ U[-45deg, 45deg],
/// vfov ~ U[20deg, 105deg], and for radial models k1 = khat * vfov(rad)
/// with khat ~ N(0, 0.07) truncated to [-0.3, 0.3] (k2 uses a quarter of
/// that scale). Renders the field and injects the requested noise.
Scenario sample_scenario(std::uint64_t seed, int width, int height, CameraModel model,
                         const NoiseSpec &noise);

/// Noise injection: up-vectors rotated by N(0, sigma_up^2) angles,
/// latitudes shifted by N(0, sigma_lat^2) and clamped, outlier pixels
/// replaced by uniform directions/latitudes. OracleInlier confidences mark
/// outliers with 0.05. Draw order is fixed per pixel in row-major order.
void perturb_field(PerspectiveField &field, const NoiseSpec &noise, Rng &rng,
                   std::vector<std::uint8_t> *outlier_mask);

/// Text format for gravity files: "gx gy gz" with 17 significant digits.
void save_gravity(const GravityDir &g, const std::string &path);
GravityDir load_gravity(const std::string &path);

/// Zero-padded scenario basename, e.g. 12 -> "0012".
std::string scenario_basename(int index);

/// Writes <dir>/<NNNN>.pfld, .cam (ground truth) and .grav.
void write_scenario(const Scenario &scenario, const std::string &dir, int index);

} // namespace persfit
