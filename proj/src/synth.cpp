#include "persfit/synth.hpp"

#include "persfit/errors.hpp"
#include "persfit/fieldio.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace persfit {

namespace {
constexpr double kDegToRad = M_PI / 180.0;
}

Scenario sample_scenario(std::uint64_t seed, int width, int height, CameraModel model,
                         const NoiseSpec &noise) {
    if (width < 32 || height < 32)
        throw DomainError("sample_scenario: image size must be at least 32x32");
    Rng rng(seed);
    Scenario sc;
    sc.seed = seed;
    sc.noise = noise;

    const double roll = rng.uniform(-45.0, 45.0) * kDegToRad;
    const double pitch = rng.uniform(-45.0, 45.0) * kDegToRad;
    const double vfov_rad = rng.uniform(20.0, 105.0) * kDegToRad;
    const double f = focal_from_vfov(vfov_rad, height);

    switch (model) {
    case CameraModel::Pinhole:
        sc.camera = make_pinhole(f, width, height);
        break;
    case CameraModel::Radial1: {
        const double khat = rng.truncated_normal(0.07, -0.3, 0.3);
        sc.camera = make_radial1(f, khat * vfov_rad, width, height);
        break;
    }
    case CameraModel::Radial2: {
        const double khat1 = rng.truncated_normal(0.07, -0.3, 0.3);
        const double khat2 = rng.truncated_normal(0.0175, -0.075, 0.075);
        sc.camera = make_radial2(f, khat1 * vfov_rad, khat2 * vfov_rad, width, height);
        break;
    }
    }
    sc.gravity = gravity_from_roll_pitch(roll, pitch);
    sc.field = render_field(sc.camera, sc.gravity);
    perturb_field(sc.field, noise, rng, &sc.outlier_mask);
    return sc;
}

void perturb_field(PerspectiveField &field, const NoiseSpec &noise, Rng &rng,
                   std::vector<std::uint8_t> *outlier_mask) {
    const double sigma_up = noise.sigma_up_deg * kDegToRad;
    const double sigma_lat = noise.sigma_lat_deg * kDegToRad;
    const std::size_t n = field.size();
    if (outlier_mask)
        outlier_mask->assign(n, 0);
    constexpr double kHalfPi = M_PI / 2;
    for (std::size_t i = 0; i < n; ++i) {
        const bool outlier = rng.uniform() < noise.outlier_frac;
        const double up_angle = rng.normal(sigma_up);
        const double lat_shift = rng.normal(sigma_lat);
        if (outlier) {
            const double dir = rng.uniform(0.0, 2.0 * M_PI);
            field.up_x[i] = std::cos(dir);
            field.up_y[i] = std::sin(dir);
            field.latitude[i] = rng.uniform(-kHalfPi, kHalfPi);
            if (outlier_mask)
                (*outlier_mask)[i] = 1;
        } else {
            if (sigma_up > 0.0) {
                const double c = std::cos(up_angle);
                const double s = std::sin(up_angle);
                const double ux = field.up_x[i];
                const double uy = field.up_y[i];
                field.up_x[i] = c * ux - s * uy;
                field.up_y[i] = s * ux + c * uy;
            }
            if (sigma_lat > 0.0)
                field.latitude[i] = std::clamp(field.latitude[i] + lat_shift, -kHalfPi, kHalfPi);
        }
        if (noise.conf_mode == ConfMode::OracleInlier && outlier) {
            if (field.conf_up[i] > 0.0)
                field.conf_up[i] = 0.05;
            if (field.conf_lat[i] > 0.0)
                field.conf_lat[i] = 0.05;
        }
    }
}

void save_gravity(const GravityDir &g, const std::string &path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw FileFormatError("cannot open for writing: " + path);
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g\n", g.x(), g.y(), g.z());
    out << buf;
    if (!out)
        throw FileFormatError("write failed: " + path);
}

GravityDir load_gravity(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw FileFormatError("cannot open: " + path);
    double x, y, z;
    if (!(in >> x >> y >> z))
        throw FileFormatError("malformed gravity file: " + path);
    return GravityDir(Eigen::Vector3d(x, y, z));
}

std::string scenario_basename(int index) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d", index);
    return buf;
}

void write_scenario(const Scenario &scenario, const std::string &dir, int index) {
    const std::string base = dir + "/" + scenario_basename(index);
    save_field(scenario.field, base + ".pfld");
    save_camera(scenario.camera, base + ".cam");
    save_gravity(scenario.gravity, base + ".grav");
}

} // namespace persfit
