#include "persfit/camera.hpp"

#include "persfit/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace persfit {

namespace {

constexpr int kUndistortMaxIter = 50;
constexpr double kUndistortTol = 1e-12;

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

const char *to_string(CameraModel model) {
    switch (model) {
    case CameraModel::Pinhole:
        return "pinhole";
    case CameraModel::Radial1:
        return "radial1";
    case CameraModel::Radial2:
        return "radial2";
    }
    return "invalid";
}

CameraModel camera_model_from_string(const std::string &name) {
    if (name == "pinhole")
        return CameraModel::Pinhole;
    if (name == "radial1")
        return CameraModel::Radial1;
    if (name == "radial2")
        return CameraModel::Radial2;
    throw DomainError("unknown camera model: " + name);
}

int distortion_dim(CameraModel model) {
    switch (model) {
    case CameraModel::Pinhole:
        return 0;
    case CameraModel::Radial1:
        return 1;
    case CameraModel::Radial2:
        return 2;
    }
    return 0;
}

void CameraParams::validate() const {
    if (!(f > 0.0))
        throw DomainError("focal length must be positive");
    if (width < 1 || height < 1)
        throw DomainError("image size must be at least 1x1");
    if (model == CameraModel::Pinhole && (k[0] != 0.0 || k[1] != 0.0))
        throw DomainError("pinhole model requires k1 = k2 = 0");
    if (model == CameraModel::Radial1 && k[1] != 0.0)
        throw DomainError("radial1 model requires k2 = 0");
    if (!std::isfinite(f) || !c.allFinite() || !k.allFinite())
        throw DomainError("camera parameters must be finite");
}

CameraParams make_pinhole(double f, int width, int height) {
    CameraParams p;
    p.model = CameraModel::Pinhole;
    p.f = f;
    p.c = Eigen::Vector2d(0.5 * width, 0.5 * height);
    p.width = width;
    p.height = height;
    p.validate();
    return p;
}

CameraParams make_radial1(double f, double k1, int width, int height) {
    CameraParams p;
    p.model = CameraModel::Radial1;
    p.f = f;
    p.c = Eigen::Vector2d(0.5 * width, 0.5 * height);
    p.k = Eigen::Vector2d(k1, 0.0);
    p.width = width;
    p.height = height;
    p.validate();
    return p;
}

CameraParams make_radial2(double f, double k1, double k2, int width, int height) {
    CameraParams p;
    p.model = CameraModel::Radial2;
    p.f = f;
    p.c = Eigen::Vector2d(0.5 * width, 0.5 * height);
    p.k = Eigen::Vector2d(k1, k2);
    p.width = width;
    p.height = height;
    p.validate();
    return p;
}

Eigen::Vector2d normalize_point(const CameraParams &params, const Eigen::Vector2d &p) {
    return (p - params.c) / params.f;
}

Eigen::Vector2d denormalize_point(const CameraParams &params, const Eigen::Vector2d &q) {
    return params.f * q + params.c;
}

double distortion_scale(const CameraParams &params, double r2) {
    return 1.0 + r2 * (params.k[0] + r2 * params.k[1]);
}

double distortion_scale_derivative(const CameraParams &params, double r2) {
    return params.k[0] + 2.0 * params.k[1] * r2;
}

Eigen::Vector2d distort(const CameraParams &params, const Eigen::Vector2d &q) {
    if (params.model == CameraModel::Pinhole)
        return q;
    return distortion_scale(params, q.squaredNorm()) * q;
}

std::optional<double> fold_radius(const CameraParams &params) {
    if (params.model == CameraModel::Pinhole)
        return std::nullopt;
    const double k1 = params.k[0];
    const double k2 = params.k[1];
    // Roots of d(rho(r))/dr = 1 + 3 k1 r^2 + 5 k2 r^4 in x = r^2.
    if (k2 == 0.0) {
        if (k1 >= 0.0)
            return std::nullopt;
        return std::sqrt(-1.0 / (3.0 * k1));
    }
    const double disc = 9.0 * k1 * k1 - 20.0 * k2;
    if (disc < 0.0)
        return std::nullopt;
    const double sq = std::sqrt(disc);
    const double x1 = (-3.0 * k1 - sq) / (10.0 * k2);
    const double x2 = (-3.0 * k1 + sq) / (10.0 * k2);
    double x = std::numeric_limits<double>::infinity();
    if (x1 > 0.0)
        x = std::min(x, x1);
    if (x2 > 0.0)
        x = std::min(x, x2);
    if (!std::isfinite(x))
        return std::nullopt;
    return std::sqrt(x);
}

namespace {

// Solves r * d(r^2) = rd on the monotone branch. Returns the undistorted
// radius, or NaN when rd lies beyond the fold.
double solve_radial(const CameraParams &params, double rd, const std::optional<double> &rstar,
                    bool *out_of_range) {
    *out_of_range = false;
    if (rd == 0.0)
        return 0.0;
    double rmax = std::numeric_limits<double>::infinity();
    if (rstar) {
        rmax = *rstar;
        const double rd_max = rmax * distortion_scale(params, rmax * rmax);
        if (rd > rd_max) {
            *out_of_range = true;
            return std::numeric_limits<double>::quiet_NaN();
        }
    }
    double r = std::min(rd, rmax);
    for (int it = 0; it < kUndistortMaxIter; ++it) {
        const double r2 = r * r;
        const double d = distortion_scale(params, r2);
        const double slope = d + 2.0 * distortion_scale_derivative(params, r2) * r2;
        if (slope <= 0.0) {
            *out_of_range = true;
            return std::numeric_limits<double>::quiet_NaN();
        }
        const double step = (r * d - rd) / slope;
        r -= step;
        if (r < 0.0)
            r = 0.0;
        if (r > rmax)
            r = rmax;
        if (std::abs(step) <= kUndistortTol)
            return r;
    }
    *out_of_range = true;
    return std::numeric_limits<double>::quiet_NaN();
}

} // namespace

Eigen::Vector2d undistort(const CameraParams &params, const Eigen::Vector2d &qd) {
    if (params.model == CameraModel::Pinhole || (params.k[0] == 0.0 && params.k[1] == 0.0))
        return qd;
    const double rd = qd.norm();
    bool bad = false;
    const double r = solve_radial(params, rd, fold_radius(params), &bad);
    if (bad)
        throw NonInvertibleError("undistort: point at radius " + std::to_string(rd) +
                                 " is outside the invertible range of the distortion");
    if (rd == 0.0)
        return Eigen::Vector2d::Zero();
    return qd * (r / rd);
}

Eigen::Vector2d undistort_saturated(const CameraParams &params, const Eigen::Vector2d &qd,
                                    bool *saturated) {
    *saturated = false;
    if (params.model == CameraModel::Pinhole || (params.k[0] == 0.0 && params.k[1] == 0.0))
        return qd;
    const double rd = qd.norm();
    const auto rstar = fold_radius(params);
    bool bad = false;
    double r = solve_radial(params, rd, rstar, &bad);
    if (bad) {
        // Clamp just inside the fold so downstream evaluation stays finite.
        *saturated = true;
        r = rstar ? *rstar * (1.0 - 1e-9) : rd;
    }
    if (rd == 0.0)
        return Eigen::Vector2d::Zero();
    return qd * (r / rd);
}

double vfov(const CameraParams &params) {
    return vfov_from_focal(params.f, params.height);
}

double vfov_from_focal(double f, int height) {
    if (!(f > 0.0))
        throw DomainError("focal length must be positive");
    return 2.0 * std::atan2(0.5 * height, f);
}

double focal_from_vfov(double vfov_rad, int height) {
    if (!(vfov_rad > 0.0) || !(vfov_rad < M_PI))
        throw DomainError("vfov must lie in (0, pi)");
    if (height < 1)
        throw DomainError("image height must be at least 1");
    return 0.5 * height / std::tan(0.5 * vfov_rad);
}

std::string write_camera_text(const CameraParams &params) {
    params.validate();
    if (std::abs(params.k[0]) > 0.5)
        std::fprintf(stderr, "warning: |k1| = %g exceeds 0.5\n", std::abs(params.k[0]));
    std::ostringstream out;
    out << "model=" << to_string(params.model) << '\n';
    out << "width=" << params.width << '\n';
    out << "height=" << params.height << '\n';
    out << "f=" << format_double(params.f) << '\n';
    out << "cx=" << format_double(params.c[0]) << '\n';
    out << "cy=" << format_double(params.c[1]) << '\n';
    out << "k1=" << format_double(params.k[0]) << '\n';
    out << "k2=" << format_double(params.k[1]) << '\n';
    return out.str();
}

CameraParams read_camera_text(const std::string &text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw FileFormatError("camera line " + std::to_string(lineno) + ": missing '='");
        const std::string key = line.substr(0, eq);
        if (key != "model" && key != "width" && key != "height" && key != "f" && key != "cx" &&
            key != "cy" && key != "k1" && key != "k2")
            throw FileFormatError("camera line " + std::to_string(lineno) + ": unknown key '" +
                                  key + "'");
        if (!kv.emplace(key, line.substr(eq + 1)).second)
            throw FileFormatError("camera: duplicate key '" + key + "'");
    }
    for (const char *key : {"model", "width", "height", "f", "cx", "cy", "k1", "k2"})
        if (!kv.count(key))
            throw FileFormatError(std::string("camera: missing key '") + key + "'");

    CameraParams p;
    p.model = camera_model_from_string(kv["model"]);
    try {
        p.width = std::stoi(kv["width"]);
        p.height = std::stoi(kv["height"]);
        p.f = std::stod(kv["f"]);
        p.c = Eigen::Vector2d(std::stod(kv["cx"]), std::stod(kv["cy"]));
        p.k = Eigen::Vector2d(std::stod(kv["k1"]), std::stod(kv["k2"]));
    } catch (const std::exception &) {
        throw FileFormatError("camera: malformed numeric value");
    }
    try {
        p.validate();
    } catch (const DomainError &e) {
        throw FileFormatError(std::string("camera: ") + e.what());
    }
    if (std::abs(p.k[0]) > 0.5)
        std::fprintf(stderr, "warning: |k1| = %g exceeds 0.5\n", std::abs(p.k[0]));
    return p;
}

void save_camera(const CameraParams &params, const std::string &path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw FileFormatError("cannot open for writing: " + path);
    out << write_camera_text(params);
    if (!out)
        throw FileFormatError("write failed: " + path);
}

CameraParams load_camera(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw FileFormatError("cannot open: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return read_camera_text(buf.str());
}

} // namespace persfit
