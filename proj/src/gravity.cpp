#include "persfit/gravity.hpp"

#include "persfit/errors.hpp"

#include <Eigen/Geometry>

#include <cmath>

namespace persfit {

GravityDir::GravityDir(const Eigen::Vector3d &v) {
    const double n = v.norm();
    if (!(n > 1e-12) || !v.allFinite())
        throw DomainError("gravity direction must be a nonzero finite vector");
    g_ = v / n;
}

double GravityDir::roll() const {
    if (g_[0] == 0.0 && g_[1] == 0.0)
        return 0.0; // gimbal lock: pitch at +/- pi/2
    return std::atan2(-g_[0], g_[1]);
}

double GravityDir::pitch() const {
    return std::asin(std::clamp(g_[2], -1.0, 1.0));
}

GravityDir gravity_from_roll_pitch(double roll, double pitch) {
    const double cp = std::cos(pitch);
    return GravityDir(Eigen::Vector3d(-std::sin(roll) * cp, std::cos(roll) * cp, std::sin(pitch)));
}

Eigen::Matrix<double, 3, 2> tangent_basis(const GravityDir &g) {
    const Eigen::Vector3d &v = g.vec();
    int least = 0;
    for (int i = 1; i < 3; ++i)
        if (std::abs(v[i]) < std::abs(v[least]))
            least = i;
    Eigen::Vector3d axis = Eigen::Vector3d::Zero();
    axis[least] = 1.0;
    Eigen::Matrix<double, 3, 2> basis;
    basis.col(0) = v.cross(axis).normalized();
    basis.col(1) = v.cross(basis.col(0)).normalized();
    return basis;
}

GravityDir retract(const GravityDir &g, const Eigen::Vector2d &delta) {
    if (delta[0] == 0.0 && delta[1] == 0.0)
        return g;
    const Eigen::Vector3d t = tangent_basis(g) * delta;
    const double theta = t.norm();
    if (theta == 0.0)
        return g;
    return GravityDir(std::cos(theta) * g.vec() + (std::sin(theta) / theta) * t);
}

double angle_between(const GravityDir &a, const GravityDir &b) {
    const Eigen::Vector3d &u = a.vec();
    const Eigen::Vector3d &v = b.vec();
    return std::atan2(u.cross(v).norm(), u.dot(v));
}

} // namespace persfit
