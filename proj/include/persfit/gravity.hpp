#pragma once

#include <Eigen/Core>

namespace persfit {

/// Gravity direction in the camera frame as a unit 3-vector. The camera
/// frame has x right, y down, z forward, so an upright camera sees gravity
/// at (0, 1, 0).
///
/// Angle convention: the camera attitude is a roll about the camera z-axis
/// followed by a pitch about the rolled x-axis, applied to world-down:
///   g = Rz(roll) * Rx(pitch) * (0, 1, 0)
///     = (-sin(roll) cos(pitch), cos(roll) cos(pitch), sin(pitch)).
/// Pitch therefore equals the latitude of the optical axis.
class GravityDir {
  public:
    GravityDir() : g_(0.0, 1.0, 0.0) {}
    /// Normalizes the input. Throws DomainError on a near-zero vector.
    explicit GravityDir(const Eigen::Vector3d &v);

    const Eigen::Vector3d &vec() const { return g_; }
    double x() const { return g_[0]; }
    double y() const { return g_[1]; }
    double z() const { return g_[2]; }

    /// roll = atan2(-gx, gy), pitch = asin(gz). At pitch = +/- pi/2 the
    /// roll is unobservable (gimbal lock) and reported as 0.
    double roll() const;
    double pitch() const;

  private:
    Eigen::Vector3d g_;
};

GravityDir gravity_from_roll_pitch(double roll, double pitch);

/// Orthonormal basis of the tangent plane at g: columns b1, b2 with
/// b_i . g = 0 and b1 . b2 = 0. Deterministic: b1 is built from the
/// coordinate axis least aligned with g.
Eigen::Matrix<double, 3, 2> tangent_basis(const GravityDir &g);

/// Exponential-map retraction: g' = cos|t| g + sin|t| t/|t| with
/// t = tangent_basis(g) * delta. Exact unit norm; retract(g, 0) = g and
/// d retract / d delta at 0 equals the tangent basis.
GravityDir retract(const GravityDir &g, const Eigen::Vector2d &delta);

/// Angle in radians between two unit directions.
double angle_between(const GravityDir &a, const GravityDir &b);

} // namespace persfit
