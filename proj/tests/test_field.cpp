#include "persfit/errors.hpp"
#include "persfit/field.hpp"
#include "persfit/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace persfit;

namespace {

// Independent projection oracle: P -> f * d(r^2) (X/Z, Y/Z) + c.
Eigen::Vector2d project_point(const CameraParams &cam, const Eigen::Vector3d &P) {
    const double u = P[0] / P[2];
    const double v = P[1] / P[2];
    const double r2 = u * u + v * v;
    const double d = 1.0 + cam.k[0] * r2 + cam.k[1] * r2 * r2;
    return {cam.f * d * u + cam.c[0], cam.f * d * v + cam.c[1]};
}

// Finite-difference limit of the up-vector definition: the projected
// motion of the 3D point moved against gravity.
Eigen::Vector2d up_fd_limit(const CameraParams &cam, const GravityDir &g,
                            const Eigen::Vector2d &p, bool *ok) {
    constexpr double t = 1e-6;
    bool saturated = false;
    const Eigen::Vector2d uv = undistort_saturated(cam, normalize_point(cam, p), &saturated);
    const Eigen::Vector3d P(uv[0], uv[1], 1.0);
    const Eigen::Vector2d moved = project_point(cam, P - t * g.vec());
    const Eigen::Vector2d base = project_point(cam, P);
    const Eigen::Vector2d diff = moved - base;
    const double n = diff.norm();
    *ok = !saturated && n > 1e-9;
    return *ok ? Eigen::Vector2d(diff / n) : Eigen::Vector2d(0, -1);
}

double angular_gap(const Eigen::Vector2d &a, const Eigen::Vector2d &b) {
    const double cross = a[0] * b[1] - a[1] * b[0];
    const double dot = a.dot(b);
    return std::abs(std::atan2(cross, dot));
}

} // namespace

TEST_SUITE_BEGIN("field");

TEST_CASE("upright pinhole camera points every up-vector to (0,-1)") {
    const CameraParams cam = make_pinhole(224.0, 320, 320);
    const GravityDir g(Eigen::Vector3d(0, 1, 0));
    for (const Eigen::Vector2d &p :
         {Eigen::Vector2d(3.5, 7.5), Eigen::Vector2d(160.5, 160.5), Eigen::Vector2d(319.5, 0.5)}) {
        const Eigen::Vector2d up = up_vector_at(cam, g, p);
        CHECK(up[0] == doctest::Approx(0.0).epsilon(1e-15));
        CHECK(up[1] == doctest::Approx(-1.0).epsilon(1e-15));
    }
}

TEST_CASE("up-vector for gravity along the optical axis") {
    const CameraParams cam = make_pinhole(160.0, 320, 320);
    const GravityDir g(Eigen::Vector3d(0, 0, 1));
    // pixel with (u, v) = (1, 0)
    const Eigen::Vector2d p = denormalize_point(cam, {1.0, 0.0});
    const Eigen::Vector2d up = up_vector_at(cam, g, p);
    CHECK(up[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(up[1] == doctest::Approx(0.0).epsilon(1e-15));
    // the principal point is the vanishing point of g
    CHECK_THROWS_AS((void)up_vector_at(cam, g, cam.c), DegeneratePixelError);
}

TEST_CASE("latitude examples") {
    const CameraParams cam = make_pinhole(160.0, 320, 320);
    CHECK(latitude_at(cam, GravityDir(Eigen::Vector3d(0, 0, 1)), cam.c) ==
          doctest::Approx(M_PI / 2).epsilon(1e-14));
    CHECK(latitude_at(cam, GravityDir(Eigen::Vector3d(0, 1, 0)), cam.c) == 0.0);
    const Eigen::Vector2d p = denormalize_point(cam, {0.0, 1.0});
    CHECK(latitude_at(cam, GravityDir(Eigen::Vector3d(0, 1, 0)), p) ==
          doctest::Approx(std::asin(1.0 / std::sqrt(2.0))).epsilon(1e-14));
    CHECK(latitude_at(cam, GravityDir(Eigen::Vector3d(0, 1, 0)), p) ==
          doctest::Approx(M_PI / 4).epsilon(1e-14));
}

TEST_CASE("closed form matches the finite-difference limit") {
    Rng rng(2024);
    int checked = 0;
    for (int trial = 0; trial < 80; ++trial) {
        const double vfov = rng.uniform(20.0, 105.0) * M_PI / 180.0;
        const double f = focal_from_vfov(vfov, 320);
        const bool radial = trial % 2 == 1;
        const CameraParams cam = radial
                                     ? make_radial1(f, rng.uniform(-0.3, 0.3) * vfov, 320, 320)
                                     : make_pinhole(f, 320, 320);
        const GravityDir g = gravity_from_roll_pitch(rng.uniform(-0.7854, 0.7854),
                                                     rng.uniform(-0.7854, 0.7854));
        for (int i = 0; i < 40; ++i) {
            const Eigen::Vector2d p(rng.uniform(0.0, 320.0), rng.uniform(0.0, 320.0));
            const PixelEval e = evaluate_pixel(cam, g, p);
            if (e.saturated || e.wnorm < 1e-3)
                continue;
            bool ok = false;
            const Eigen::Vector2d oracle = up_fd_limit(cam, g, p, &ok);
            if (!ok)
                continue;
            CHECK(angular_gap(e.up, oracle) < 1e-5);
            ++checked;
        }
    }
    CHECK(checked > 2000);
}

TEST_CASE("rendering is deterministic and matches pointwise evaluation") {
    const CameraParams cam = make_radial1(200.0, 0.08, 160, 120);
    const GravityDir g = gravity_from_roll_pitch(0.3, -0.2);
    const PerspectiveField field = render_field(cam, g);
    const PerspectiveField again = render_field(cam, g);
    CHECK(field.up_x == again.up_x);
    CHECK(field.up_y == again.up_y);
    CHECK(field.latitude == again.latitude);

    Rng rng(9);
    for (int i = 0; i < 100; ++i) {
        const int x = static_cast<int>(rng.index(160));
        const int y = static_cast<int>(rng.index(120));
        const Eigen::Vector2d p(x + 0.5, y + 0.5);
        const PixelEval e = evaluate_pixel(cam, g, p);
        CHECK(field.up_x[field.index(x, y)] == e.up[0]);
        CHECK(field.up_y[field.index(x, y)] == e.up[1]);
        CHECK(field.latitude[field.index(x, y)] == e.lat);
    }
    field.validate();
}

TEST_CASE("upright render: constant up, latitude crosses zero mid-column") {
    const CameraParams cam = make_pinhole(224.0, 320, 320);
    const PerspectiveField field = render_field(cam, GravityDir(Eigen::Vector3d(0, 1, 0)));
    for (std::size_t i = 0; i < field.size(); i += 997) {
        CHECK(field.up_x[i] == 0.0);
        CHECK(field.up_y[i] == -1.0);
    }
    const int cx = 160;
    CHECK(field.latitude[field.index(cx, 159)] < 0.0);
    CHECK(field.latitude[field.index(cx, 160)] > 0.0);
}

TEST_CASE("latitude changes sign exactly with the ray-gravity dot product") {
    const CameraParams cam = make_radial1(180.0, -0.05, 96, 96);
    const GravityDir g = gravity_from_roll_pitch(0.4, 0.15);
    const PerspectiveField field = render_field(cam, g);
    for (int y = 0; y < 96; ++y) {
        for (int x = 0; x < 96; ++x) {
            const std::size_t i = field.index(x, y);
            if (field.conf_lat[i] <= 0.0)
                continue;
            const PixelEval e = evaluate_pixel(cam, g, {x + 0.5, y + 0.5});
            const double dot = e.uv[0] * g.x() + e.uv[1] * g.y() + g.z();
            if (dot > 0.0)
                CHECK(field.latitude[i] > 0.0);
            else if (dot < 0.0)
                CHECK(field.latitude[i] < 0.0);
            else
                CHECK(field.latitude[i] == 0.0);
        }
    }
}

TEST_CASE("rotating gravity about the optical axis rotates the rendered up field") {
    const int size = 64;
    const CameraParams cam = make_pinhole(70.0, size, size);
    const GravityDir g = gravity_from_roll_pitch(0.35, -0.25);

    auto rotate_quarter = [&](const Eigen::Vector3d &v) {
        // 90 degrees about the camera z-axis
        return Eigen::Vector3d(-v[1], v[0], v[2]);
    };
    Eigen::Vector3d gv = g.vec();
    PerspectiveField base = render_field(cam, g);
    for (int quarter = 0; quarter < 3; ++quarter) {
        gv = rotate_quarter(gv);
        const PerspectiveField rotated = render_field(cam, GravityDir(gv));
        for (int y = 0; y < size; ++y) {
            for (int x = 0; x < size; ++x) {
                // pixel (x, y) maps to (size-1-y, x) under the same rotation
                const int xr = size - 1 - y;
                const int yr = x;
                if (base.conf_up[base.index(x, y)] == 0.0 ||
                    rotated.conf_up[rotated.index(xr, yr)] == 0.0)
                    continue;
                const Eigen::Vector2d expected(-base.up_y[base.index(x, y)],
                                               base.up_x[base.index(x, y)]);
                const Eigen::Vector2d got = rotated.up(xr, yr);
                CHECK((got - expected).cwiseAbs().maxCoeff() < 1e-9);
            }
        }
        base = rotated;
    }
}

TEST_CASE("out-of-model pixels are flagged in the render") {
    // strong negative distortion with a wide fov: corners leave the model
    const double vfov = 100.0 * M_PI / 180.0;
    const CameraParams wide = make_radial1(focal_from_vfov(vfov, 64), -0.28 * vfov, 64, 64);
    const PerspectiveField wide_field = render_field(wide, GravityDir(Eigen::Vector3d(0, 1, 0)));
    CHECK(wide_field.conf_up[wide_field.index(0, 0)] == 0.0);
    CHECK(wide_field.conf_lat[wide_field.index(0, 0)] == 0.0);
    CHECK(wide_field.up_x[wide_field.index(0, 0)] == 0.0);
    CHECK(wide_field.up_y[wide_field.index(0, 0)] == -1.0);
    CHECK(wide_field.conf_up[wide_field.index(32, 32)] == 1.0);
    wide_field.validate();
}

TEST_SUITE_END();
