#include "persfit/residuals.hpp"

#include "persfit/errors.hpp"

#include <cmath>

namespace persfit {

namespace {

// Local column order within one image: [dg0, dg1, dlogf, dk1, dk2].
constexpr int kMaxLocalCols = 5;

struct LocalJacobian {
    // Rows: up_x, up_y, sin(latitude). Columns as above.
    Eigen::Matrix<double, 3, kMaxLocalCols> J = Eigen::Matrix<double, 3, kMaxLocalCols>::Zero();
};

// Analytic derivatives of the up-vector and sin(latitude) with respect to
// the local parameters, evaluated from the shared pixel evaluation. The
// distortion chain runs through the undistorted coordinates of the fixed
// pixel, so log f and k also move (u, v).
LocalJacobian pixel_jacobian(const CameraParams &camera, const GravityDir &g,
                             const Eigen::Matrix<double, 3, 2> &basis, const PixelEval &e) {
    LocalJacobian out;
    const Eigen::Vector2d &uv = e.uv;
    const double u = uv[0];
    const double v = uv[1];
    const double gz = g.z();
    const double rho_prime = e.d + 2.0 * e.dprime * e.r2;

    // d(u,v)/d(log f) and d(u,v)/dk: zero on the saturation plateau.
    Eigen::Vector2d duv_dlogf = Eigen::Vector2d::Zero();
    Eigen::Vector2d duv_dk1 = Eigen::Vector2d::Zero();
    Eigen::Vector2d duv_dk2 = Eigen::Vector2d::Zero();
    if (!e.saturated) {
        duv_dlogf = -(e.d / rho_prime) * uv;
        if (camera.model != CameraModel::Pinhole) {
            duv_dk1 = -(e.r2 / rho_prime) * uv;
            duv_dk2 = -(e.r2 * e.r2 / rho_prime) * uv;
        }
    }

    // Up-vector rows.
    if (!e.degenerate) {
        const Eigen::Matrix2d P_w =
            (Eigen::Matrix2d::Identity() - e.up * e.up.transpose()) / e.wnorm;
        Eigen::Matrix2d J_D = e.d * Eigen::Matrix2d::Identity();
        J_D.noalias() += 2.0 * e.dprime * uv * uv.transpose();
        Eigen::Matrix<double, 2, 3> G;
        G << -1.0, 0.0, u, 0.0, -1.0, v;

        const Eigen::Matrix<double, 2, 2> dup_dg = P_w * J_D * G * basis;
        out.J.block<2, 2>(0, 0) = dup_dg;

        // dw/d(u,v) holding g and k fixed.
        Eigen::Matrix2d M_uv =
            (e.d * gz + 2.0 * e.dprime * e.s) * Eigen::Matrix2d::Identity();
        M_uv.noalias() += 2.0 * e.dprime * (e.ubar * uv.transpose() + uv * e.ubar.transpose());
        M_uv.noalias() +=
            (8.0 * camera.k[1] * e.s + 2.0 * e.dprime * gz) * uv * uv.transpose();

        out.J.block<2, 1>(0, 2) = P_w * (M_uv * duv_dlogf);
        if (camera.model != CameraModel::Pinhole) {
            const Eigen::Vector2d direct_k1 = e.r2 * e.ubar + 2.0 * e.s * uv;
            const Eigen::Vector2d direct_k2 =
                e.r2 * e.r2 * e.ubar + 4.0 * e.r2 * e.s * uv;
            out.J.block<2, 1>(0, 3) = P_w * (direct_k1 + M_uv * duv_dk1);
            out.J.block<2, 1>(0, 4) = P_w * (direct_k2 + M_uv * duv_dk2);
        }
    }

    // sin(latitude) row.
    const Eigen::Vector3d n(u, v, 1.0);
    const Eigen::Vector3d n_hat = n / e.nnorm;
    out.J.block<1, 2>(2, 0) = n_hat.transpose() * basis;
    // q = P(n) g: derivative of n^T g / |n| with respect to n.
    const Eigen::Vector3d q = (g.vec() - n_hat * e.sin_lat) / e.nnorm;
    const Eigen::Vector2d q_uv(q[0], q[1]);
    out.J(2, 2) = q_uv.dot(duv_dlogf);
    if (camera.model != CameraModel::Pinhole) {
        out.J(2, 3) = q_uv.dot(duv_dk1);
        out.J(2, 4) = q_uv.dot(duv_dk2);
    }
    return out;
}

// Central finite differences in the update space (retraction for gravity,
// multiplicative for the focal, additive for k). Cross-check path.
LocalJacobian pixel_jacobian_fd(const CameraParams &camera, const GravityDir &g,
                                const Eigen::Matrix<double, 3, 2> &basis,
                                const Eigen::Vector2d &p) {
    constexpr double h = 1e-6;
    LocalJacobian out;
    const int dim = distortion_dim(camera.model);
    for (int col = 0; col < 3 + dim; ++col) {
        CameraParams cp = camera;
        CameraParams cm = camera;
        GravityDir gp = g;
        GravityDir gm = g;
        if (col < 2) {
            Eigen::Vector2d delta = Eigen::Vector2d::Zero();
            delta[col] = h;
            gp = GravityDir(std::cos(h) * g.vec() + (std::sin(h) / h) * (basis * delta));
            gm = GravityDir(std::cos(h) * g.vec() - (std::sin(h) / h) * (basis * delta));
        } else if (col == 2) {
            cp.f = camera.f * std::exp(h);
            cm.f = camera.f * std::exp(-h);
        } else {
            cp.k[col - 3] += h;
            cm.k[col - 3] -= h;
        }
        const PixelEval ep = evaluate_pixel(cp, gp, p);
        const PixelEval em = evaluate_pixel(cm, gm, p);
        out.J(0, col) = (ep.up[0] - em.up[0]) / (2.0 * h);
        out.J(1, col) = (ep.up[1] - em.up[1]) / (2.0 * h);
        out.J(2, col) = (std::sin(ep.lat) - std::sin(em.lat)) / (2.0 * h);
    }
    return out;
}

} // namespace

ProblemState apply_step(const ProblemState &state, const ParameterLayout &layout,
                        const Eigen::VectorXd &delta) {
    if (delta.size() != layout.num_params())
        throw DimensionMismatchError("apply_step: delta size does not match layout");
    ProblemState out = state;
    if (layout.gravity_free)
        for (int i = 0; i < layout.num_images; ++i)
            out.gravity[i] =
                retract(state.gravity[i], delta.segment<2>(layout.gravity_col(i)));
    if (layout.focal_free)
        out.camera.f = state.camera.f * std::exp(delta[layout.focal_col()]);
    for (int j = 0; j < layout.k_free; ++j)
        out.camera.k[j] = state.camera.k[j] + delta[layout.k_col(j)];
    return out;
}

namespace {

// Weight of the out-of-model barrier relative to the field residuals.
constexpr double kBarrierGain = 10.0;

// Pixels outside the invertible distortion range sit on a value plateau
// with no focal/distortion gradient; this row restores a pull back toward
// the invertible range: r = (rd / rd_max - 1), where rd is the pixel's
// distorted radius and rd_max the fold of the radial profile.
struct SaturationBarrier {
    bool active = false;
    double rd_max = 0.0;
    double dmax_dk1 = 0.0; // envelope: d rd_max / dk1 = r*^3
    double dmax_dk2 = 0.0; // r*^5
};

SaturationBarrier barrier_for(const CameraParams &camera) {
    SaturationBarrier b;
    const auto rstar = fold_radius(camera);
    if (!rstar)
        return b;
    b.active = true;
    b.rd_max = *rstar * distortion_scale(camera, *rstar * *rstar);
    const double r3 = *rstar * *rstar * *rstar;
    b.dmax_dk1 = r3;
    b.dmax_dk2 = r3 * *rstar * *rstar;
    return b;
}

} // namespace

ResidualBlock assemble(const ProblemState &state,
                       const std::vector<const PerspectiveField *> &fields,
                       const ParameterLayout &layout, int stride, bool with_jacobian,
                       JacobianMode mode) {
    if (static_cast<int>(fields.size()) != layout.num_images ||
        static_cast<int>(state.gravity.size()) != layout.num_images)
        throw DimensionMismatchError("assemble: image count does not match layout");
    if (stride < 1)
        throw DomainError("assemble: stride must be >= 1");
    const CameraParams &camera = state.camera;
    for (const PerspectiveField *f : fields)
        if (f->width != camera.width || f->height != camera.height)
            throw DimensionMismatchError("assemble: field size does not match camera size");
    if (layout.k_free > distortion_dim(camera.model))
        throw DimensionMismatchError("assemble: free distortion exceeds the model's");

    const int P = layout.num_params();
    long capacity = 0;
    for (int i = 0; i < layout.num_images; ++i) {
        const long nx = (camera.width + stride - 1) / stride;
        const long ny = (camera.height + stride - 1) / stride;
        capacity += 4 * nx * ny; // 3 field rows + barrier row worst case
    }
    ResidualBlock block;
    block.r.resize(capacity);
    block.w.resize(capacity);
    if (with_jacobian)
        block.J.setZero(capacity, P);

    const SaturationBarrier barrier = barrier_for(camera);

    long row = 0;
    for (int img = 0; img < layout.num_images; ++img) {
        const PerspectiveField &field = *fields[img];
        const GravityDir &g = state.gravity[img];
        const Eigen::Matrix<double, 3, 2> basis = tangent_basis(g);
        const int kdim = distortion_dim(camera.model);
        for (int y = 0; y < camera.height; y += stride) {
            for (int x = 0; x < camera.width; x += stride) {
                const std::size_t idx = field.index(x, y);
                const double wu = field.conf_up[idx];
                const double wl = field.conf_lat[idx];
                if (wu <= 0.0 && wl <= 0.0)
                    continue;
                const Eigen::Vector2d p(x + 0.5, y + 0.5);
                const PixelEval e = evaluate_pixel(camera, g, p);
                block.total_weight += std::max(wu, wl);
                if (e.saturated)
                    block.saturated_weight += std::max(wu, wl);

                LocalJacobian lj;
                if (with_jacobian) {
                    lj = mode == JacobianMode::Analytic
                             ? pixel_jacobian(camera, g, basis, e)
                             : pixel_jacobian_fd(camera, g, basis, p);
                }
                auto emit = [&](int local_row, double value, double weight) {
                    block.r[row] = value;
                    block.w[row] = weight;
                    if (with_jacobian) {
                        if (layout.gravity_free)
                            block.J.block<1, 2>(row, layout.gravity_col(img)) =
                                lj.J.block<1, 2>(local_row, 0);
                        if (layout.focal_free)
                            block.J(row, layout.focal_col()) = lj.J(local_row, 2);
                        for (int j = 0; j < layout.k_free && j < kdim; ++j)
                            block.J(row, layout.k_col(j)) = lj.J(local_row, 3 + j);
                    }
                    ++row;
                };
                if (wu > 0.0 && !e.degenerate) {
                    emit(0, e.up[0] - field.up_x[idx], wu);
                    emit(1, e.up[1] - field.up_y[idx], wu);
                }
                // sin(lat) instead of sin_lat so a rendered field gives a
                // bitwise-zero residual (lat round-trips through asin).
                if (wl > 0.0)
                    emit(2, std::sin(e.lat) - std::sin(field.latitude[idx]), wl);

                if (e.saturated && barrier.active) {
                    const double rd = normalize_point(camera, p).norm();
                    const double ratio = rd / barrier.rd_max;
                    block.r[row] = kBarrierGain * (ratio - 1.0);
                    block.w[row] = std::max(wu, wl);
                    if (with_jacobian) {
                        if (layout.focal_free)
                            block.J(row, layout.focal_col()) = -kBarrierGain * ratio;
                        if (layout.k_free >= 1)
                            block.J(row, layout.k_col(0)) =
                                -kBarrierGain * ratio * barrier.dmax_dk1 / barrier.rd_max;
                        if (layout.k_free >= 2)
                            block.J(row, layout.k_col(1)) =
                                -kBarrierGain * ratio * barrier.dmax_dk2 / barrier.rd_max;
                    }
                    ++row;
                }
            }
        }
    }
    block.r.conservativeResize(row);
    block.w.conservativeResize(row);
    if (with_jacobian)
        block.J.conservativeResize(row, P);
    return block;
}

ResidualBlock residuals(const CameraParams &camera, const GravityDir &gravity,
                        const PerspectiveField &field, int stride) {
    ProblemState state{camera, {gravity}};
    ParameterLayout layout;
    layout.k_free = distortion_dim(camera.model);
    return assemble(state, {&field}, layout, stride, false);
}

ResidualBlock jacobian(const CameraParams &camera, const GravityDir &gravity,
                       const PerspectiveField &field, const ParameterLayout &layout,
                       int stride, JacobianMode mode) {
    ProblemState state{camera, {gravity}};
    return assemble(state, {&field}, layout, stride, true, mode);
}

} // namespace persfit
