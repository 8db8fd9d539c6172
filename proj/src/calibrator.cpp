#include "persfit/calibrator.hpp"

#include "persfit/errors.hpp"

#include <Eigen/Geometry>
#include "persfit/rng.hpp"

#include <algorithm>
#include <cmath>

namespace persfit {

void CalibrationOptions::validate() const {
    lm.validate();
    if (stride < 1)
        throw DomainError("calibration: stride must be >= 1");
    if (fixed_focal && focal_prior)
        throw DomainError("calibration: focal cannot be both fixed and prior-regularized");
    if (fixed_distortion && (k1_prior || k2_prior))
        throw DomainError("calibration: distortion cannot be both fixed and prior-regularized");
    if (fixed_focal && !(*fixed_focal > 0.0))
        throw DomainError("calibration: fixed focal must be positive");
    if (focal_prior && !(focal_prior->std > 0.0))
        throw DomainError("calibration: focal prior std must be positive");
    if (k1_prior && (!(k1_prior->std > 0.0) || distortion_dim(model) < 1))
        throw DomainError("calibration: invalid k1 prior");
    if (k2_prior && (!(k2_prior->std > 0.0) || distortion_dim(model) < 2))
        throw DomainError("calibration: invalid k2 prior");
    if (ransac.iterations < 1 || ransac.focal_grid < 2)
        throw DomainError("calibration: invalid RANSAC configuration");
}

std::pair<GravityDir, double> init_trivial(int width, int height) {
    if (width < 1 || height < 1)
        throw DomainError("init_trivial: image size must be at least 1x1");
    return {GravityDir(Eigen::Vector3d(0.0, 1.0, 0.0)),
            0.7 * static_cast<double>(std::max(width, height))};
}

std::pair<GravityDir, double> init_heuristic(const PerspectiveField &field) {
    if (field.height < 2 || field.width < 1)
        throw DegenerateHeuristicError("heuristic: field too small");
    const Eigen::Vector2d center(0.5 * field.width, 0.5 * field.height);
    bool up_ok = false;
    const Eigen::Vector2d up_c = sample_up(field, center, &up_ok);
    if (!up_ok)
        throw DegenerateHeuristicError("heuristic: up-vector vanishes at the center");
    const double lat_c = sample_latitude(field, center);
    const double gz = std::sin(lat_c);
    const double alpha = std::sqrt(std::max(0.0, 1.0 - gz * gz));
    const GravityDir g(Eigen::Vector3d(-alpha * up_c[0], -alpha * up_c[1], gz));

    // Latitude span of the central column; the sampled rows are the first
    // and last pixel centers, height - 1 pixels apart.
    const double lat_top = sample_latitude(field, {center[0], 0.5});
    const double lat_bottom =
        sample_latitude(field, {center[0], static_cast<double>(field.height) - 0.5});
    const double span = lat_bottom - lat_top;
    if (!(span > 0.0) || !(span < M_PI))
        throw DegenerateHeuristicError("heuristic: latitude span is not a valid field of view");
    const double focal = focal_from_vfov(span, field.height - 1);
    return {g, focal};
}

namespace {

struct MinimalSample {
    Eigen::Vector2d p1, p2, p3; // pixel centers
    Eigen::Vector2d up1, up2;
    double sin_lat3 = 0.0;
};

// Null direction of the two up-vector collinearity constraints at a given
// focal. Returns false when the constraints are degenerate.
bool gravity_for_focal(const MinimalSample &sample, const Eigen::Vector2d &c, double f,
                       Eigen::Vector3d *g) {
    const Eigen::Vector2d q1 = (sample.p1 - c) / f;
    const Eigen::Vector2d q2 = (sample.p2 - c) / f;
    const Eigen::Vector3d row1(sample.up1[1], -sample.up1[0],
                               sample.up1[0] * q1[1] - sample.up1[1] * q1[0]);
    const Eigen::Vector3d row2(sample.up2[1], -sample.up2[0],
                               sample.up2[0] * q2[1] - sample.up2[1] * q2[0]);
    Eigen::Vector3d dir = row1.cross(row2);
    const double n = dir.norm();
    if (n < 1e-12)
        return false;
    dir /= n;
    // Orient so the predicted up direction matches the observation.
    const Eigen::Vector2d ubar(q1[0] * dir[2] - dir[0], q1[1] * dir[2] - dir[1]);
    const double align = ubar.dot(sample.up1);
    if (std::abs(align) < 1e-12)
        return false;
    *g = align > 0.0 ? dir : Eigen::Vector3d(-dir);
    return true;
}

double latitude_mismatch(const MinimalSample &sample, const Eigen::Vector2d &c, double f) {
    Eigen::Vector3d g;
    if (!gravity_for_focal(sample, c, f, &g))
        return std::numeric_limits<double>::quiet_NaN();
    const Eigen::Vector2d q3 = (sample.p3 - c) / f;
    const double nn = std::sqrt(q3.squaredNorm() + 1.0);
    return (q3[0] * g[0] + q3[1] * g[1] + g[2]) / nn - sample.sin_lat3;
}

std::vector<int> subsample_indices(const std::vector<int> &all, int cap) {
    if (static_cast<int>(all.size()) <= cap)
        return all;
    std::vector<int> out;
    out.reserve(cap);
    const double step = static_cast<double>(all.size()) / cap;
    for (int i = 0; i < cap; ++i)
        out.push_back(all[static_cast<std::size_t>(i * step)]);
    return out;
}

struct Hypothesis {
    Eigen::Vector3d g;
    double f = 0.0;
};

double score_hypothesis(const PerspectiveField &field, const Eigen::Vector2d &c,
                        const Hypothesis &h, const RansacConfig &cfg,
                        const std::vector<int> &up_idx, const std::vector<int> &lat_idx) {
    double score = 0.0;
    const double cos_thresh = std::cos(cfg.up_threshold_rad);
    for (int idx : up_idx) {
        const int x = idx % field.width;
        const int y = idx / field.width;
        const Eigen::Vector2d q = (Eigen::Vector2d(x + 0.5, y + 0.5) - c) / h.f;
        Eigen::Vector2d ubar(q[0] * h.g[2] - h.g[0], q[1] * h.g[2] - h.g[1]);
        const double n = ubar.norm();
        if (n < 1e-12)
            continue;
        const double cosang = (ubar[0] * field.up_x[idx] + ubar[1] * field.up_y[idx]) / n;
        if (cosang >= cos_thresh)
            score += field.conf_up[idx];
    }
    for (int idx : lat_idx) {
        const int x = idx % field.width;
        const int y = idx / field.width;
        const Eigen::Vector2d q = (Eigen::Vector2d(x + 0.5, y + 0.5) - c) / h.f;
        const double nn = std::sqrt(q.squaredNorm() + 1.0);
        const double sphi = (q[0] * h.g[0] + q[1] * h.g[1] + h.g[2]) / nn;
        const double lat = std::asin(std::clamp(sphi, -1.0, 1.0));
        if (std::abs(lat - field.latitude[idx]) <= cfg.lat_threshold_rad)
            score += field.conf_lat[idx];
    }
    return score;
}

} // namespace

SolverInit init_solver(const PerspectiveField &field, const RansacConfig &cfg) {
    std::vector<int> up_all, lat_all;
    const std::size_t n = field.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (field.conf_up[i] > 0.0)
            up_all.push_back(static_cast<int>(i));
        if (field.conf_lat[i] > 0.0)
            lat_all.push_back(static_cast<int>(i));
    }
    if (up_all.size() < 2 || lat_all.empty())
        throw InsufficientSamplesError("solver: need two up-vectors and one latitude");

    const Eigen::Vector2d c(0.5 * field.width, 0.5 * field.height);
    const std::vector<int> up_scored = subsample_indices(up_all, cfg.max_scored_pixels);
    const std::vector<int> lat_scored = subsample_indices(lat_all, cfg.max_scored_pixels);

    Rng rng(cfg.seed);
    bool found = false;
    Hypothesis best;
    double best_score = -1.0;

    auto pixel_center = [&](int idx) {
        return Eigen::Vector2d(idx % field.width + 0.5, idx / field.width + 0.5);
    };

    for (int it = 0; it < cfg.iterations; ++it) {
        const int i1 = up_all[rng.index(static_cast<std::int64_t>(up_all.size()))];
        int i2 = up_all[rng.index(static_cast<std::int64_t>(up_all.size()))];
        if (i2 == i1)
            continue;
        const int i3 = lat_all[rng.index(static_cast<std::int64_t>(lat_all.size()))];

        MinimalSample sample;
        sample.p1 = pixel_center(i1);
        sample.p2 = pixel_center(i2);
        sample.p3 = pixel_center(i3);
        sample.up1 = Eigen::Vector2d(field.up_x[i1], field.up_y[i1]);
        sample.up2 = Eigen::Vector2d(field.up_x[i2], field.up_y[i2]);
        sample.sin_lat3 = std::sin(field.latitude[i3]);

        // Scan the focal range through the vfov parametrization and bisect
        // every sign change of the latitude constraint.
        const int grid = cfg.focal_grid;
        double prev_v = 0.0, prev_h = std::numeric_limits<double>::quiet_NaN();
        for (int s = 0; s <= grid; ++s) {
            const double v = cfg.min_vfov_rad +
                             (cfg.max_vfov_rad - cfg.min_vfov_rad) * s / static_cast<double>(grid);
            const double f = focal_from_vfov(v, field.height);
            const double h = latitude_mismatch(sample, c, f);
            if (std::isfinite(prev_h) && std::isfinite(h) && prev_h * h <= 0.0) {
                double lo = prev_v, hi = v, hlo = prev_h;
                for (int b = 0; b < 60; ++b) {
                    const double mid = 0.5 * (lo + hi);
                    const double hm =
                        latitude_mismatch(sample, c, focal_from_vfov(mid, field.height));
                    if (!std::isfinite(hm))
                        break;
                    if (hlo * hm <= 0.0)
                        hi = mid;
                    else {
                        lo = mid;
                        hlo = hm;
                    }
                }
                const double v_root = 0.5 * (lo + hi);
                const double f_root = focal_from_vfov(v_root, field.height);
                if (std::abs(latitude_mismatch(sample, c, f_root)) < 1e-6) {
                    Hypothesis h_cand;
                    if (gravity_for_focal(sample, c, f_root, &h_cand.g)) {
                        h_cand.f = f_root;
                        const double score =
                            score_hypothesis(field, c, h_cand, cfg, up_scored, lat_scored);
                        if (score > best_score) {
                            best_score = score;
                            best = h_cand;
                            found = true;
                        }
                    }
                }
            }
            prev_v = v;
            prev_h = h;
        }
    }
    if (!found)
        throw NoHypothesisError("solver: no RANSAC sample produced a hypothesis");

    SolverInit out;
    out.gravity = GravityDir(best.g);
    out.focal = best.f;
    out.score = best_score;
    out.up_inliers.assign(n, 0);
    out.lat_inliers.assign(n, 0);
    const double cos_thresh = std::cos(cfg.up_threshold_rad);
    for (std::size_t i = 0; i < n; ++i) {
        const int x = static_cast<int>(i) % field.width;
        const int y = static_cast<int>(i) / field.width;
        const Eigen::Vector2d q = (Eigen::Vector2d(x + 0.5, y + 0.5) - c) / best.f;
        if (field.conf_up[i] > 0.0) {
            Eigen::Vector2d ubar(q[0] * best.g[2] - best.g[0], q[1] * best.g[2] - best.g[1]);
            const double nn = ubar.norm();
            if (nn >= 1e-12 &&
                (ubar[0] * field.up_x[i] + ubar[1] * field.up_y[i]) / nn >= cos_thresh)
                out.up_inliers[i] = 1;
        }
        if (field.conf_lat[i] > 0.0) {
            const double nn = std::sqrt(q.squaredNorm() + 1.0);
            const double sphi = (q[0] * best.g[0] + q[1] * best.g[1] + best.g[2]) / nn;
            const double lat = std::asin(std::clamp(sphi, -1.0, 1.0));
            if (std::abs(lat - field.latitude[i]) <= cfg.lat_threshold_rad)
                out.lat_inliers[i] = 1;
        }
    }
    return out;
}

namespace {

struct PriorTerm {
    enum class Kind { Focal, K1, K2 } kind;
    int col = -1;
    double target = 0.0;
    double inv_std = 1.0;
};

std::vector<PriorTerm> build_priors(const CalibrationOptions &options,
                                    const ParameterLayout &layout) {
    std::vector<PriorTerm> priors;
    if (options.focal_prior && layout.focal_free)
        priors.push_back({PriorTerm::Kind::Focal, layout.focal_col(), options.focal_prior->value,
                          1.0 / options.focal_prior->std});
    if (options.k1_prior && layout.k_free >= 1)
        priors.push_back({PriorTerm::Kind::K1, layout.k_col(0), options.k1_prior->value,
                          1.0 / options.k1_prior->std});
    if (options.k2_prior && layout.k_free >= 2)
        priors.push_back({PriorTerm::Kind::K2, layout.k_col(1), options.k2_prior->value,
                          1.0 / options.k2_prior->std});
    return priors;
}

double prior_residual(const PriorTerm &prior, const ProblemState &state) {
    switch (prior.kind) {
    case PriorTerm::Kind::Focal:
        return (state.camera.f - prior.target) * prior.inv_std;
    case PriorTerm::Kind::K1:
        return (state.camera.k[0] - prior.target) * prior.inv_std;
    case PriorTerm::Kind::K2:
        return (state.camera.k[1] - prior.target) * prior.inv_std;
    }
    return 0.0;
}

double prior_jacobian(const PriorTerm &prior, const ProblemState &state) {
    // d theta / d delta: f for log-focal, identity for k.
    return prior.kind == PriorTerm::Kind::Focal ? state.camera.f * prior.inv_std
                                                : prior.inv_std;
}

LMStatus worse_status(LMStatus a, LMStatus b) {
    auto rank = [](LMStatus s) {
        switch (s) {
        case LMStatus::StepTolReached:
            return 0;
        case LMStatus::MaxIters:
            return 1;
        case LMStatus::StalledDamping:
            return 2;
        }
        return 2;
    };
    return rank(a) >= rank(b) ? a : b;
}

CalibrationResult calibrate_shared(const std::vector<const PerspectiveField *> &fields,
                                   const CalibrationOptions &options) {
    const int num_images = static_cast<int>(fields.size());
    const int width = fields[0]->width;
    const int height = fields[0]->height;
    for (const PerspectiveField *f : fields)
        if (f->width != width || f->height != height)
            throw DimensionMismatchError("calibrate: fields must share one image size");

    // Initialization, falling back to the trivial constants when the
    // field-driven strategies degenerate.
    const auto trivial = init_trivial(width, height);
    std::vector<GravityDir> g_init(num_images, trivial.first);
    double f_init = trivial.second;
    InitStrategy used = InitStrategy::Trivial;
    if (options.init == InitStrategy::Heuristic) {
        for (int i = 0; i < num_images; ++i) {
            try {
                const auto est = init_heuristic(*fields[i]);
                g_init[i] = est.first;
                if (i == 0)
                    f_init = est.second;
                used = InitStrategy::Heuristic;
            } catch (const DegenerateHeuristicError &) {
            }
        }
    } else if (options.init == InitStrategy::Solver) {
        for (int i = 0; i < num_images; ++i) {
            try {
                const SolverInit est = init_solver(*fields[i], options.ransac);
                g_init[i] = est.gravity;
                if (i == 0)
                    f_init = est.focal;
                used = InitStrategy::Solver;
            } catch (const Error &) {
            }
        }
    }

    ProblemState state;
    state.camera.model = options.model;
    state.camera.f = options.fixed_focal ? *options.fixed_focal : f_init;
    state.camera.c = Eigen::Vector2d(0.5 * width, 0.5 * height);
    state.camera.k = options.fixed_distortion ? *options.fixed_distortion
                                              : Eigen::Vector2d::Zero();
    state.camera.width = width;
    state.camera.height = height;
    if (options.fixed_gravity)
        std::fill(g_init.begin(), g_init.end(), *options.fixed_gravity);
    state.gravity = g_init;

    ParameterLayout layout;
    layout.num_images = num_images;
    layout.gravity_free = !options.fixed_gravity.has_value();
    layout.focal_free = !options.fixed_focal.has_value();
    layout.k_free = options.fixed_distortion ? 0 : distortion_dim(options.model);

    const std::vector<PriorTerm> priors = build_priors(options, layout);

    CalibrationResult result;
    result.init_used = used;

    LMRunResult run;
    if (layout.num_params() > 0) {
        LMProblemFns fns;
        fns.num_params = layout.num_params();
        double current_saturated = 0.0;
        fns.linearize = [&](Eigen::VectorXd &r, Eigen::VectorXd &w, Eigen::MatrixXd &J) {
            ResidualBlock block = assemble(state, fields, layout, options.stride, true);
            current_saturated = block.saturated_weight;
            const long base = block.rows();
            const long extra = static_cast<long>(priors.size());
            r.resize(base + extra);
            w.resize(base + extra);
            J.setZero(base + extra, layout.num_params());
            r.head(base) = block.r;
            w.head(base) = block.w;
            J.topRows(base) = block.J;
            for (long i = 0; i < extra; ++i) {
                r[base + i] = prior_residual(priors[i], state);
                w[base + i] = 1.0;
                J(base + i, priors[i].col) = prior_jacobian(priors[i], state);
            }
        };
        fns.trial_cost = [&](const Eigen::VectorXd &delta) {
            const ProblemState trial = apply_step(state, layout, delta);
            const ResidualBlock block = assemble(trial, fields, layout, options.stride, false);
            // Keep the step inside the region where the distortion model
            // stays invertible for (almost) all confident pixels; allow a
            // small monotone creep so valid boundary optima stay reachable.
            if (block.saturated_weight > current_saturated + 0.005 * block.total_weight)
                return std::numeric_limits<double>::infinity();
            double cost = block.cost();
            for (const PriorTerm &p : priors) {
                const double r = prior_residual(p, trial);
                cost += r * r;
            }
            return cost;
        };
        fns.apply = [&](const Eigen::VectorXd &delta) { state = apply_step(state, layout, delta); };
        run = lm_optimize(fns, options.lm);
    } else {
        run.trace.status = LMStatus::StepTolReached;
        run.trace.initial_cost = run.trace.final_cost =
            assemble(state, fields, layout, options.stride, false).cost();
        run.covariance.resize(0, 0);
    }

    result.status = run.trace.status;
    result.traces.push_back(std::move(run.trace));

    const Eigen::MatrixXd &cov = run.covariance;
    for (int i = 0; i < num_images; ++i) {
        ImageEstimate est;
        est.gravity = state.gravity[i];
        if (layout.gravity_free && cov.size() > 0) {
            const int col = layout.gravity_col(i);
            const Eigen::Matrix2d tangent_cov = cov.block<2, 2>(col, col);
            est.sigma_gravity_rad = std::sqrt(std::max(0.0, tangent_cov.trace()));
            const Eigen::Matrix<double, 3, 2> basis = tangent_basis(est.gravity);
            const Eigen::Matrix3d cov3 = basis * tangent_cov * basis.transpose();
            const Eigen::Vector3d g = est.gravity.vec();
            const double horiz2 = g[0] * g[0] + g[1] * g[1];
            if (horiz2 > 1e-12) {
                const Eigen::Vector3d droll(-g[1] / horiz2, g[0] / horiz2, 0.0);
                est.sigma_roll_rad = std::sqrt(std::max(0.0, droll.dot(cov3 * droll)));
            }
            const double cos_pitch2 = std::max(1e-12, 1.0 - g[2] * g[2]);
            const Eigen::Vector3d dpitch(0.0, 0.0, 1.0 / std::sqrt(cos_pitch2));
            est.sigma_pitch_rad = std::sqrt(std::max(0.0, dpitch.dot(cov3 * dpitch)));
        }
        result.images.push_back(est);
    }

    CameraEstimate cam;
    cam.params = state.camera;
    if (layout.focal_free && cov.size() > 0) {
        const double var_logf = std::max(0.0, cov(layout.focal_col(), layout.focal_col()));
        const double sigma_logf = std::sqrt(var_logf);
        cam.sigma_f_px = state.camera.f * sigma_logf;
        const double f = state.camera.f;
        const double dvfov_dlogf = -height * f / (f * f + 0.25 * height * height);
        cam.sigma_vfov_rad = std::abs(dvfov_dlogf) * sigma_logf;
    }
    if (layout.k_free >= 1 && cov.size() > 0)
        cam.sigma_k1 = std::sqrt(std::max(0.0, cov(layout.k_col(0), layout.k_col(0))));
    if (layout.k_free >= 2 && cov.size() > 0)
        cam.sigma_k2 = std::sqrt(std::max(0.0, cov(layout.k_col(1), layout.k_col(1))));
    result.cameras.push_back(cam);
    return result;
}

} // namespace

CalibrationResult calibrate(const std::vector<const PerspectiveField *> &fields,
                            const CalibrationOptions &options) {
    if (fields.empty())
        throw EmptyProblemError("calibrate: no fields");
    for (const PerspectiveField *f : fields)
        if (f == nullptr || f->size() == 0)
            throw EmptyProblemError("calibrate: empty field");
    options.validate();
    if (options.sharing == Sharing::SharedGravityRig)
        throw NotImplementedError("calibrate: shared-gravity rigs are not implemented");

    if (options.sharing == Sharing::SharedIntrinsics || fields.size() == 1)
        return calibrate_shared(fields, options);

    // Independent: one problem per image.
    CalibrationResult merged;
    merged.status = LMStatus::StepTolReached;
    for (const PerspectiveField *field : fields) {
        CalibrationResult single = calibrate_shared({field}, options);
        merged.images.push_back(single.images[0]);
        merged.cameras.push_back(single.cameras[0]);
        merged.traces.push_back(std::move(single.traces[0]));
        merged.status = worse_status(merged.status, single.status);
        merged.init_used = single.init_used;
    }
    return merged;
}

CalibrationResult calibrate(const PerspectiveField &field, const CalibrationOptions &options) {
    return calibrate({&field}, options);
}

} // namespace persfit
