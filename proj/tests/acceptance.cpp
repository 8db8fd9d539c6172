// Acceptance suite: runs every geometric-core criterion end to end and
// prints one PASS/FAIL line each. Exit code is the number of failures.

#include "persfit/calibrator.hpp"
#include "persfit/errors.hpp"
#include "persfit/field.hpp"
#include "persfit/jacobian_check.hpp"
#include "persfit/metrics.hpp"
#include "persfit/parallel.hpp"
#include "persfit/residuals.hpp"
#include "persfit/rng.hpp"
#include "persfit/synth.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

using namespace persfit;

namespace {

constexpr double kDeg = M_PI / 180.0;
constexpr double kInf = std::numeric_limits<double>::infinity();

int g_failures = 0;

void report(int index, bool pass, const std::string &what, const std::string &detail) {
    std::printf("%s  [C%d] %s (%s)\n", pass ? "PASS" : "FAIL", index, what.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!pass)
        ++g_failures;
}

struct SampledConfig {
    CameraParams camera;
    GravityDir gravity;
};

// roll, pitch ~ U[-45, 45] deg, vfov ~ U[20, 105] deg, khat in [-0.3, 0.3].
SampledConfig sample_config(Rng &rng, CameraModel model, int size) {
    const double roll = rng.uniform(-45.0, 45.0) * kDeg;
    const double pitch = rng.uniform(-45.0, 45.0) * kDeg;
    const double vfov_rad = rng.uniform(20.0, 105.0) * kDeg;
    const double f = focal_from_vfov(vfov_rad, size);
    SampledConfig cfg;
    switch (model) {
    case CameraModel::Pinhole:
        cfg.camera = make_pinhole(f, size, size);
        break;
    case CameraModel::Radial1:
        cfg.camera = make_radial1(f, rng.truncated_normal(0.07, -0.3, 0.3) * vfov_rad, size, size);
        break;
    case CameraModel::Radial2:
        cfg.camera = make_radial2(f, rng.truncated_normal(0.07, -0.3, 0.3) * vfov_rad,
                                  rng.truncated_normal(0.0175, -0.075, 0.075) * vfov_rad, size,
                                  size);
        break;
    }
    cfg.gravity = gravity_from_roll_pitch(roll, pitch);
    return cfg;
}

// Independent projection for the up-vector limit oracle.
Eigen::Vector2d project_point(const CameraParams &cam, const Eigen::Vector3d &P) {
    const double u = P[0] / P[2];
    const double v = P[1] / P[2];
    const double r2 = u * u + v * v;
    const double d = 1.0 + cam.k[0] * r2 + cam.k[1] * r2 * r2;
    return {cam.f * d * u + cam.c[0], cam.f * d * v + cam.c[1]};
}

double sign_test_p_value(int wins, int trials) {
    // P(X >= wins) for X ~ Binomial(trials, 1/2).
    const double log_half = std::log(0.5);
    double p = 0.0;
    for (int k = wins; k <= trials; ++k) {
        const double log_c =
            std::lgamma(trials + 1.0) - std::lgamma(k + 1.0) - std::lgamma(trials - k + 1.0);
        p += std::exp(log_c + trials * log_half);
    }
    return std::min(p, 1.0);
}

double mean_of(const std::vector<double> &values) {
    double s = 0.0;
    for (double v : values)
        s += v;
    return s / values.size();
}

double std_of(const std::vector<double> &values) {
    const double mean = mean_of(values);
    double var = 0.0;
    for (double v : values)
        var += (v - mean) * (v - mean);
    return std::sqrt(var / (values.size() - 1));
}

// ---------------------------------------------------------------------------

void criterion1_up_vector_limit() {
    const int scenarios = 1000;
    const int pixels_per_scenario = 200;
    std::vector<long> good(scenarios, 0), bad(scenarios, 0);
    parallel_for(scenarios, [&](std::int64_t i) {
        Rng rng(derive_seed(0xC1, i));
        const CameraModel model = i % 2 == 0 ? CameraModel::Pinhole : CameraModel::Radial1;
        const SampledConfig cfg = sample_config(rng, model, 320);
        for (int s = 0; s < pixels_per_scenario; ++s) {
            const Eigen::Vector2d p(rng.uniform(0.0, 320.0), rng.uniform(0.0, 320.0));
            const PixelEval e = evaluate_pixel(cfg.camera, cfg.gravity, p);
            // skip vanishing-point neighborhoods and out-of-model pixels
            if (e.saturated || e.wnorm < 1e-3)
                continue;
            constexpr double t = 1e-6;
            const Eigen::Vector3d P(e.uv[0], e.uv[1], 1.0);
            const Eigen::Vector2d moved = project_point(cfg.camera, P - t * cfg.gravity.vec());
            const Eigen::Vector2d base = project_point(cfg.camera, P);
            const Eigen::Vector2d diff = moved - base;
            if (diff.norm() < 1e-9)
                continue;
            const Eigen::Vector2d oracle = diff / diff.norm();
            const double cross = e.up[0] * oracle[1] - e.up[1] * oracle[0];
            const double gap = std::abs(std::atan2(cross, e.up.dot(oracle)));
            if (gap < 1e-5)
                ++good[i];
            else
                ++bad[i];
        }
    });
    long total_good = 0, total_bad = 0;
    for (int i = 0; i < scenarios; ++i) {
        total_good += good[i];
        total_bad += bad[i];
    }
    const double frac = static_cast<double>(total_good) / (total_good + total_bad);
    char detail[160];
    std::snprintf(detail, sizeof(detail), "%ld/%ld pixels within 1e-5 rad = %.4f%%, need 99.9%%",
                  total_good, total_good + total_bad, 100.0 * frac);
    report(1, frac >= 0.999, "closed-form up-vector matches the projection-limit oracle", detail);
}

void criterion2_jacobians() {
    const JacobianCheckReport rep = run_jacobian_check(0xC2, 1000);
    char detail[200];
    std::snprintf(detail, sizeof(detail),
                  "max rel err: du/dg %.2e, du/dlogf %.2e, du/dk %.2e, dsin/dg %.2e, "
                  "dsin/dlogf %.2e, dsin/dk %.2e, need < 1e-5",
                  rep.up_gravity, rep.up_logf, rep.up_k, rep.lat_gravity, rep.lat_logf, rep.lat_k);
    report(2, rep.passes(1e-5), "analytic Jacobians match central finite differences", detail);
}

void criterion3_exact_recovery() {
    const int scenarios = 1000;
    std::vector<std::uint8_t> ok(scenarios, 0), is_pinhole(scenarios, 0);
    parallel_for(scenarios, [&](std::int64_t i) {
        const CameraModel model = i % 2 == 0 ? CameraModel::Pinhole : CameraModel::Radial1;
        is_pinhole[i] = model == CameraModel::Pinhole;
        const Scenario sc = sample_scenario(derive_seed(0xC3, i), 320, 320, model, {});
        CalibrationOptions opt;
        opt.model = model;
        opt.stride = 4;
        opt.lm.max_iters = 30;
        const CalibrationResult res = calibrate(sc.field, opt);
        const ErrorSample err =
            angular_errors(sc.camera, sc.gravity, res.cameras[0].params, res.images[0].gravity);
        ok[i] = err.gravity_err_deg < 0.1 && err.vfov_err_deg < 0.1 &&
                res.status != LMStatus::StalledDamping;
    });
    int pass_all = 0, pass_pinhole = 0, n_pinhole = 0;
    for (int i = 0; i < scenarios; ++i) {
        pass_all += ok[i];
        if (is_pinhole[i]) {
            ++n_pinhole;
            pass_pinhole += ok[i];
        }
    }
    char detail[160];
    std::snprintf(detail, sizeof(detail),
                  "recovered %d/%d overall (need 990), pinhole %d/%d (need all)", pass_all,
                  scenarios, pass_pinhole, n_pinhole);
    report(3, pass_all >= 990 && pass_pinhole == n_pinhole,
           "noiseless fields recover gravity and vfov to < 0.1 deg in <= 30 iterations", detail);
}

void criterion4_undistort_roundtrip() {
    const int cameras = 100;
    std::vector<double> worst(cameras, 0.0);
    std::vector<long> tested(cameras, 0);
    parallel_for(cameras, [&](std::int64_t i) {
        Rng rng(derive_seed(0xC4, i));
        const CameraModel model = i % 2 == 0 ? CameraModel::Radial1 : CameraModel::Radial2;
        const SampledConfig cfg = sample_config(rng, model, 320);
        const CameraParams &cam = cfg.camera;
        for (int y = 0; y < cam.height; ++y) {
            for (int x = 0; x < cam.width; ++x) {
                const Eigen::Vector2d qd = normalize_point(cam, {x + 0.5, y + 0.5});
                Eigen::Vector2d q;
                try {
                    q = undistort(cam, qd);
                } catch (const NonInvertibleError &) {
                    continue;
                }
                worst[i] = std::max(worst[i], (distort(cam, q) - qd).norm());
                ++tested[i];
            }
        }
    });
    double max_err = 0.0;
    long total = 0;
    for (int i = 0; i < cameras; ++i) {
        max_err = std::max(max_err, worst[i]);
        total += tested[i];
    }
    char detail[120];
    std::snprintf(detail, sizeof(detail), "max |distort(undistort(q)) - q| = %.2e over %ld points",
                  max_err, total);
    report(4, total > 0 && max_err < 1e-10, "undistortion round-trips to < 1e-10", detail);
}

void criterion5_partial_calibration() {
    const int trials = 200;
    NoiseSpec noise;
    noise.sigma_up_deg = 2.0;
    noise.sigma_lat_deg = 2.0;

    std::vector<double> joint_grav(trials), fixedf_grav(trials);
    std::vector<double> joint_vfov(trials), fixedg_vfov(trials);
    parallel_for(trials, [&](std::int64_t i) {
        const Scenario sc =
            sample_scenario(derive_seed(0xC5, i), 320, 320, CameraModel::Pinhole, noise);
        CalibrationOptions joint;
        joint.stride = 4;
        const CalibrationResult rj = calibrate(sc.field, joint);

        CalibrationOptions fix_f = joint;
        fix_f.fixed_focal = sc.camera.f;
        const CalibrationResult rf = calibrate(sc.field, fix_f);

        CalibrationOptions fix_g = joint;
        fix_g.fixed_gravity = sc.gravity;
        const CalibrationResult rg = calibrate(sc.field, fix_g);

        joint_grav[i] = angle_between(rj.images[0].gravity, sc.gravity) / kDeg;
        fixedf_grav[i] = angle_between(rf.images[0].gravity, sc.gravity) / kDeg;
        joint_vfov[i] = std::abs(vfov(rj.cameras[0].params) - vfov(sc.camera)) / kDeg;
        fixedg_vfov[i] = std::abs(vfov(rg.cameras[0].params) - vfov(sc.camera)) / kDeg;
    });

    int grav_wins = 0, vfov_wins = 0;
    for (int i = 0; i < trials; ++i) {
        if (fixedf_grav[i] < joint_grav[i])
            ++grav_wins;
        if (fixedg_vfov[i] < joint_vfov[i])
            ++vfov_wins;
    }
    const double p_grav = sign_test_p_value(grav_wins, trials);
    const double p_vfov = sign_test_p_value(vfov_wins, trials);
    const bool medians_improve = median(fixedf_grav) < median(joint_grav) &&
                                 median(fixedg_vfov) < median(joint_vfov);
    char detail[240];
    std::snprintf(detail, sizeof(detail),
                  "fix-fov gravity med %.3f vs %.3f deg (wins %d/%d, p=%.2e); fix-gravity vfov "
                  "med %.3f vs %.3f deg (wins %d/%d, p=%.2e)",
                  median(fixedf_grav), median(joint_grav), grav_wins, trials, p_grav,
                  median(fixedg_vfov), median(joint_vfov), vfov_wins, trials, p_vfov);
    report(5, medians_improve && p_grav < 0.01 && p_vfov < 0.01,
           "fixing true fov/gravity reduces the other error (sign test p < 0.01)", detail);
}

void criterion6_multi_image() {
    const int trials = 200;
    const int max_images = 8;
    NoiseSpec noise;
    noise.sigma_up_deg = 2.0;
    noise.sigma_lat_deg = 2.0;

    const std::vector<int> levels{1, 2, 4, 8};
    std::vector<std::vector<double>> errs(levels.size(), std::vector<double>(trials, 0.0));
    parallel_for(trials, [&](std::int64_t t) {
        Rng rng(derive_seed(0xC6, t));
        const SampledConfig cfg = sample_config(rng, CameraModel::Pinhole, 320);
        std::vector<PerspectiveField> fields;
        fields.reserve(max_images);
        for (int i = 0; i < max_images; ++i) {
            const GravityDir g = gravity_from_roll_pitch(rng.uniform(-45.0, 45.0) * kDeg,
                                                         rng.uniform(-45.0, 45.0) * kDeg);
            PerspectiveField f = render_field(cfg.camera, g);
            Rng noise_rng(derive_seed(derive_seed(0xC6, t), i + 1));
            perturb_field(f, noise, noise_rng, nullptr);
            fields.push_back(std::move(f));
        }
        CalibrationOptions opt;
        opt.sharing = Sharing::SharedIntrinsics;
        opt.stride = 4;
        for (std::size_t li = 0; li < levels.size(); ++li) {
            std::vector<const PerspectiveField *> ptrs;
            for (int i = 0; i < levels[li]; ++i)
                ptrs.push_back(&fields[i]);
            const CalibrationResult res = calibrate(ptrs, opt);
            errs[li][t] = std::abs(vfov(res.cameras[0].params) - vfov(cfg.camera)) / kDeg;
        }
    });

    std::vector<double> medians;
    for (auto &e : errs)
        medians.push_back(median(e));
    bool monotone = true;
    for (std::size_t i = 1; i < medians.size(); ++i)
        if (medians[i] > medians[i - 1])
            monotone = false;
    char detail[160];
    std::snprintf(detail, sizeof(detail),
                  "median vfov err over N=1/2/4/8: %.3f / %.3f / %.3f / %.3f deg", medians[0],
                  medians[1], medians[2], medians[3]);
    report(6, monotone && medians[3] < medians[0],
           "shared intrinsics tighten the vfov as images accumulate", detail);
}

void criterion7_uncertainty() {
    const int trials = 500;
    const std::vector<double> sigmas{0.5, 1.0, 2.0};
    const SampledConfig base = [] {
        Rng rng(0xC7);
        return sample_config(rng, CameraModel::Pinhole, 320);
    }();
    const PerspectiveField clean = render_field(base.camera, base.gravity);

    bool ratios_ok = true;
    std::string ratio_detail;
    std::vector<std::pair<double, double>> pooled; // (predicted sigma_roll, |roll error|)
    for (std::size_t level = 0; level < sigmas.size(); ++level) {
        NoiseSpec noise;
        noise.sigma_up_deg = sigmas[level];
        noise.sigma_lat_deg = sigmas[level];
        std::vector<double> rolls(trials, 0.0), preds(trials, 0.0);
        std::vector<std::uint8_t> valid(trials, 0);
        parallel_for(trials, [&](std::int64_t t) {
            PerspectiveField field = clean;
            Rng rng(derive_seed(0xC701 + level, t));
            perturb_field(field, noise, rng, nullptr);
            CalibrationOptions opt;
            opt.stride = 4;
            const CalibrationResult res = calibrate(field, opt);
            if (res.status == LMStatus::StalledDamping)
                return;
            rolls[t] = res.images[0].gravity.roll();
            preds[t] = res.images[0].sigma_roll_rad;
            valid[t] = 1;
        });
        std::vector<double> roll_list, pred_list;
        for (int t = 0; t < trials; ++t)
            if (valid[t]) {
                roll_list.push_back(rolls[t]);
                pred_list.push_back(preds[t]);
            }
        const double empirical = std_of(roll_list);
        const double predicted = median(pred_list);
        const double ratio = empirical / predicted;
        if (!(ratio > 0.5 && ratio < 2.0))
            ratios_ok = false;
        char buf[64];
        std::snprintf(buf, sizeof(buf), "sigma=%.1f: emp/pred=%.2f ", sigmas[level], ratio);
        ratio_detail += buf;
        for (std::size_t t = 0; t < roll_list.size(); ++t)
            pooled.emplace_back(pred_list[t], std::abs(roll_list[t] - base.gravity.roll()));
    }

    // binned calibration: mean error must grow with the predicted uncertainty
    std::sort(pooled.begin(), pooled.end());
    const std::size_t bins = 3;
    std::vector<double> bin_mean(bins, 0.0);
    bool bins_monotone = true;
    for (std::size_t b = 0; b < bins; ++b) {
        const std::size_t lo = b * pooled.size() / bins;
        const std::size_t hi = (b + 1) * pooled.size() / bins;
        double sum = 0.0;
        for (std::size_t i = lo; i < hi; ++i)
            sum += pooled[i].second;
        bin_mean[b] = sum / (hi - lo);
        if (b > 0 && bin_mean[b] <= bin_mean[b - 1])
            bins_monotone = false;
    }
    char detail[240];
    std::snprintf(detail, sizeof(detail), "%s; binned mean err %.4f/%.4f/%.4f deg",
                  ratio_detail.c_str(), bin_mean[0] / kDeg, bin_mean[1] / kDeg,
                  bin_mean[2] / kDeg);
    report(7, ratios_ok && bins_monotone,
           "predicted roll uncertainty tracks the Monte-Carlo scatter", detail);
}

void criterion8_initialization_equivalence() {
    const int trials = 500;
    NoiseSpec noise;
    noise.sigma_up_deg = 2.0;
    noise.sigma_lat_deg = 2.0;
    const std::vector<InitStrategy> inits{InitStrategy::Trivial, InitStrategy::Heuristic,
                                          InitStrategy::Solver};
    std::vector<std::vector<double>> grav(inits.size(), std::vector<double>(trials));
    std::vector<std::vector<double>> fov(inits.size(), std::vector<double>(trials));
    parallel_for(trials, [&](std::int64_t t) {
        const Scenario sc =
            sample_scenario(derive_seed(0xC8, t), 320, 320, CameraModel::Pinhole, noise);
        for (std::size_t s = 0; s < inits.size(); ++s) {
            CalibrationOptions opt;
            opt.stride = 4;
            opt.init = inits[s];
            const CalibrationResult res = calibrate(sc.field, opt);
            grav[s][t] = angle_between(res.images[0].gravity, sc.gravity) / kDeg;
            fov[s][t] = std::abs(vfov(res.cameras[0].params) - vfov(sc.camera)) / kDeg;
        }
    });
    std::vector<double> gm, fm;
    for (std::size_t s = 0; s < inits.size(); ++s) {
        gm.push_back(median(grav[s]));
        fm.push_back(median(fov[s]));
    }
    auto spread = [](const std::vector<double> &m) {
        const double lo = *std::min_element(m.begin(), m.end());
        const double hi = *std::max_element(m.begin(), m.end());
        return (hi - lo) / hi;
    };
    char detail[200];
    std::snprintf(detail, sizeof(detail),
                  "median gravity err %.4f/%.4f/%.4f deg, vfov err %.4f/%.4f/%.4f deg "
                  "(trivial/heuristic/solver)",
                  gm[0], gm[1], gm[2], fm[0], fm[1], fm[2]);
    report(8, spread(gm) < 0.05 && spread(fm) < 0.05,
           "final accuracy is independent of the initialization strategy", detail);
}

void criterion9_metric_oracles() {
    // AUC against a fine-grid integration oracle with breakpoint knots.
    auto auc_oracle = [](const std::vector<double> &errors, double threshold) {
        std::vector<double> knots;
        for (int i = 0; i <= 100000; ++i)
            knots.push_back(threshold * i / 100000.0);
        for (double e : errors)
            if (std::isfinite(e)) {
                const double c = std::max(e, 1.0);
                if (c < threshold)
                    knots.push_back(c);
            }
        std::sort(knots.begin(), knots.end());
        double area = 0.0;
        for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
            const double mid = 0.5 * (knots[i] + knots[i + 1]);
            std::size_t recalled = 0;
            for (double e : errors)
                if (std::isfinite(e) && std::max(e, 1.0) <= mid)
                    ++recalled;
            area += (knots[i + 1] - knots[i]) * recalled / static_cast<double>(errors.size());
        }
        return 100.0 * area / threshold;
    };

    Rng rng(0xC9);
    double auc_gap = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> errors;
        const int n = 3 + static_cast<int>(rng.index(40));
        for (int i = 0; i < n; ++i)
            errors.push_back(rng.uniform() < 0.1 ? kInf : rng.uniform(0.0, 15.0));
        for (double t : {1.0, 5.0, 10.0})
            auc_gap = std::max(auc_gap, std::abs(auc(errors, t) - auc_oracle(errors, t)));
    }

    // pixel distortion error against a scalar double loop with bisection,
    // stride 1 on a 64x64 camera.
    const CameraParams gt = make_radial1(focal_from_vfov(70.0 * kDeg, 64), -0.08, 64, 64);
    const Eigen::Vector2d est_k(0.03, 0.0);
    double oracle_total = 0.0;
    long oracle_count = 0;
    for (int y = 0; y < 64; ++y) {
        for (int x = 0; x < 64; ++x) {
            const double ax = (x + 0.5 - gt.c[0]) / gt.f;
            const double ay = (y + 0.5 - gt.c[1]) / gt.f;
            const double rd = std::sqrt(ax * ax + ay * ay);
            double lo = 0.0, hi = std::sqrt(-1.0 / (3.0 * gt.k[0]));
            const double peak = hi * (1.0 + gt.k[0] * hi * hi);
            if (rd > peak)
                continue;
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (mid * (1.0 + gt.k[0] * mid * mid) < rd)
                    lo = mid;
                else
                    hi = mid;
            }
            const double r = 0.5 * (lo + hi);
            const double r2 = r * r;
            const double gap = (gt.k[0] - est_k[0]) * r2; // d_gt - d_est at r2
            oracle_total += gt.f * std::abs(gap) * r;
            ++oracle_count;
        }
    }
    const double oracle_value = oracle_total / oracle_count;
    const double impl_value = pixel_distortion_error(gt, est_k, 1);
    const double dist_gap = std::abs(impl_value - oracle_value);

    char detail[160];
    std::snprintf(detail, sizeof(detail),
                  "AUC gap %.2e (need < 1e-6), distortion gap %.2e px (need < 1e-9)", auc_gap,
                  dist_gap);
    report(9, auc_gap < 1e-6 && dist_gap < 1e-9, "metrics match brute-force oracles", detail);
}

void criterion10_confidence_weighting() {
    const int trials = 200;
    std::vector<double> unit_err(trials), oracle_err(trials);
    parallel_for(trials, [&](std::int64_t t) {
        NoiseSpec unit;
        unit.sigma_up_deg = 1.0;
        unit.sigma_lat_deg = 1.0;
        unit.outlier_frac = 0.3;
        unit.conf_mode = ConfMode::Unit;
        NoiseSpec oracle = unit;
        oracle.conf_mode = ConfMode::OracleInlier;

        // identical seeds: the same camera, gravity, noise and outliers
        const std::uint64_t seed = derive_seed(0xCA, t);
        const Scenario sc_unit = sample_scenario(seed, 320, 320, CameraModel::Pinhole, unit);
        const Scenario sc_oracle = sample_scenario(seed, 320, 320, CameraModel::Pinhole, oracle);

        CalibrationOptions opt;
        opt.stride = 4;
        const CalibrationResult ru = calibrate(sc_unit.field, opt);
        const CalibrationResult ro = calibrate(sc_oracle.field, opt);
        unit_err[t] = angle_between(ru.images[0].gravity, sc_unit.gravity) / kDeg;
        oracle_err[t] = angle_between(ro.images[0].gravity, sc_oracle.gravity) / kDeg;
    });
    const double med_unit = median(unit_err);
    const double med_oracle = median(oracle_err);
    char detail[160];
    std::snprintf(detail, sizeof(detail),
                  "median gravity err: unit conf %.3f deg vs oracle conf %.3f deg (ratio %.1fx, "
                  "need >= 5x)",
                  med_unit, med_oracle, med_unit / med_oracle);
    report(10, med_unit >= 5.0 * med_oracle,
           "oracle confidences suppress outliers far better than unit weights", detail);
}

} // namespace

int main() {
    const auto t0 = std::chrono::steady_clock::now();
    criterion1_up_vector_limit();
    criterion2_jacobians();
    criterion3_exact_recovery();
    criterion4_undistort_roundtrip();
    criterion5_partial_calibration();
    criterion6_multi_image();
    criterion7_uncertainty();
    criterion8_initialization_equivalence();
    criterion9_metric_oracles();
    criterion10_confidence_weighting();
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%d/10 criteria passed in %.1f s\n", 10 - g_failures, secs);
    return g_failures;
}
