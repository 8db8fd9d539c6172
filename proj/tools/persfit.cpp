#include "persfit/calibrator.hpp"
#include "persfit/camera.hpp"
#include "persfit/errors.hpp"
#include "persfit/fieldio.hpp"
#include "persfit/jacobian_check.hpp"
#include "persfit/metrics.hpp"
#include "persfit/parallel.hpp"
#include "persfit/synth.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace persfit;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitIo = 2;
constexpr int kExitOptim = 3;

constexpr double kRadToDeg = 180.0 / M_PI;

struct CalibrateFlags {
    std::string model = "pinhole";
    std::string init = "trivial";
    std::string fix_gravity;
    double fix_focal = 0.0;
    bool has_fix_focal = false;
    double prior_focal = 0.0;
    bool has_prior_focal = false;
    double prior_focal_std = 0.0;
    int stride = 1;
    int max_iters = 30;
    double lambda0 = 0.1;
};

void add_calibrate_flags(CLI::App *cmd, CalibrateFlags *flags) {
    cmd->add_option("--model", flags->model, "Camera model")
        ->check(CLI::IsMember({"pinhole", "radial1", "radial2"}));
    cmd->add_option("--init", flags->init, "Initialization strategy")
        ->check(CLI::IsMember({"trivial", "heuristic", "solver"}));
    auto *fix_g = cmd->add_option("--fix-gravity", flags->fix_gravity,
                                  "Fix gravity to gx,gy,gz (not optimized)");
    auto *fix_f = cmd->add_option("--fix-focal", flags->fix_focal,
                                  "Fix the focal length in pixels (not optimized)");
    fix_f->each([flags](const std::string &) { flags->has_fix_focal = true; });
    auto *prior_f =
        cmd->add_option("--prior-focal", flags->prior_focal, "Soft focal prior in pixels");
    prior_f->each([flags](const std::string &) { flags->has_prior_focal = true; });
    auto *prior_f_std = cmd->add_option("--prior-focal-std", flags->prior_focal_std,
                                        "Standard deviation of the focal prior in pixels");
    fix_f->excludes(prior_f);
    fix_f->excludes(prior_f_std);
    (void)fix_g;
    prior_f->needs(prior_f_std);
    prior_f_std->needs(prior_f);
    cmd->add_option("--stride", flags->stride, "Pixel subsampling stride")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--max-iters", flags->max_iters, "Iteration cap")->check(CLI::PositiveNumber);
    cmd->add_option("--lambda0", flags->lambda0, "Initial damping")->check(CLI::PositiveNumber);
}

CalibrationOptions build_options(const CalibrateFlags &flags) {
    CalibrationOptions options;
    options.model = camera_model_from_string(flags.model);
    if (flags.init == "heuristic")
        options.init = InitStrategy::Heuristic;
    else if (flags.init == "solver")
        options.init = InitStrategy::Solver;
    options.stride = flags.stride;
    options.lm.max_iters = flags.max_iters;
    options.lm.lambda0 = flags.lambda0;
    if (!flags.fix_gravity.empty()) {
        double gx = 0, gy = 0, gz = 0;
        if (std::sscanf(flags.fix_gravity.c_str(), "%lf,%lf,%lf", &gx, &gy, &gz) != 3)
            throw DomainError("--fix-gravity expects gx,gy,gz");
        options.fixed_gravity = GravityDir(Eigen::Vector3d(gx, gy, gz));
    }
    if (flags.has_fix_focal)
        options.fixed_focal = flags.fix_focal;
    if (flags.has_prior_focal)
        options.focal_prior = ParamPrior{flags.prior_focal, flags.prior_focal_std};
    return options;
}

int run_calibrate(const std::string &path, const CalibrateFlags &flags,
                  const std::string &out_path) {
    const PerspectiveField field = load_field(path);
    const CalibrationOptions options = build_options(flags);
    const CalibrationResult result = calibrate(field, options);
    const ImageEstimate &img = result.images[0];
    const CameraEstimate &cam = result.cameras[0];
    std::printf("roll=%.6g pitch=%.6g gravity=(%.9g,%.9g,%.9g) f=%.6g vfov_deg=%.6g "
                "k1=%.6g k2=%.6g sigma_gravity_deg=%.6g sigma_vfov_deg=%.6g sigma_k1=%.6g "
                "iters=%d status=%s\n",
                img.gravity.roll() * kRadToDeg, img.gravity.pitch() * kRadToDeg, img.gravity.x(),
                img.gravity.y(), img.gravity.z(), cam.params.f, vfov(cam.params) * kRadToDeg,
                cam.params.k[0], cam.params.k[1], img.sigma_gravity_rad * kRadToDeg,
                cam.sigma_vfov_rad * kRadToDeg, cam.sigma_k1, result.traces[0].accepted_steps,
                to_string(result.status));
    if (!out_path.empty())
        save_camera(cam.params, out_path);
    return result.status == LMStatus::StalledDamping ? kExitOptim : kExitOk;
}

int run_multi_calibrate(const std::vector<std::string> &paths, const CalibrateFlags &flags) {
    std::vector<PerspectiveField> fields;
    fields.reserve(paths.size());
    for (const std::string &p : paths)
        fields.push_back(load_field(p));
    std::vector<const PerspectiveField *> ptrs;
    for (const PerspectiveField &f : fields)
        ptrs.push_back(&f);

    CalibrationOptions options = build_options(flags);
    options.sharing = Sharing::SharedIntrinsics;
    const CalibrationResult result = calibrate(ptrs, options);
    const CameraEstimate &cam = result.cameras[0];
    std::printf("f=%.6g vfov_deg=%.6g k1=%.6g k2=%.6g sigma_vfov_deg=%.6g sigma_k1=%.6g "
                "iters=%d status=%s\n",
                cam.params.f, vfov(cam.params) * kRadToDeg, cam.params.k[0], cam.params.k[1],
                cam.sigma_vfov_rad * kRadToDeg, cam.sigma_k1, result.traces[0].accepted_steps,
                to_string(result.status));
    for (std::size_t i = 0; i < paths.size(); ++i) {
        const ImageEstimate &img = result.images[i];
        std::printf("image=%s roll=%.6g pitch=%.6g gravity=(%.9g,%.9g,%.9g) "
                    "sigma_gravity_deg=%.6g\n",
                    paths[i].c_str(), img.gravity.roll() * kRadToDeg,
                    img.gravity.pitch() * kRadToDeg, img.gravity.x(), img.gravity.y(),
                    img.gravity.z(), img.sigma_gravity_rad * kRadToDeg);
    }
    return result.status == LMStatus::StalledDamping ? kExitOptim : kExitOk;
}

int run_synth(std::uint64_t seed, int count, int width, int height, const std::string &model,
              double noise_up, double noise_lat, double outliers, const std::string &conf,
              const std::string &out_dir) {
    fs::create_directories(out_dir);
    NoiseSpec noise;
    noise.sigma_up_deg = noise_up;
    noise.sigma_lat_deg = noise_lat;
    noise.outlier_frac = outliers;
    noise.conf_mode = conf == "oracle" ? ConfMode::OracleInlier : ConfMode::Unit;
    const CameraModel cam_model = camera_model_from_string(model);
    parallel_for(count, [&](std::int64_t i) {
        const Scenario sc = sample_scenario(derive_seed(seed, static_cast<std::uint64_t>(i)),
                                            width, height, cam_model, noise);
        write_scenario(sc, out_dir, static_cast<int>(i));
    });
    std::printf("count=%d dir=%s\n", count, out_dir.c_str());
    return kExitOk;
}

int run_bench(const std::string &dir, const CalibrateFlags &flags) {
    std::vector<fs::path> field_files;
    if (!fs::is_directory(dir))
        throw FileFormatError("not a directory: " + dir);
    for (const auto &entry : fs::directory_iterator(dir))
        if (entry.path().extension() == ".pfld")
            field_files.push_back(entry.path());
    std::sort(field_files.begin(), field_files.end());
    if (field_files.empty())
        throw FileFormatError("no .pfld files in " + dir);

    const CalibrationOptions options = build_options(flags);
    std::vector<ErrorSample> samples(field_files.size());
    parallel_for(static_cast<std::int64_t>(field_files.size()), [&](std::int64_t i) {
        const fs::path &pfld = field_files[i];
        fs::path cam_path = pfld;
        cam_path.replace_extension(".cam");
        fs::path grav_path = pfld;
        grav_path.replace_extension(".grav");
        const PerspectiveField field = load_field(pfld.string());
        const CameraParams gt_cam = load_camera(cam_path.string());
        const GravityDir gt_grav = load_gravity(grav_path.string());
        const CalibrationResult result = calibrate(field, options);
        if (result.status != LMStatus::StalledDamping)
            samples[i] = angular_errors(gt_cam, gt_grav, result.cameras[0].params,
                                        result.images[0].gravity);
        // stalled runs keep the +inf failure encoding
    });
    std::fputs(benchmark_report(samples).c_str(), stdout);
    return kExitOk;
}

int run_check_jacobians(std::uint64_t seed, int trials) {
    const JacobianCheckReport report = run_jacobian_check(seed, trials);
    std::printf("trials=%d max_rel_err_up_gravity=%.3g max_rel_err_up_logf=%.3g "
                "max_rel_err_up_k=%.3g max_rel_err_lat_gravity=%.3g "
                "max_rel_err_lat_logf=%.3g max_rel_err_lat_k=%.3g overall=%.3g status=%s\n",
                report.trials, report.up_gravity, report.up_logf, report.up_k,
                report.lat_gravity, report.lat_logf, report.lat_k, report.overall(),
                report.passes() ? "ok" : "fail");
    return report.passes() ? kExitOk : kExitOptim;
}

int run_undistort_grid(const std::string &camera_path, int stride) {
    const CameraParams camera = load_camera(camera_path);
    for (int y = 0; y < camera.height; y += stride) {
        for (int x = 0; x < camera.width; x += stride) {
            const Eigen::Vector2d p(x + 0.5, y + 0.5);
            Eigen::Vector2d q;
            try {
                q = undistort(camera, normalize_point(camera, p));
            } catch (const NonInvertibleError &) {
                continue;
            }
            const Eigen::Vector2d moved = denormalize_point(camera, q);
            std::printf("%.6g\t%.6g\t%.6g\t%.6g\n", p[0], p[1], moved[0] - p[0],
                        moved[1] - p[1]);
        }
    }
    return kExitOk;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Perspective-field camera calibration"};
    app.require_subcommand(1);

    // calibrate
    auto *calibrate_cmd = app.add_subcommand("calibrate", "Fit camera parameters to a field");
    std::string calibrate_field;
    std::string calibrate_out;
    CalibrateFlags calibrate_flags;
    calibrate_cmd->add_option("field", calibrate_field, "Input .pfld file")->required();
    add_calibrate_flags(calibrate_cmd, &calibrate_flags);
    calibrate_cmd->add_option("--out", calibrate_out, "Write the fitted camera to this path");

    // multi-calibrate
    auto *multi_cmd =
        app.add_subcommand("multi-calibrate", "Joint calibration with shared intrinsics");
    std::vector<std::string> multi_fields;
    std::string share_mode;
    CalibrateFlags multi_flags;
    multi_cmd->add_option("fields", multi_fields, "Input .pfld files")->required();
    multi_cmd->add_option("--share", share_mode, "Sharing scheme")
        ->required()
        ->check(CLI::IsMember({"intrinsics"}));
    add_calibrate_flags(multi_cmd, &multi_flags);

    // synth
    auto *synth_cmd = app.add_subcommand("synth", "Generate synthetic scenarios");
    std::uint64_t synth_seed = 0;
    int synth_count = 1, synth_width = 320, synth_height = 320;
    std::string synth_model = "pinhole", synth_conf = "unit", synth_out;
    double synth_noise_up = 0.0, synth_noise_lat = 0.0, synth_outliers = 0.0;
    synth_cmd->add_option("--seed", synth_seed, "Base seed");
    synth_cmd->add_option("--count", synth_count, "Number of scenarios")
        ->check(CLI::PositiveNumber);
    synth_cmd->add_option("--width", synth_width, "Image width")->check(CLI::PositiveNumber);
    synth_cmd->add_option("--height", synth_height, "Image height")->check(CLI::PositiveNumber);
    synth_cmd->add_option("--model", synth_model, "Camera model")
        ->check(CLI::IsMember({"pinhole", "radial1", "radial2"}));
    synth_cmd->add_option("--noise-up", synth_noise_up, "Up-vector noise std [deg]");
    synth_cmd->add_option("--noise-lat", synth_noise_lat, "Latitude noise std [deg]");
    synth_cmd->add_option("--outliers", synth_outliers, "Outlier fraction")
        ->check(CLI::Range(0.0, 1.0));
    synth_cmd->add_option("--conf", synth_conf, "Confidence mode")
        ->check(CLI::IsMember({"unit", "oracle"}));
    synth_cmd->add_option("--out", synth_out, "Output directory")->required();

    // bench
    auto *bench_cmd = app.add_subcommand("bench", "Evaluate calibration over a scenario dir");
    std::string bench_dir;
    CalibrateFlags bench_flags;
    bench_cmd->add_option("--dir", bench_dir, "Scenario directory")->required();
    add_calibrate_flags(bench_cmd, &bench_flags);

    // check-jacobians
    auto *check_cmd = app.add_subcommand("check-jacobians",
                                         "Compare analytic Jacobians to finite differences");
    std::uint64_t check_seed = 0;
    int check_trials = 100;
    check_cmd->add_option("--seed", check_seed, "Base seed");
    check_cmd->add_option("--trials", check_trials, "Number of configurations")
        ->check(CLI::PositiveNumber);

    // undistort-grid
    auto *grid_cmd = app.add_subcommand("undistort-grid", "Displacement field of the distortion");
    std::string grid_camera;
    int grid_stride = 16;
    grid_cmd->add_option("--camera", grid_camera, "Camera file")->required();
    grid_cmd->add_option("--stride", grid_stride, "Grid stride")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (calibrate_cmd->parsed())
            return run_calibrate(calibrate_field, calibrate_flags, calibrate_out);
        if (multi_cmd->parsed())
            return run_multi_calibrate(multi_fields, multi_flags);
        if (synth_cmd->parsed())
            return run_synth(synth_seed, synth_count, synth_width, synth_height, synth_model,
                             synth_noise_up, synth_noise_lat, synth_outliers, synth_conf,
                             synth_out);
        if (bench_cmd->parsed())
            return run_bench(bench_dir, bench_flags);
        if (check_cmd->parsed())
            return run_check_jacobians(check_seed, check_trials);
        if (grid_cmd->parsed())
            return run_undistort_grid(grid_camera, grid_stride);
    } catch (const FileFormatError &e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitIo;
    } catch (const NoHypothesisError &e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitOptim;
    } catch (const InsufficientSamplesError &e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitOptim;
    } catch (const DomainError &e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const Error &e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitIo;
    } catch (const std::exception &e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitIo;
    }
    return kExitUsage;
}
