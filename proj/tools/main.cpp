#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <string>

#include <CLI11.hpp>

#include "ghostproj/cutoff.hpp"
#include "ghostproj/experiment.hpp"
#include "ghostproj/parallel.hpp"

namespace gp = ghostproj;

namespace {

/// Every experiment field is a flag; --config seeds the defaults so flags
/// override the file.
void add_experiment_options(CLI::App& cmd, gp::ExperimentConfig& cfg, bool need_scheme)
{
    auto* scheme = cmd.add_option("--scheme", cfg.scheme,
                                  "weighted, weighted-shifted, filtered, filtered-linear, "
                                  "filtered-poisson, color-global, color-independent, "
                                  "nnls, nnls-poisson, nnls-exposure, nnls-combined, "
                                  "ga-poisson, photocopy");
    if (need_scheme && cfg.scheme.empty())
        scheme->required();
    cmd.add_option("--rows", cfg.rows, "image rows");
    cmd.add_option("--cols", cfg.cols, "image columns");
    cmd.add_option("--count", cfg.count, "basis size N");
    cmd.add_option("--distribution", cfg.distribution,
                   "uniform01 | binary01 | truncated_gaussian");
    cmd.add_option("--mu", cfg.mu, "truncated gaussian mean");
    cmd.add_option("--sigma", cfg.sigma, "truncated gaussian std dev");
    cmd.add_option("--seed", cfg.seed, "master seed");
    cmd.add_option("--image", cfg.image_path, "CSV image path (default: phantom)");
    cmd.add_option("--phantom-contrast", cfg.phantom_contrast,
                   "raw | zero-centered | moments:<mean>:<e2>");
    cmd.add_option("--lambda", cfg.lambda, "photons per pixel per unit exposure");
    cmd.add_option("--exposure-sigma", cfg.exposure_sigma, "exposure jitter std dev");
    cmd.add_option("--cutoff-x", cfg.cutoff_x, "standardized cutoff X (default: optimum)");
    cmd.add_option("--dwell-min", cfg.dwell_min, "minimum exposure per kept mask");
    cmd.add_option("--ratio", cfg.ratio, "linear-weight ratio beta/alpha");
    cmd.add_option("--shift-delta", cfg.shift_delta, "fixed image shift");
    cmd.add_option("--shift-mode", cfg.shift_mode, "statistical | exact | fixed");
    cmd.add_option("--photocopy-scheme", cfg.photocopy_scheme, "weighted | filtered");
    cmd.add_option("--out", cfg.out_dir, "output directory");
    cmd.add_option("--threads", cfg.threads, "worker threads (0 = all cores)");
}

gp::ExperimentConfig config_defaults(const std::string& config_path)
{
    if (config_path.empty())
        return gp::ExperimentConfig{};
    return gp::ExperimentConfig::from_key_values(gp::read_key_values(config_path));
}

void print_kv(const std::string& key, const std::string& value)
{
    std::cout << key << " = " << value << '\n';
}

void print_kv(const std::string& key, double value)
{
    std::printf("%s = %.17g\n", key.c_str(), value);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"ghost-projection simulation and planning toolkit"};
    app.require_subcommand(1);

    // --config is parsed up front so it can seed every subcommand's defaults.
    std::string config_path;
    for (int i = 1; i + 1 < argc; ++i)
        if (std::string(argv[i]) == "--config")
            config_path = argv[i + 1];

    try {
        gp::ExperimentConfig cfg = config_defaults(config_path);
        std::string config_sink;

        auto* run = app.add_subcommand("run", "execute a configured scheme end-to-end");
        run->add_option("--config", config_sink, "key=value experiment file");
        add_experiment_options(*run, cfg, /*need_scheme=*/true);

        auto* phantom_cmd = app.add_subcommand("phantom", "write the built-in test image");
        int ph_rows = cfg.rows, ph_cols = cfg.cols;
        std::string ph_contrast = cfg.phantom_contrast;
        std::filesystem::path ph_out = cfg.out_dir;
        phantom_cmd->add_option("--config", config_sink, "key=value experiment file");
        phantom_cmd->add_option("--rows", ph_rows, "image rows");
        phantom_cmd->add_option("--cols", ph_cols, "image columns");
        phantom_cmd->add_option("--contrast", ph_contrast,
                                "raw | zero-centered | moments:<mean>:<e2>");
        phantom_cmd->add_option("--out", ph_out, "output directory");

        auto* sweep = app.add_subcommand(
            "cutoff-sweep", "solved vs fitted Poisson-optimal cutoff over a range of a");
        double a_lo = 1e-3, a_hi = 1e3;
        int points = 61;
        std::filesystem::path sweep_out = cfg.out_dir;
        sweep->add_option("--config", config_sink, "key=value experiment file");
        sweep->add_option("--a-lo", a_lo, "lower bound of a");
        sweep->add_option("--a-hi", a_hi, "upper bound of a");
        sweep->add_option("--points", points, "log-spaced sample count");
        sweep->add_option("--out", sweep_out, "output directory");

        auto* size = app.add_subcommand(
            "basis-size", "basis size needed by the filtered scheme for a target SNR");
        double target_snr = 10.0;
        double size_x = std::numeric_limits<double>::quiet_NaN();
        double sigmas = std::numeric_limits<double>::quiet_NaN();
        int bs_rows = cfg.rows, bs_cols = cfg.cols;
        size->add_option("--config", config_sink, "key=value experiment file");
        size->add_option("--target-snr", target_snr, "desired SNR")->required();
        size->add_option("--rows", bs_rows, "image rows");
        size->add_option("--cols", bs_cols, "image columns");
        size->add_option("--cutoff-x", size_x, "standardized cutoff X (default: optimum)");
        size->add_option("--sigmas", sigmas,
                         "confidence sigmas s (default: self-consistent in N)");

        auto* copy = app.add_subcommand(
            "photocopy", "reproduce an object from bucket measurements alone");
        copy->add_option("--config", config_sink, "key=value experiment file");
        gp::ExperimentConfig copy_cfg = cfg;
        copy_cfg.scheme = "photocopy";
        add_experiment_options(*copy, copy_cfg, /*need_scheme=*/false);

        auto* rep = app.add_subcommand(
            "report", "compare a stored projection against a reference image");
        std::filesystem::path rep_projection, rep_image, rep_out = cfg.out_dir;
        double rep_scale = 1.0, rep_pred_var = 0.0, rep_pred_ped = 0.0;
        rep->add_option("--config", config_sink, "key=value experiment file");
        rep->add_option("--projection", rep_projection, "projection CSV")->required();
        rep->add_option("--image", rep_image, "reference image CSV")->required();
        rep->add_option("--scale", rep_scale, "expected image scale in the projection");
        rep->add_option("--predicted-variance", rep_pred_var, "model residual variance");
        rep->add_option("--predicted-pedestal", rep_pred_ped, "model pedestal");
        rep->add_option("--out", rep_out, "output directory");

        app.parse(argc, argv);

        if (run->parsed()) {
            const gp::RunResult res = gp::run_experiment(cfg);
            print_kv("scheme", cfg.scheme);
            print_kv("snr_predicted", res.predicted_snr);
            print_kv("snr_simulated", res.simulated_snr);
            print_kv("pedestal_predicted", res.pedestal_predicted);
            print_kv("pedestal_observed", res.pedestal_observed);
            print_kv("report", res.report_path.string());
            return 0;
        }

        if (phantom_cmd->parsed()) {
            const gp::Image img = gp::phantom(ph_rows, ph_cols, ph_contrast);
            std::filesystem::create_directories(ph_out);
            gp::write_image_csv(ph_out / "phantom.csv", img);
            gp::write_image_pgm(ph_out / "phantom.pgm", img);
            print_kv("mean", img.mean());
            print_kv("second_moment", img.second_moment());
            print_kv("csv", (ph_out / "phantom.csv").string());
            return 0;
        }

        if (sweep->parsed()) {
            const auto rows = gp::cutoff_sweep(a_lo, a_hi, points);
            std::filesystem::create_directories(sweep_out);
            std::ofstream out(sweep_out / "cutoff_sweep.csv");
            out.precision(17);
            out << "a,x_solved,x_approx\n";
            double worst = 0.0;
            for (const auto& row : rows) {
                out << row.a << ',' << row.x_solved << ',' << row.x_approx << '\n';
                worst = std::max(worst, std::abs(row.x_solved - row.x_approx));
            }
            print_kv("points", std::to_string(rows.size()));
            print_kv("max_abs_error", worst);
            print_kv("csv", (sweep_out / "cutoff_sweep.csv").string());
            return 0;
        }

        if (size->parsed()) {
            const long nm = static_cast<long>(bs_rows) * bs_cols;
            const double x = std::isnan(size_x) ? gp::optimal_cutoff_x() : size_x;
            gp::BasisSizePlan plan{};
            if (std::isnan(sigmas)) {
                // s depends on N; iterate the estimate to its fixed point.
                double s = 3.0;
                for (int it = 0; it < 50; ++it) {
                    plan = gp::basis_size_estimate(target_snr, nm, s, x);
                    const double next = gp::confidence_sigmas(
                        static_cast<std::uint64_t>(std::max(2.0, plan.n_required)));
                    if (std::abs(next - s) < 1e-12)
                        break;
                    s = next;
                }
            } else {
                plan = gp::basis_size_estimate(target_snr, nm, sigmas, x);
            }
            print_kv("target_snr", plan.target_snr);
            print_kv("nm", std::to_string(plan.nm));
            print_kv("cutoff_x", x);
            print_kv("kept_fraction", plan.kept_fraction);
            print_kv("confidence_sigmas", plan.confidence_sigmas);
            print_kv("n_mean_term", plan.n_mean_term);
            print_kv("n_surcharge_term", plan.n_surcharge_term);
            print_kv("n_required", plan.n_required);
            return 0;
        }

        if (copy->parsed()) {
            const gp::RunResult res = gp::run_experiment(copy_cfg);
            print_kv("scheme", copy_cfg.photocopy_scheme);
            print_kv("snr_predicted", res.predicted_snr);
            print_kv("snr_simulated", res.simulated_snr);
            print_kv("pedestal_predicted", res.pedestal_predicted);
            print_kv("pedestal_observed", res.pedestal_observed);
            print_kv("report", res.report_path.string());
            return 0;
        }

        if (rep->parsed()) {
            gp::Projection proj;
            proj.values = gp::read_image_csv(rep_projection);
            const gp::Image image = gp::read_image_csv(rep_image);
            const gp::ProjectionReport r =
                gp::report(proj, image, rep_scale, rep_pred_var, rep_pred_ped);
            std::filesystem::create_directories(rep_out);
            gp::KeyValues kv;
            auto num = [](double v) {
                char buf[64];
                std::snprintf(buf, sizeof buf, "%.17g", v);
                return std::string(buf);
            };
            kv.emplace_back("snr_global", num(r.snr_global));
            kv.emplace_back("pedestal_observed", num(r.pedestal_observed));
            kv.emplace_back("residual_variance", num(r.residual_variance));
            gp::write_key_values(rep_out / "report.kv", kv);
            print_kv("snr_global", r.snr_global);
            print_kv("pedestal_observed", r.pedestal_observed);
            print_kv("residual_variance", r.residual_variance);
            return 0;
        }
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
