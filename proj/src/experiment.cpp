#include "ghostproj/experiment.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "ghostproj/cutoff.hpp"
#include "ghostproj/optimize.hpp"
#include "ghostproj/parallel.hpp"

namespace ghostproj {

namespace {

std::string num(double v)
{
    std::ostringstream ss;
    ss.precision(17);
    ss << v;
    return ss.str();
}

double get_double(const KeyValues& kv, const std::string& key, double fallback)
{
    const std::string* v = find_value(kv, key);
    return v ? std::stod(*v) : fallback;
}

std::string get_string(const KeyValues& kv, const std::string& key,
                       const std::string& fallback)
{
    const std::string* v = find_value(kv, key);
    return v ? *v : fallback;
}

} // namespace

ExperimentConfig ExperimentConfig::from_key_values(const KeyValues& kv)
{
    ExperimentConfig c;
    c.scheme = get_string(kv, "scheme", "");
    c.rows = static_cast<int>(get_double(kv, "rows", 40));
    c.cols = static_cast<int>(get_double(kv, "cols", 40));
    c.count = static_cast<std::uint64_t>(get_double(kv, "count", 0));
    c.distribution = get_string(kv, "distribution", "uniform01");
    c.mu = get_double(kv, "mu", 0.5);
    c.sigma = get_double(kv, "sigma", 0.1);
    if (const std::string* v = find_value(kv, "seed"))
        c.seed = std::stoull(*v);
    c.image_path = get_string(kv, "image", "");
    c.phantom_contrast = get_string(kv, "phantom_contrast", "raw");
    c.lambda = get_double(kv, "lambda", 0.0);
    c.exposure_sigma = get_double(kv, "exposure_sigma", 0.0);
    c.cutoff_x = get_double(kv, "cutoff_x", c.cutoff_x);
    c.dwell_min = get_double(kv, "dwell_min", 0.0);
    c.ratio = get_double(kv, "ratio", c.ratio);
    c.shift_delta = get_double(kv, "shift_delta", c.shift_delta);
    c.shift_mode = get_string(kv, "shift_mode", "statistical");
    c.photocopy_scheme = get_string(kv, "photocopy_scheme", "filtered");
    c.out_dir = get_string(kv, "out", ".");
    c.threads = static_cast<int>(get_double(kv, "threads", 0));
    return c;
}

KeyValues ExperimentConfig::to_key_values() const
{
    KeyValues kv;
    kv.emplace_back("scheme", scheme);
    kv.emplace_back("rows", std::to_string(rows));
    kv.emplace_back("cols", std::to_string(cols));
    kv.emplace_back("count", std::to_string(count));
    kv.emplace_back("distribution", distribution);
    kv.emplace_back("mu", num(mu));
    kv.emplace_back("sigma", num(sigma));
    kv.emplace_back("seed", std::to_string(seed));
    kv.emplace_back("image", image_path);
    kv.emplace_back("phantom_contrast", phantom_contrast);
    kv.emplace_back("lambda", num(lambda));
    kv.emplace_back("exposure_sigma", num(exposure_sigma));
    kv.emplace_back("cutoff_x", num(cutoff_x));
    kv.emplace_back("dwell_min", num(dwell_min));
    kv.emplace_back("ratio", num(ratio));
    kv.emplace_back("shift_delta", num(shift_delta));
    kv.emplace_back("shift_mode", shift_mode);
    kv.emplace_back("photocopy_scheme", photocopy_scheme);
    kv.emplace_back("out", out_dir.string());
    kv.emplace_back("threads", std::to_string(threads));
    return kv;
}

void ExperimentConfig::validate() const
{
    static const char* known[] = {"weighted",        "weighted-shifted", "filtered",
                                  "filtered-linear", "filtered-poisson", "color-global",
                                  "color-independent", "nnls",           "nnls-poisson",
                                  "nnls-exposure",   "nnls-combined",    "ga-poisson",
                                  "photocopy"};
    bool ok = false;
    for (const char* s : known)
        if (scheme == s)
            ok = true;
    if (!ok)
        throw std::invalid_argument("unknown scheme '" + scheme + "'");
    if (count == 0)
        throw std::invalid_argument("scheme '" + scheme + "' needs count > 0");
    if (rows < 8 || cols < 8)
        throw std::invalid_argument("rows/cols must be >= 8");
    const bool wants_photons =
        scheme == "filtered-poisson" || scheme == "nnls-poisson" ||
        scheme == "nnls-combined" || scheme == "ga-poisson";
    if (wants_photons && lambda <= 0.0)
        throw std::invalid_argument("scheme '" + scheme + "' needs lambda > 0");
    const bool wants_jitter = scheme == "nnls-exposure" || scheme == "nnls-combined";
    if (wants_jitter && exposure_sigma <= 0.0)
        throw std::invalid_argument("scheme '" + scheme + "' needs exposure_sigma > 0");
}

namespace {

BasisSpec basis_spec_of(const ExperimentConfig& c)
{
    BasisSpec spec;
    spec.rows = c.rows;
    spec.cols = c.cols;
    spec.count = c.count;
    spec.distribution = distribution_from_string(c.distribution);
    spec.mu = c.mu;
    spec.sigma = c.sigma;
    spec.master_seed = c.seed;
    return spec;
}

Image load_image(const ExperimentConfig& c)
{
    if (!c.image_path.empty())
        return read_image_csv(c.image_path);
    return phantom(c.rows, c.cols, c.phantom_contrast);
}

/// Channels derived from the phantom by flips so each carries the same
/// moments but distinct structure.
ColorImage load_color_image(const ExperimentConfig& c)
{
    const Image base = load_image(c);
    auto flip_h = [&](const Image& src) {
        Image out(src.rows(), src.cols());
        for (int i = 0; i < src.rows(); ++i)
            for (int j = 0; j < src.cols(); ++j)
                out(i, j) = src(i, src.cols() - 1 - j);
        return out;
    };
    auto flip_v = [&](const Image& src) {
        Image out(src.rows(), src.cols());
        for (int i = 0; i < src.rows(); ++i)
            for (int j = 0; j < src.cols(); ++j)
                out(i, j) = src(src.rows() - 1 - i, j);
        return out;
    };
    return ColorImage({base, flip_h(base), flip_v(base)});
}

Image stack_channels(const std::vector<Image>& channels)
{
    const int rows = channels.front().rows();
    const int cols = channels.front().cols();
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(rows) * cols * channels.size());
    for (const auto& ch : channels)
        values.insert(values.end(), ch.values().begin(), ch.values().end());
    return Image(rows * static_cast<int>(channels.size()), cols, std::move(values));
}

struct Artifacts {
    const ExperimentConfig& config;
    std::filesystem::path dir;

    explicit Artifacts(const ExperimentConfig& c) : config(c), dir(c.out_dir)
    {
        std::filesystem::create_directories(dir);
    }

    void write(const ExposurePlan& plan, const Projection& projection,
               const ProjectionReport& rep, KeyValues extra)
    {
        write_image_csv(dir / "projection.csv", projection.values);
        const PgmScale scale = write_image_pgm(dir / "projection.pgm", projection.values);
        write_plan_csv(dir / "plan.csv", plan);

        KeyValues report_kv;
        report_kv.emplace_back("scheme", config.scheme);
        report_kv.emplace_back("snr_simulated", num(rep.snr_global));
        report_kv.emplace_back("pedestal_predicted", num(rep.pedestal_predicted));
        report_kv.emplace_back("pedestal_observed", num(rep.pedestal_observed));
        report_kv.emplace_back("residual_variance", num(rep.residual_variance));
        report_kv.emplace_back("predicted_variance", num(rep.predicted_variance));
        for (auto& e : extra)
            report_kv.push_back(std::move(e));
        write_key_values(dir / "report.kv", report_kv);

        {
            std::ofstream hist(dir / "residual_histogram.csv");
            hist << "bin_lo,bin_hi,count,predicted\n";
            hist.precision(17);
            for (std::size_t b = 0; b < rep.histogram_counts.size(); ++b)
                hist << rep.histogram_edges[b] << ',' << rep.histogram_edges[b + 1] << ','
                     << rep.histogram_counts[b] << ',' << rep.predicted_overlay[b] << '\n';
        }

        KeyValues manifest = config.to_key_values();
        manifest.emplace_back("version", kVersion);
        manifest.emplace_back("pgm_scale_lo", num(scale.lo));
        manifest.emplace_back("pgm_scale_hi", num(scale.hi));
        write_key_values(dir / "manifest.kv", manifest);
    }
};

double cutoff_from_config(const ExperimentConfig& c, const CorrelationStats& stats)
{
    const double x = std::isnan(c.cutoff_x) ? optimal_cutoff_x() : c.cutoff_x;
    return stats.expected + std::sqrt(2.0 * stats.variance) * x;
}

RunResult finish(Artifacts& art, const ExposurePlan& plan, const Projection& proj,
                 const Image& target, double scale, double predicted_snr,
                 double predicted_pedestal, KeyValues extra)
{
    const double e2 = target.second_moment();
    const double predicted_var =
        predicted_snr > 0.0 ? scale * scale * e2 / (predicted_snr * predicted_snr) : 0.0;
    const ProjectionReport rep = report(proj, target, scale, predicted_var,
                                        predicted_pedestal);
    extra.emplace_back("snr_predicted", num(predicted_snr));
    art.write(plan, proj, rep, std::move(extra));

    RunResult res;
    res.predicted_snr = predicted_snr;
    res.simulated_snr = rep.snr_global;
    res.pedestal_predicted = predicted_pedestal;
    res.pedestal_observed = rep.pedestal_observed;
    res.report_path = art.dir / "report.kv";
    return res;
}

} // namespace

RunResult run_experiment(const ExperimentConfig& config)
{
    config.validate();
    set_thread_count(config.threads);
    Artifacts art(config);
    const BasisSpec spec = basis_spec_of(config);
    const DistributionMoments m = moments(spec);

    if (config.scheme == "weighted" || config.scheme == "weighted-shifted") {
        RandomBasis basis(spec);
        const Image image = load_image(config);
        std::optional<ShiftedImage> shift;
        if (config.scheme == "weighted-shifted") {
            if (config.shift_mode == "exact")
                shift = optimal_shift_exact(basis, image);
            else if (config.shift_mode == "fixed" && !std::isnan(config.shift_delta))
                shift = make_shifted(image, config.shift_delta);
            else
                shift = statistical_shift(m, image, spec.count);
        }
        const Image& target = shift ? shift->shifted : image;
        const double predicted = weighted_snr(m, target, spec.count);
        auto [plan, proj] = weighted_projection(basis, image, shift);
        return finish(art, plan, proj, target, 1.0, predicted, plan.pedestal_predicted,
                      {{"delta", num(shift ? shift->delta : 0.0)}});
    }

    if (config.scheme == "filtered" || config.scheme == "filtered-linear" ||
        config.scheme == "filtered-poisson") {
        RandomBasis basis(spec);
        const Image image = load_image(config);
        const CorrelationStats stats = correlation_stats(m, image);
        const std::vector<double> corr = pseudo_correlation(basis, image);

        double cutoff_value;
        if (config.dwell_min > 0.0) {
            const DwellCutoff dw = dwell_constrained_cutoff(
                config.dwell_min, static_cast<double>(spec.count), m, stats);
            cutoff_value = dw.cutoff;
        } else if (config.scheme == "filtered-poisson" && std::isnan(config.cutoff_x)) {
            const double a = cutoff_a(static_cast<double>(spec.count), config.lambda,
                                      spec.pixels(), m.mean, m.variance,
                                      image.second_moment());
            cutoff_value = stats.expected +
                           std::sqrt(2.0 * stats.variance) * solve_optimal_x(a);
        } else {
            cutoff_value = cutoff_from_config(config, stats);
        }
        const FilterSelection sel = filter_basis(corr, stats, cutoff_value);
        write_selection(art.dir / "selection.kv", art.dir / "selection_indices.txt", sel);

        if (config.scheme == "filtered-linear") {
            const double ratio = std::isnan(config.ratio) ? cutoff_value : config.ratio;
            auto [plan, proj] =
                filtered_linear_projection(basis, image, corr, sel, ratio);
            const FilteredSnr pred = filtered_snr(stats, cutoff_value,
                                                  static_cast<double>(spec.count));
            RunResult res = finish(art, plan, proj, image, 1.0, pred.snr,
                                   plan.pedestal_predicted,
                                   {{"n_kept", std::to_string(sel.n_kept)},
                                    {"ratio", num(ratio)}});
            res.n_kept = sel.n_kept;
            return res;
        }

        auto [plan, proj] = filtered_projection(basis, image, sel);
        if (config.scheme == "filtered-poisson") {
            const PoissonFilteredSnr pred = predict_snr_filtered_poisson(
                m, stats, cutoff_value, config.lambda,
                static_cast<double>(sel.n_kept), true);
            NoiseModel model{config.lambda, 0.0, config.seed};
            const Projection noisy = realize(plan, basis, model);
            RunResult res =
                finish(art, plan, noisy, image, config.lambda, pred.snr,
                       config.lambda * plan.pedestal_predicted,
                       {{"n_kept", std::to_string(sel.n_kept)}, {"a", num(pred.a)}});
            res.n_kept = sel.n_kept;
            return res;
        }
        const FilteredSnr pred =
            filtered_snr(stats, cutoff_value, static_cast<double>(sel.n_kept), true);
        RunResult res = finish(art, plan, proj, image, 1.0, pred.snr,
                               plan.pedestal_predicted,
                               {{"n_kept", std::to_string(sel.n_kept)}});
        res.n_kept = sel.n_kept;
        return res;
    }

    if (config.scheme == "color-global" || config.scheme == "color-independent") {
        const ColorImage image = load_color_image(config);
        std::vector<RandomBasis> bases;
        std::vector<const RandomBasis*> ptrs;
        for (int ch = 0; ch < image.channels(); ++ch) {
            BasisSpec s = spec;
            s.master_seed = spec.master_seed + static_cast<std::uint64_t>(ch) * 0x9E3779B9u;
            bases.emplace_back(s);
        }
        for (const auto& b : bases)
            ptrs.push_back(&b);

        const ColorFilterMode mode = config.scheme == "color-global"
                                         ? ColorFilterMode::global
                                         : ColorFilterMode::independent;
        ColorProjectionResult cp = color_projection(ptrs, image, mode);
        write_selection(art.dir / "selection.kv", art.dir / "selection_indices.txt",
                        cp.selection);

        std::vector<Image> proj_channels, img_channels;
        for (int ch = 0; ch < image.channels(); ++ch) {
            proj_channels.push_back(cp.channels[ch].values);
            img_channels.push_back(image.channel(ch));
        }
        Projection stacked;
        stacked.values = stack_channels(proj_channels);
        stacked.pedestal = cp.plan.pedestal_predicted;
        RunResult res = finish(art, cp.plan, stacked, stack_channels(img_channels), 1.0,
                               cp.predicted_snr, cp.plan.pedestal_predicted,
                               {{"n_kept", std::to_string(cp.selection.n_kept)}});
        res.n_kept = cp.selection.n_kept;
        return res;
    }

    if (config.scheme == "nnls" || config.scheme == "nnls-poisson" ||
        config.scheme == "nnls-exposure" || config.scheme == "nnls-combined" ||
        config.scheme == "ga-poisson") {
        RandomBasis basis(spec);
        const Image image = load_image(config).zero_centered_copy();
        const WeightProblem problem = build_design(basis, image);
        NnlsResult sol = nnls(problem);

        if (config.scheme == "nnls") {
            Projection proj;
            proj.values = accumulate_projection(basis, sol.plan);
            proj.pedestal = sol.plan.pedestal_predicted;
            return finish(art, sol.plan, proj, image, 1.0, sol.snr,
                          sol.plan.pedestal_predicted,
                          {{"residual_norm", num(sol.residual_norm)},
                           {"active_count", std::to_string(sol.active_count)}});
        }

        if (config.scheme == "ga-poisson") {
            const GaResult ga =
                gradient_ascent_poisson(problem, config.lambda, sol.plan);
            NoiseModel model{config.lambda, 0.0, config.seed};
            const Projection noisy = realize(ga.plan, basis, model);
            return finish(art, ga.plan, noisy, image, config.lambda, ga.snr,
                          config.lambda * ga.pedestal,
                          {{"nnls_snr_noise_free", num(sol.snr)},
                           {"ga_iterations", std::to_string(ga.iterations)},
                           {"ga_pedestal", num(ga.pedestal)},
                           {"nnls_pedestal", num(sol.plan.pedestal_predicted)}});
        }

        const double lambda = config.scheme == "nnls-exposure" ? 0.0 : config.lambda;
        const double sigma_w = config.scheme == "nnls-poisson" ? 0.0 : config.exposure_sigma;
        const NumericPlanSnr pred =
            predict_snr_numeric(sol.plan, m, image.second_moment(), lambda, sigma_w);
        NoiseModel model{lambda, sigma_w, config.seed};
        const Projection noisy = realize(sol.plan, basis, model);
        const double scale = lambda > 0.0 ? lambda : 1.0;
        return finish(art, sol.plan, noisy, image, scale, pred.snr,
                      scale * sol.plan.pedestal_predicted,
                      {{"poisson_only_snr", num(pred.poisson_only)},
                       {"exposure_only_snr", num(pred.exposure_only)},
                       {"plan_pedestal", num(pred.pedestal)}});
    }

    if (config.scheme == "photocopy") {
        RandomBasis basis(spec);
        const Image object = load_image(config);
        NoiseModel model{config.lambda, config.exposure_sigma, config.seed};
        const SchemeTag tag = config.photocopy_scheme == "weighted"
                                  ? SchemeTag::weighted
                                  : SchemeTag::filtered;
        PhotocopyResult pc = photocopy(basis, object, model, tag);
        KeyValues extra;
        extra.emplace_back("snr_predicted", num(pc.predicted_snr));
        extra.emplace_back("photocopy_scheme", config.photocopy_scheme);
        art.write(pc.plan, pc.projection, pc.report, std::move(extra));
        RunResult res;
        res.predicted_snr = pc.predicted_snr;
        res.simulated_snr = pc.report.snr_global;
        res.pedestal_predicted = pc.report.pedestal_predicted;
        res.pedestal_observed = pc.report.pedestal_observed;
        res.report_path = art.dir / "report.kv";
        return res;
    }

    throw std::invalid_argument("unhandled scheme '" + config.scheme + "'");
}

PhotocopyResult photocopy(const RandomBasis& basis, const Image& object,
                          const NoiseModel& model, SchemeTag scheme)
{
    for (double v : object.values())
        if (v < 0.0 || v > 1.0)
            throw std::invalid_argument("photocopy: object must lie in [0, 1]");

    const auto& spec = basis.spec();
    const DistributionMoments& m = basis.moments();
    // Step 1: bucket measurements — one pseudo-correlation per mask.
    const std::vector<double> buckets = pseudo_correlation(basis, object);
    const CorrelationStats stats = correlation_stats(m, object);

    PhotocopyResult res;
    double predicted_pedestal = 0.0;
    if (scheme == SchemeTag::weighted) {
        // t_k reconstructed from the bucket alone: the bucket is the mask
        // inner product up to the known normalization.
        const double bucket_to_dot =
            static_cast<double>(spec.pixels()) *
            std::sqrt(m.second_moment * object.second_moment());
        const double inv_nvar = 1.0 / (static_cast<double>(spec.count) * m.variance);
        res.plan.weights.reserve(buckets.size());
        for (double c : buckets)
            res.plan.weights.push_back(std::max(0.0, c) * bucket_to_dot * inv_nvar);
        res.plan.scheme = SchemeTag::weighted;
        predicted_pedestal = weighted_pedestal(m, object);
        res.predicted_snr = weighted_snr(m, object, spec.count);
    } else if (scheme == SchemeTag::filtered) {
        const CutoffPlan plan = optimal_cutoff_noiseless(stats);
        const FilterSelection sel = filter_basis(buckets, stats, plan.cutoff);
        const double t = 1.0 / (sel.gamma * static_cast<double>(sel.n_kept));
        res.plan.indices = sel.kept_indices;
        res.plan.weights.assign(sel.n_kept, t);
        res.plan.scheme = SchemeTag::filtered;
        predicted_pedestal = m.mean / sel.gamma;
        res.predicted_snr =
            filtered_snr(stats, plan.cutoff, static_cast<double>(sel.n_kept), true).snr;
    } else {
        throw std::invalid_argument("photocopy: scheme must be weighted or filtered");
    }
    res.plan.pedestal_predicted = predicted_pedestal;

    const bool noisy = model.photons_per_pixel > 0.0 || model.exposure_sigma > 0.0;
    if (noisy) {
        res.projection = realize(res.plan, basis, model);
    } else {
        res.projection.values = accumulate_projection(basis, res.plan);
        res.projection.pedestal = predicted_pedestal;
    }
    const double scale = model.photons_per_pixel > 0.0 ? model.photons_per_pixel : 1.0;
    const double e2 = object.second_moment();
    const double predicted_var =
        res.predicted_snr > 0.0
            ? scale * scale * e2 / (res.predicted_snr * res.predicted_snr)
            : 0.0;
    res.report = report(res.projection, object, scale, predicted_var,
                        scale * predicted_pedestal);
    return res;
}

} // namespace ghostproj
