#include "ghostproj/schemes.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ghostproj/parallel.hpp"
#include "ghostproj/special.hpp"

namespace ghostproj {

std::string to_string(SchemeTag tag)
{
    switch (tag) {
    case SchemeTag::weighted: return "weighted";
    case SchemeTag::weighted_shifted: return "weighted-shifted";
    case SchemeTag::filtered: return "filtered";
    case SchemeTag::filtered_linear: return "filtered-linear";
    case SchemeTag::color_global: return "color-global";
    case SchemeTag::color_independent: return "color-independent";
    case SchemeTag::nnls: return "nnls";
    case SchemeTag::gradient_ascent: return "gradient-ascent";
    }
    return "?";
}

double ExposurePlan::total_exposure() const
{
    double s = 0.0;
    for (double w : weights)
        s += w;
    return s;
}

void ExposurePlan::validate() const
{
    if (!indices.empty() && indices.size() != weights.size())
        throw std::invalid_argument("ExposurePlan: index/weight count mismatch");
    for (double w : weights)
        if (!(w >= 0.0))
            throw std::invalid_argument("ExposurePlan: negative or NaN exposure");
    for (std::size_t i = 1; i < indices.size(); ++i)
        if (indices[i] <= indices[i - 1])
            throw std::invalid_argument("ExposurePlan: indices must be strictly increasing");
}

ShiftedImage make_shifted(const Image& image, double delta)
{
    ShiftedImage s;
    s.original = image;
    s.delta = delta;
    std::vector<double> v = image.values();
    for (double& x : v)
        x -= delta;
    s.shifted = Image(image.rows(), image.cols(), std::move(v));
    return s;
}

namespace {

std::uint64_t plan_index(const ExposurePlan& plan, std::uint64_t entry)
{
    return plan.indices.empty() ? entry : plan.indices[entry];
}

/// Merge per-block partial images in block order with compensated
/// summation, so results do not depend on which thread ran which block.
Image merge_blocks(const std::vector<std::vector<double>>& partials, int rows, int cols)
{
    const std::size_t nm = static_cast<std::size_t>(rows) * cols;
    std::vector<double> sum(nm, 0.0), carry(nm, 0.0);
    for (const auto& part : partials) {
        for (std::size_t p = 0; p < nm; ++p) {
            const double y = part[p] - carry[p];
            const double t = sum[p] + y;
            carry[p] = (t - sum[p]) - y;
            sum[p] = t;
        }
    }
    return Image(rows, cols, std::move(sum));
}

} // namespace

Image accumulate_projection(const RandomBasis& basis, const ExposurePlan& plan)
{
    const auto& spec = basis.spec();
    const long nm = spec.pixels();
    const std::uint64_t entries = plan.weights.size();
    const std::uint64_t blocks = entries == 0 ? 0 : (entries + kMaskBlock - 1) / kMaskBlock;
    std::vector<std::vector<double>> partials(blocks);

    for_each_block(entries, kMaskBlock,
                   [&](std::uint64_t b, std::uint64_t begin, std::uint64_t end) {
                       auto& part = partials[b];
                       part.assign(static_cast<std::size_t>(nm), 0.0);
                       std::vector<double> mask(static_cast<std::size_t>(nm));
                       for (std::uint64_t e = begin; e < end; ++e) {
                           const double w = plan.weights[e];
                           if (w == 0.0)
                               continue;
                           basis.fill_mask(plan_index(plan, e), mask);
                           for (long p = 0; p < nm; ++p)
                               part[p] += w * mask[p];
                       }
                   });
    return merge_blocks(partials, spec.rows, spec.cols);
}

std::vector<std::pair<ExposurePlan, Projection>> weighted_projection_multi(
    const RandomBasis& basis, const Image& image, const std::vector<double>& deltas)
{
    const auto& spec = basis.spec();
    if (spec.rows != image.rows() || spec.cols != image.cols())
        throw std::invalid_argument("weighted_projection: basis/image dimensions disagree");
    if (deltas.empty())
        throw std::invalid_argument("weighted_projection: no shifts given");

    const long nm = spec.pixels();
    const std::uint64_t n = spec.count;
    const double inv_nvar = 1.0 / (static_cast<double>(n) * basis.moments().variance);
    const std::size_t d_count = deltas.size();
    const double* img = image.values().data();

    const std::uint64_t blocks = (n + kMaskBlock - 1) / kMaskBlock;
    // partials[b] holds d_count concatenated nm-pixel partial sums.
    std::vector<std::vector<double>> partials(blocks);
    std::vector<std::vector<double>> weights(d_count);
    for (auto& w : weights)
        w.resize(n);

    std::atomic<std::uint64_t> bad_mask{std::numeric_limits<std::uint64_t>::max()};
    std::atomic<std::size_t> bad_delta{0};

    for_each_block(n, kMaskBlock, [&](std::uint64_t b, std::uint64_t begin, std::uint64_t end) {
        auto& part = partials[b];
        part.assign(static_cast<std::size_t>(nm) * d_count, 0.0);
        std::vector<double> mask(static_cast<std::size_t>(nm));
        for (std::uint64_t k = begin; k < end; ++k) {
            basis.fill_mask(k, mask);
            double dot = 0.0, mask_sum = 0.0;
            for (long p = 0; p < nm; ++p) {
                dot += mask[p] * img[p];
                mask_sum += mask[p];
            }
            for (std::size_t d = 0; d < d_count; ++d) {
                const double t = (dot - deltas[d] * mask_sum) * inv_nvar;
                if (t < 0.0) {
                    std::uint64_t prev = bad_mask.load();
                    while (k < prev && !bad_mask.compare_exchange_weak(prev, k)) {
                    }
                    if (bad_mask.load() == k)
                        bad_delta.store(d);
                    continue;
                }
                weights[d][k] = t;
                double* dst = part.data() + d * nm;
                for (long p = 0; p < nm; ++p)
                    dst[p] += t * mask[p];
            }
        }
    });

    if (bad_mask.load() != std::numeric_limits<std::uint64_t>::max())
        throw std::runtime_error(
            "weighted_projection: negative exposure for mask " +
            std::to_string(bad_mask.load()) + " at shift " +
            std::to_string(deltas[bad_delta.load()]) +
            "; reduce the shift (image must stay above the basis minimum)");

    const auto& m = basis.moments();
    std::vector<std::pair<ExposurePlan, Projection>> out;
    out.reserve(d_count);
    for (std::size_t d = 0; d < d_count; ++d) {
        // View of the per-delta slices as per-block partial images.
        std::vector<std::vector<double>> slices(blocks);
        for (std::uint64_t b = 0; b < blocks; ++b)
            slices[b].assign(partials[b].begin() + static_cast<long>(d * nm),
                             partials[b].begin() + static_cast<long>((d + 1) * nm));

        ExposurePlan plan;
        plan.weights = std::move(weights[d]);
        plan.scheme = deltas[d] == 0.0 ? SchemeTag::weighted : SchemeTag::weighted_shifted;
        const double shifted_mean = image.mean() - deltas[d];
        plan.pedestal_predicted =
            static_cast<double>(nm) * m.mean * m.mean * shifted_mean / m.variance;

        Projection proj;
        proj.values = merge_blocks(slices, spec.rows, spec.cols);
        proj.pedestal = plan.pedestal_predicted;
        out.emplace_back(std::move(plan), std::move(proj));
    }
    return out;
}

std::pair<ExposurePlan, Projection> weighted_projection(
    const RandomBasis& basis, const Image& image, const std::optional<ShiftedImage>& shifted)
{
    const double delta = shifted ? shifted->delta : 0.0;
    auto runs = weighted_projection_multi(basis, image, {delta});
    return std::move(runs.front());
}

ShiftedImage optimal_shift_exact(const RandomBasis& basis, const Image& image)
{
    const auto& spec = basis.spec();
    if (spec.rows != image.rows() || spec.cols != image.cols())
        throw std::invalid_argument("optimal_shift_exact: dimensions disagree");
    if (spec.count < 2)
        throw std::invalid_argument("optimal_shift_exact: needs N >= 2");

    const long nm = spec.pixels();
    const double* img = image.values().data();
    const std::uint64_t blocks = (spec.count + kMaskBlock - 1) / kMaskBlock;
    std::vector<double> block_min(blocks, std::numeric_limits<double>::infinity());

    for_each_block(spec.count, kMaskBlock,
                   [&](std::uint64_t b, std::uint64_t begin, std::uint64_t end) {
                       std::vector<double> mask(static_cast<std::size_t>(nm));
                       double lo = std::numeric_limits<double>::infinity();
                       for (std::uint64_t k = begin; k < end; ++k) {
                           basis.fill_mask(k, mask);
                           double dot = 0.0, mask_sum = 0.0;
                           for (long p = 0; p < nm; ++p) {
                               dot += mask[p] * img[p];
                               mask_sum += mask[p];
                           }
                           if (mask_sum > 0.0)
                               lo = std::min(lo, dot / mask_sum);
                       }
                       block_min[b] = lo;
                   });
    double delta = std::numeric_limits<double>::infinity();
    for (double lo : block_min)
        delta = std::min(delta, lo);
    if (!std::isfinite(delta))
        throw std::runtime_error("optimal_shift_exact: all masks sum to zero");
    return make_shifted(image, delta);
}

double confidence_sigmas(std::uint64_t n)
{
    if (n < 2)
        throw std::invalid_argument("confidence_sigmas: needs N >= 2");
    return std::sqrt(2.0) * erfc_inv(1.0 / static_cast<double>(n));
}

ShiftedImage statistical_shift(const DistributionMoments& m, const Image& image,
                               std::uint64_t n)
{
    const double s = confidence_sigmas(n);
    const double delta =
        image.mean() - s * std::sqrt(image.second_moment() * m.variance /
                                     (static_cast<double>(image.pixels()) * m.mean * m.mean));
    return make_shifted(image, delta);
}

double weighted_snr(const DistributionMoments& m, const Image& image, std::uint64_t n)
{
    const double mean = image.mean();
    if (image.zero_centered())
        throw std::invalid_argument(
            "weighted_snr: formula undefined for zero-mean image; use the shifted image mean");
    return std::sqrt(image.second_moment() * static_cast<double>(n) * m.variance) /
           (static_cast<double>(image.pixels()) * m.mean * mean);
}

double weighted_basis_size(const DistributionMoments& m, const Image& image,
                           double target_snr)
{
    const double mean = image.mean();
    if (image.zero_centered())
        throw std::invalid_argument("weighted_basis_size: zero-mean image");
    const double nm = static_cast<double>(image.pixels());
    return target_snr * target_snr * nm * nm * m.mean * m.mean * mean * mean /
           (m.variance * image.second_moment());
}

double weighted_pedestal(const DistributionMoments& m, const Image& image)
{
    return static_cast<double>(image.pixels()) * m.mean * m.mean * image.mean() / m.variance;
}

std::pair<ExposurePlan, Projection> filtered_projection(const RandomBasis& basis,
                                                        const Image& image,
                                                        const FilterSelection& selection)
{
    if (selection.n_kept == 0)
        throw std::invalid_argument("filtered_projection: empty selection");
    if (selection.gamma <= 0.0)
        throw std::runtime_error("filtered_projection: filtered set not positively skewed");
    if (basis.spec().rows != image.rows() || basis.spec().cols != image.cols())
        throw std::invalid_argument("filtered_projection: dimensions disagree");

    const double t = 1.0 / (selection.gamma * static_cast<double>(selection.n_kept));
    ExposurePlan plan;
    plan.indices = selection.kept_indices;
    plan.weights.assign(selection.n_kept, t);
    plan.scheme = SchemeTag::filtered;
    plan.pedestal_predicted = basis.moments().mean / selection.gamma;

    Projection proj;
    proj.values = accumulate_projection(basis, plan);
    proj.pedestal = plan.pedestal_predicted;
    return {std::move(plan), std::move(proj)};
}

FilteredSnr filtered_snr(const CorrelationStats& stats, double cutoff, double n,
                         bool n_is_kept)
{
    FilteredSnr r;
    const double x = (cutoff - stats.expected) / std::sqrt(2.0 * stats.variance);
    r.kept_fraction = kept_fraction(x);
    if (r.kept_fraction <= 0.0)
        throw std::invalid_argument("filtered_snr: cutoff keeps nothing");
    r.xi = std::exp(-x * x) / (std::sqrt(2.0 * M_PI) * r.kept_fraction);
    r.n_kept_expected = n_is_kept ? n : r.kept_fraction * n;
    const double n_total = n_is_kept ? n / r.kept_fraction : n;
    const double cnm = static_cast<double>(stats.nm) * stats.channel_count;
    r.snr = std::sqrt(r.n_kept_expected / cnm) * r.xi;
    r.uncertainty_product = r.snr * r.snr * cnm / n_total;
    return r;
}

double optimal_cutoff_x()
{
    // Pade-approximant solution of the noiseless cutoff optimum.
    const double pi = M_PI;
    return 3.0 * std::sqrt(pi) * (4.0 * pi - 7.0) /
           (4.0 * (6.0 * pi * pi - 15.0 * pi + 5.0));
}

CutoffPlan optimal_cutoff_noiseless(const CorrelationStats& stats)
{
    CutoffPlan p;
    p.x = optimal_cutoff_x();
    p.cutoff = stats.expected + std::sqrt(2.0 * stats.variance) * p.x;
    p.kept_fraction = kept_fraction(p.x);
    p.xi = std::exp(-p.x * p.x) / (std::sqrt(2.0 * M_PI) * p.kept_fraction);
    p.variance_prefactor = p.kept_fraction * std::exp(2.0 * p.x * p.x);
    return p;
}

BasisSizePlan basis_size_estimate(double target_snr, long nm, double s, double x)
{
    if (target_snr <= 0.0)
        throw std::invalid_argument("basis_size_estimate: target SNR must be > 0");
    BasisSizePlan p;
    p.target_snr = target_snr;
    p.nm = nm;
    p.confidence_sigmas = s;
    p.kept_fraction = kept_fraction(x);
    p.xi = std::exp(-x * x) / (std::sqrt(2.0 * M_PI) * p.kept_fraction);
    const double dnm = static_cast<double>(nm);
    p.n_mean_term = target_snr * target_snr * dnm / (p.kept_fraction * p.xi * p.xi);
    p.n_surcharge_term =
        s * target_snr / (p.kept_fraction * p.xi) * std::sqrt(dnm * (1.0 - p.kept_fraction));
    p.n_required = p.n_mean_term + p.n_surcharge_term;
    return p;
}

DwellCutoff dwell_constrained_cutoff(double t_min, double n, const DistributionMoments& m,
                                     const CorrelationStats& stats)
{
    const double arg = t_min * n * std::sqrt(stats.mask_second_moment /
                                             stats.image_second_moment) *
                       std::sqrt(stats.variance / (2.0 * M_PI));
    if (arg <= 1.0)
        throw std::runtime_error("dwell_constrained_cutoff: dwell constraint inactive; "
                                 "use the optimal cutoff");
    DwellCutoff d;
    d.x = std::sqrt(std::log(arg));
    d.cutoff = stats.expected + std::sqrt(2.0 * stats.variance) * d.x;
    // The selected (surviving) fraction; the remaining 1-f is discarded.
    d.kept_fraction = kept_fraction(d.x);
    const double gamma = std::sqrt(m.variance / (2.0 * M_PI * stats.nm *
                                                 stats.image_second_moment)) *
                         std::exp(-d.x * d.x) / d.kept_fraction;
    d.predicted_snr = std::sqrt(stats.image_second_moment * gamma / (t_min * m.variance));
    d.exposure = 1.0 / (gamma * d.kept_fraction * n);
    return d;
}

std::pair<ExposurePlan, Projection> filtered_linear_projection(
    const RandomBasis& basis, const Image& image, const std::vector<double>& correlations,
    const FilterSelection& selection, double ratio)
{
    if (!image.zero_centered())
        throw std::invalid_argument("filtered_linear_projection: image must be zero-centered");
    if (selection.n_kept == 0)
        throw std::invalid_argument("filtered_linear_projection: empty selection");

    double c1 = 0.0, c2 = 0.0;
    for (std::uint64_t k : selection.kept_indices) {
        c1 += correlations[k];
        c2 += correlations[k] * correlations[k];
    }
    const double n_kept = static_cast<double>(selection.n_kept);
    c1 /= n_kept;
    c2 /= n_kept;
    const double denom = c2 - ratio * c1;
    if (denom <= 0.0)
        throw std::runtime_error("filtered_linear_projection: non-positive weight scale "
                                 "(ratio too large for this selection)");

    const auto& m = basis.moments();
    const double units = std::sqrt(image.second_moment() / m.second_moment);
    const double scale = units / (n_kept * denom);

    ExposurePlan plan;
    plan.indices = selection.kept_indices;
    plan.weights.reserve(selection.n_kept);
    for (std::uint64_t k : selection.kept_indices) {
        const double t = (correlations[k] - ratio) * scale;
        if (t < 0.0)
            throw std::runtime_error("filtered_linear_projection: negative exposure for mask " +
                                     std::to_string(k) + "; lower the ratio");
        plan.weights.push_back(t);
    }
    plan.scheme = SchemeTag::filtered_linear;
    plan.pedestal_predicted = m.mean * (c1 - ratio) * units / denom;

    Projection proj;
    proj.values = accumulate_projection(basis, plan);
    proj.pedestal = plan.pedestal_predicted;
    return {std::move(plan), std::move(proj)};
}

ColorProjectionResult color_projection(const std::vector<const RandomBasis*>& bases,
                                       const ColorImage& image, ColorFilterMode mode)
{
    if (bases.empty())
        throw std::invalid_argument("color_projection: no channel bases");
    const int c = image.channels();
    const auto& m = bases.front()->moments();
    const CorrelationStats stats = correlation_stats(m, image);
    const std::vector<double> global = color_pseudo_correlation(bases, image);

    ColorProjectionResult res;
    if (mode == ColorFilterMode::global) {
        const CutoffPlan plan = optimal_cutoff_noiseless(stats);
        res.selection = filter_basis(global, stats, plan.cutoff);
    } else {
        // Keep masks positively correlated (above the expected value) in
        // every channel independently.
        std::vector<std::vector<std::uint64_t>> kept_per_channel(c);
        for (int ch = 0; ch < c; ++ch) {
            const CorrelationStats cs = correlation_stats(m, image.channel(ch));
            const auto corr = pseudo_correlation(*bases[ch], image.channel(ch));
            for (std::uint64_t k = 0; k < corr.size(); ++k)
                if (corr[k] >= cs.expected)
                    kept_per_channel[ch].push_back(k);
        }
        std::vector<std::uint64_t> kept = kept_per_channel[0];
        for (int ch = 1; ch < c; ++ch) {
            std::vector<std::uint64_t> merged;
            std::set_intersection(kept.begin(), kept.end(), kept_per_channel[ch].begin(),
                                  kept_per_channel[ch].end(), std::back_inserter(merged));
            kept.swap(merged);
        }
        if (kept.empty())
            throw std::runtime_error("color_projection: no masks survive independent filter");

        FilterSelection sel;
        sel.kept_indices = std::move(kept);
        sel.n_kept = sel.kept_indices.size();
        sel.kept_fraction = std::pow(0.5, c); // expected fraction, independence assumption
        sel.x = erfc_inv(2.0 * sel.kept_fraction);
        sel.xi = std::exp(-sel.x * sel.x) / (std::sqrt(2.0 * M_PI) * sel.kept_fraction);
        sel.cutoff = std::numeric_limits<double>::quiet_NaN();
        double sum = 0.0;
        for (std::uint64_t k : sel.kept_indices)
            sum += global[k];
        sel.kept_mean_empirical = sum / static_cast<double>(sel.n_kept);
        sel.kept_mean_analytic =
            stats.expected + std::sqrt(2.0 * stats.variance / M_PI) *
                                 std::exp(-sel.x * sel.x) / std::erfc(sel.x);
        const double units = std::sqrt(stats.mask_second_moment / stats.image_second_moment);
        sel.gamma = (sel.kept_mean_empirical - stats.expected) * units;
        sel.gamma_analytic = (sel.kept_mean_analytic - stats.expected) * units;
        res.selection = std::move(sel);
    }

    const auto& sel = res.selection;
    if (sel.gamma <= 0.0)
        throw std::runtime_error("color_projection: filtered set not positively skewed");

    const double t = 1.0 / (sel.gamma * static_cast<double>(sel.n_kept));
    res.plan.indices = sel.kept_indices;
    res.plan.weights.assign(sel.n_kept, t);
    res.plan.scheme = mode == ColorFilterMode::global ? SchemeTag::color_global
                                                      : SchemeTag::color_independent;
    res.plan.pedestal_predicted = m.mean / sel.gamma;

    res.channels.reserve(c);
    for (int ch = 0; ch < c; ++ch) {
        Projection proj;
        proj.values = accumulate_projection(*bases[ch], res.plan);
        proj.pedestal = res.plan.pedestal_predicted;
        res.channels.push_back(std::move(proj));
    }

    // Planner uses the analytic skew for the global filter; the independent
    // filter's best-case estimate is known to overshoot, so its prediction
    // uses the realized kept-set mean (as the comparison in the source
    // analysis does).
    const double gamma_pred =
        mode == ColorFilterMode::global ? sel.gamma_analytic : sel.gamma;
    res.predicted_snr = std::sqrt(stats.image_second_moment * gamma_pred * gamma_pred *
                                  static_cast<double>(sel.n_kept) / m.variance);
    return res;
}

double filtered_pixel_variance(const RandomBasis& basis, const FilterSelection& selection)
{
    const long nm = basis.spec().pixels();
    std::vector<double> sum(static_cast<std::size_t>(nm), 0.0);
    std::vector<double> sum2(static_cast<std::size_t>(nm), 0.0);
    std::vector<double> mask(static_cast<std::size_t>(nm));
    for (std::uint64_t k : selection.kept_indices) {
        basis.fill_mask(k, mask);
        for (long p = 0; p < nm; ++p) {
            sum[p] += mask[p];
            sum2[p] += mask[p] * mask[p];
        }
    }
    const double n = static_cast<double>(selection.n_kept);
    double acc = 0.0;
    for (long p = 0; p < nm; ++p) {
        const double mean = sum[p] / n;
        acc += sum2[p] / n - mean * mean;
    }
    return acc / static_cast<double>(nm);
}

} // namespace ghostproj
