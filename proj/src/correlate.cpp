#include "ghostproj/correlate.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>

#include "ghostproj/parallel.hpp"
#include "ghostproj/special.hpp"

namespace ghostproj {

namespace {

CorrelationStats make_stats(const DistributionMoments& m, double image_mean,
                            double image_e2, long nm, int channels)
{
    if (image_e2 <= 0.0)
        throw std::invalid_argument("correlation_stats: degenerate image (E[I^2] = 0)");
    CorrelationStats s;
    s.channel_count = channels;
    s.mask_second_moment = m.second_moment;
    s.image_second_moment = image_e2;
    s.nm = nm;
    s.expected = m.mean * image_mean / std::sqrt(m.second_moment * image_e2);
    s.variance = m.variance / (channels * static_cast<double>(nm) * m.second_moment);
    return s;
}

} // namespace

CorrelationStats correlation_stats(const DistributionMoments& m, const Image& image)
{
    return make_stats(m, image.mean(), image.second_moment(), image.pixels(), 1);
}

CorrelationStats correlation_stats(const DistributionMoments& m, const ColorImage& image)
{
    return make_stats(m, image.mean(), image.second_moment(),
                      static_cast<long>(image.rows()) * image.cols(), image.channels());
}

std::vector<double> pseudo_correlation(const RandomBasis& basis, const Image& image)
{
    const auto& spec = basis.spec();
    if (spec.rows != image.rows() || spec.cols != image.cols())
        throw std::invalid_argument("pseudo_correlation: basis/image dimensions disagree");
    const double e2 = image.second_moment();
    if (e2 <= 0.0)
        throw std::invalid_argument("pseudo_correlation: degenerate image (E[I^2] = 0)");

    const long nm = spec.pixels();
    const double norm = 1.0 / (static_cast<double>(nm) *
                               std::sqrt(basis.moments().second_moment * e2));
    const double* img = image.values().data();

    std::vector<double> out(spec.count);
    for_each_block(spec.count, kMaskBlock,
                   [&](std::uint64_t, std::uint64_t begin, std::uint64_t end) {
                       std::vector<double> mask(static_cast<std::size_t>(nm));
                       for (std::uint64_t k = begin; k < end; ++k) {
                           basis.fill_mask(k, mask);
                           double dot = 0.0;
                           for (long p = 0; p < nm; ++p)
                               dot += mask[p] * img[p];
                           out[k] = dot * norm;
                       }
                   });
    return out;
}

std::vector<double> color_pseudo_correlation(const std::vector<const RandomBasis*>& bases,
                                             const ColorImage& image)
{
    const int c = image.channels();
    if (static_cast<int>(bases.size()) != c)
        throw std::invalid_argument("color_pseudo_correlation: basis/channel count mismatch");
    for (const auto* b : bases) {
        if (b->spec().rows != image.rows() || b->spec().cols != image.cols())
            throw std::invalid_argument("color_pseudo_correlation: dimensions disagree");
        if (b->spec().count != bases.front()->spec().count)
            throw std::invalid_argument("color_pseudo_correlation: mask counts disagree");
    }
    const double e2 = image.second_moment();
    if (e2 <= 0.0)
        throw std::invalid_argument("color_pseudo_correlation: degenerate image");

    const long nm = static_cast<long>(image.rows()) * image.cols();
    const double norm =
        1.0 / (c * static_cast<double>(nm) *
               std::sqrt(bases.front()->moments().second_moment * e2));
    const std::uint64_t count = bases.front()->spec().count;

    std::vector<double> out(count);
    for_each_block(count, kMaskBlock,
                   [&](std::uint64_t, std::uint64_t begin, std::uint64_t end) {
                       std::vector<double> mask(static_cast<std::size_t>(nm));
                       for (std::uint64_t k = begin; k < end; ++k) {
                           double dot = 0.0;
                           for (int ch = 0; ch < c; ++ch) {
                               bases[ch]->fill_mask(k, mask);
                               const double* img = image.channel(ch).values().data();
                               for (long p = 0; p < nm; ++p)
                                   dot += mask[p] * img[p];
                           }
                           out[k] = dot * norm;
                       }
                   });
    return out;
}

std::vector<std::vector<double>> channel_pseudo_correlations(
    const std::vector<const RandomBasis*>& bases, const ColorImage& image)
{
    if (static_cast<int>(bases.size()) != image.channels())
        throw std::invalid_argument("channel_pseudo_correlations: channel count mismatch");
    std::vector<std::vector<double>> out;
    out.reserve(bases.size());
    for (int ch = 0; ch < image.channels(); ++ch)
        out.push_back(pseudo_correlation(*bases[ch], image.channel(ch)));
    return out;
}

TrueCorrelationResult true_correlation(const RandomBasis& basis, const Image& image)
{
    const auto& spec = basis.spec();
    if (spec.rows != image.rows() || spec.cols != image.cols())
        throw std::invalid_argument("true_correlation: basis/image dimensions disagree");
    const long nm = spec.pixels();
    const double e2 = image.second_moment();
    if (e2 <= 0.0)
        throw std::invalid_argument("true_correlation: degenerate image");
    const double sum_i2 = e2 * nm;
    const double er2 = basis.moments().second_moment;
    const double taylor_norm = 1.0 / (2.0 * static_cast<double>(nm) * nm *
                                      std::sqrt(e2 * er2 * er2 * er2));
    const double pseudo_norm = 1.0 / (static_cast<double>(nm) * std::sqrt(er2 * e2));
    const double* img = image.values().data();

    TrueCorrelationResult res;
    res.exact.resize(spec.count);
    res.taylor.resize(spec.count);
    std::atomic<bool> zero_norm{false};
    for_each_block(spec.count, kMaskBlock,
                   [&](std::uint64_t, std::uint64_t begin, std::uint64_t end) {
                       std::vector<double> mask(static_cast<std::size_t>(nm));
                       for (std::uint64_t k = begin; k < end; ++k) {
                           basis.fill_mask(k, mask);
                           double dot = 0.0, sum_r2 = 0.0;
                           for (long p = 0; p < nm; ++p) {
                               dot += mask[p] * img[p];
                               sum_r2 += mask[p] * mask[p];
                           }
                           if (sum_r2 <= 0.0) {
                               zero_norm.store(true);
                               continue;
                           }
                           res.exact[k] = dot / std::sqrt(sum_r2 * sum_i2);
                           const double c = dot * pseudo_norm;
                           res.taylor[k] = 1.5 * c - dot * sum_r2 * taylor_norm;
                       }
                   });
    if (zero_norm.load())
        throw std::runtime_error("true_correlation: zero-norm mask");
    return res;
}

double true_correlation_mean_correction(const DistributionMoments& m, double mask_third_moment,
                                        const Image& image)
{
    const double er2 = m.second_moment;
    return -image.mean() * (mask_third_moment - er2 * m.mean) /
           (2.0 * static_cast<double>(image.pixels()) *
            std::sqrt(image.second_moment() * er2 * er2 * er2));
}

double expected_filtered_correlation(const CorrelationStats& stats, double cutoff)
{
    if (stats.variance <= 0.0)
        throw std::invalid_argument("expected_filtered_correlation: Var[C] must be > 0");
    const double x = (cutoff - stats.expected) / std::sqrt(2.0 * stats.variance);
    if (x > 6.0)
        throw std::invalid_argument("expected_filtered_correlation: cutoff too extreme");
    return stats.expected +
           std::sqrt(2.0 * stats.variance / M_PI) * std::exp(-x * x) / std::erfc(x);
}

FilterSelection filter_basis(const std::vector<double>& correlations,
                             const CorrelationStats& stats, double cutoff)
{
    if (!std::isfinite(cutoff))
        throw std::invalid_argument("filter_basis: cutoff must be finite");

    FilterSelection sel;
    sel.cutoff = cutoff;
    sel.x = (cutoff - stats.expected) / std::sqrt(2.0 * stats.variance);
    sel.kept_fraction = kept_fraction(sel.x);

    double kept_sum = 0.0;
    for (std::uint64_t k = 0; k < correlations.size(); ++k) {
        if (correlations[k] >= cutoff) {
            sel.kept_indices.push_back(k);
            kept_sum += correlations[k];
        }
    }
    sel.n_kept = sel.kept_indices.size();
    if (sel.n_kept == 0)
        throw std::runtime_error("filter_basis: no masks survive cutoff");

    sel.kept_mean_empirical = kept_sum / static_cast<double>(sel.n_kept);
    sel.kept_mean_analytic = expected_filtered_correlation(stats, cutoff);
    const double units = std::sqrt(stats.mask_second_moment / stats.image_second_moment);
    sel.gamma = (sel.kept_mean_empirical - stats.expected) * units;
    sel.gamma_analytic = (sel.kept_mean_analytic - stats.expected) * units;
    sel.xi = std::exp(-sel.x * sel.x) / (std::sqrt(2.0 * M_PI) * sel.kept_fraction);
    return sel;
}

} // namespace ghostproj
