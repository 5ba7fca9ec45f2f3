#include "ghostproj/noise.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "ghostproj/parallel.hpp"
#include "ghostproj/rng.hpp"
#include "ghostproj/special.hpp"

namespace ghostproj {

void NoiseModel::validate() const
{
    if (photons_per_pixel < 0.0 || exposure_sigma < 0.0)
        throw std::invalid_argument("NoiseModel: lambda and sigma_w must be >= 0");
}

namespace {

std::uint64_t entry_index(const ExposurePlan& plan, std::uint64_t e)
{
    return plan.indices.empty() ? e : plan.indices[e];
}

} // namespace

Projection realize(const ExposurePlan& plan, const RandomBasis& basis,
                   const NoiseModel& model, std::uint64_t* truncated_draws)
{
    model.validate();
    plan.validate();
    const auto& spec = basis.spec();
    const long nm = spec.pixels();
    const double lambda = model.photons_per_pixel;
    const double sigma = model.exposure_sigma;
    const std::uint64_t entries = plan.weights.size();
    const std::uint64_t blocks = entries == 0 ? 0 : (entries + kMaskBlock - 1) / kMaskBlock;

    std::vector<std::vector<double>> partials(blocks);
    std::atomic<std::uint64_t> truncated{0};

    for_each_block(entries, kMaskBlock, [&](std::uint64_t b, std::uint64_t begin,
                                            std::uint64_t end) {
        auto& part = partials[b];
        part.assign(static_cast<std::size_t>(nm), 0.0);
        std::vector<double> mask(static_cast<std::size_t>(nm));
        for (std::uint64_t e = begin; e < end; ++e) {
            const std::uint64_t k = entry_index(plan, e);
            double w = plan.weights[e];
            // Zero-weight masks are never exposed, so they see no shutter
            // jitter; only the N' active exposures carry timing noise.
            if (sigma > 0.0 && w > 0.0) {
                if (w / sigma < 4.0)
                    truncated.fetch_add(1);
                CounterStream g(model.seed, RngStream::exposure, k);
                w += sigma * g.next_gaussian();
                if (w < 0.0)
                    w = 0.0; // a shutter cannot open for negative time
            }
            if (w == 0.0)
                continue;
            basis.fill_mask(k, mask);
            if (lambda > 0.0) {
                for (long p = 0; p < nm; ++p) {
                    const double mean = lambda * w * mask[p];
                    if (mean == 0.0)
                        continue;
                    CounterStream g(model.seed, RngStream::poisson, k,
                                    static_cast<std::uint32_t>(p));
                    part[p] += static_cast<double>(g.next_poisson(mean));
                }
            } else {
                for (long p = 0; p < nm; ++p)
                    part[p] += w * mask[p];
            }
        }
    });

    if (truncated_draws)
        *truncated_draws = truncated.load();

    std::vector<double> sum(static_cast<std::size_t>(nm), 0.0);
    for (const auto& part : partials)
        for (long p = 0; p < nm; ++p)
            sum[p] += part[p];

    Projection proj;
    proj.values = Image(spec.rows, spec.cols, std::move(sum));
    proj.pedestal = (lambda > 0.0 ? lambda : 1.0) * plan.pedestal_predicted;
    proj.realization_seed = model.seed;
    return proj;
}

PoissonFilteredSnr predict_snr_filtered_poisson(const DistributionMoments& m,
                                                const CorrelationStats& stats, double cutoff,
                                                double lambda, double n, bool n_is_kept)
{
    if (lambda <= 0.0)
        throw std::invalid_argument("predict_snr_filtered_poisson: lambda must be > 0");
    const double x = (cutoff - stats.expected) / std::sqrt(2.0 * stats.variance);
    const double f = kept_fraction(x);
    const double nm = static_cast<double>(stats.nm);
    const double e2 = stats.image_second_moment;

    PoissonFilteredSnr r;
    r.n_kept = n_is_kept ? n : f * n;
    const double n_total = n_is_kept ? n / f : n;
    r.a = (n_total / lambda) * m.mean / std::sqrt(2.0 * M_PI * nm * m.variance * e2);
    r.gamma = std::sqrt(m.variance / (2.0 * M_PI * nm * e2)) * std::exp(-x * x) / f;
    r.snr = std::sqrt(r.n_kept * lambda * r.gamma * r.gamma * e2 /
                      (lambda * m.variance + r.gamma * r.n_kept * m.mean));
    r.basis_rich_limit = std::sqrt(lambda * r.gamma * e2 / m.mean);
    r.photon_rich_limit =
        std::sqrt(r.n_kept * r.gamma * r.gamma * e2 / m.variance);
    return r;
}

NumericPlanSnr predict_snr_numeric(const ExposurePlan& plan, const DistributionMoments& m,
                                   double image_second_moment, double lambda, double sigma_w)
{
    double w_sum = 0.0;
    double n_active = 0.0;
    for (double w : plan.weights)
        if (w > 0.0) {
            w_sum += w;
            n_active += 1.0;
        }
    if (n_active == 0.0)
        throw std::invalid_argument("predict_snr_numeric: plan has no active weights");

    NumericPlanSnr r;
    r.n_active = n_active;
    r.pedestal = w_sum * m.mean; // N' E[w] E[R]
    const double exposure_term = n_active * sigma_w * sigma_w * m.variance;

    r.poisson_only = lambda > 0.0
                         ? std::sqrt(lambda * image_second_moment / r.pedestal)
                         : std::numeric_limits<double>::infinity();
    r.exposure_only = sigma_w > 0.0
                          ? std::sqrt(image_second_moment / exposure_term)
                          : std::numeric_limits<double>::infinity();

    if (lambda > 0.0)
        r.snr = std::sqrt(lambda * image_second_moment /
                          (exposure_term * lambda + r.pedestal));
    else
        r.snr = r.exposure_only;
    return r;
}

Image variance_map_imperfect_poisson(const ExposurePlan& plan, const RandomBasis& basis,
                                     const Image& image, double lambda)
{
    const Image accum = accumulate_projection(basis, plan);
    const double pedestal = accum.mean() - image.mean();
    const long nm = accum.pixels();
    std::vector<double> map(static_cast<std::size_t>(nm));
    const auto& a = accum.values();
    const auto& img = image.values();
    for (long p = 0; p < nm; ++p) {
        const double resid = a[p] - img[p] - pedestal;
        map[p] = lambda * lambda * resid * resid + lambda * a[p];
    }
    return Image(accum.rows(), accum.cols(), std::move(map));
}

DirectBaseline direct_projection_baseline(const Image& image, double lambda)
{
    if (lambda < 0.0)
        throw std::invalid_argument("direct_projection_baseline: lambda must be >= 0");
    std::vector<double> snr(image.values().size());
    for (std::size_t p = 0; p < snr.size(); ++p) {
        const double v = image.values()[p];
        if (v < 0.0 || v > 1.0)
            throw std::invalid_argument(
                "direct_projection_baseline: image values must lie in [0, 1]");
        snr[p] = std::sqrt(lambda * v);
    }
    DirectBaseline b;
    b.pixel_snr = Image(image.rows(), image.cols(), std::move(snr));
    b.global = std::sqrt(lambda * image.mean());
    b.zero_centered_bound = std::sqrt(lambda);
    return b;
}

} // namespace ghostproj
