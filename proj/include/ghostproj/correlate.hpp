#pragma once

#include <cstdint>
#include <vector>

#include "ghostproj/basis.hpp"
#include "ghostproj/image.hpp"

namespace ghostproj {

/// Gaussian model of the pseudo-correlation distribution, plus the two
/// second moments needed to convert correlation offsets into image units.
struct CorrelationStats {
    double expected = 0.0;           // E[C]
    double variance = 0.0;           // Var[C] = Var[R]/(c nm E[R^2])
    int channel_count = 1;           // c
    double mask_second_moment = 0.0; // E[R^2]
    double image_second_moment = 0.0; // E[I^2], channel-pooled for color
    long nm = 0;
};

CorrelationStats correlation_stats(const DistributionMoments& m, const Image& image);
CorrelationStats correlation_stats(const DistributionMoments& m, const ColorImage& image);

/// C_k = R_ijk I^ij / (nm sqrt(E[R^2] E[I^2])) for every mask in the basis.
std::vector<double> pseudo_correlation(const RandomBasis& basis, const Image& image);

/// Global color pseudo-correlation: channel-summed inner products over a
/// per-channel basis, normalized with channel-pooled moments. bases[c] and
/// image.channel(c) pair up; with c=1 this reduces to pseudo_correlation.
std::vector<double> color_pseudo_correlation(const std::vector<const RandomBasis*>& bases,
                                             const ColorImage& image);

/// Per-channel pseudo-correlations (one sequence per channel), used by the
/// independently-filtered color scheme.
std::vector<std::vector<double>> channel_pseudo_correlations(
    const std::vector<const RandomBasis*>& bases, const ColorImage& image);

struct TrueCorrelationResult {
    std::vector<double> exact;  // R.I / sqrt((R.R)(I.I))
    std::vector<double> taylor; // first-order expansion about E[R^2]
};

TrueCorrelationResult true_correlation(const RandomBasis& basis, const Image& image);

/// Expected mean correction E[C~] - E[C] of the first-order expansion:
/// -E[I](E[R^3] - E[R^2]E[R]) / (2 nm sqrt(E[I^2] E[R^2]^3)).
double true_correlation_mean_correction(const DistributionMoments& m, double mask_third_moment,
                                        const Image& image);

struct FilterSelection {
    double cutoff = 0.0;        // C_min
    double x = 0.0;             // (C_min - E[C]) / sqrt(2 Var[C])
    double kept_fraction = 0.0; // analytic f = erfc(X)/2
    std::vector<std::uint64_t> kept_indices;
    std::uint64_t n_kept = 0;

    double kept_mean_empirical = 0.0;  // E[C'] over the surviving C_k
    double kept_mean_analytic = 0.0;   // erfc closed form
    double gamma = 0.0;                // skew from the empirical E[C']
    double gamma_analytic = 0.0;       // skew from the analytic E[C']
    double xi = 0.0;                   // exp(-X^2) / (sqrt(2 pi) f)
};

/// Keep every k with C_k >= C_min (ties kept). Reports both the empirical
/// and analytic filtered mean: projections use the former, planners the
/// latter.
FilterSelection filter_basis(const std::vector<double>& correlations,
                             const CorrelationStats& stats, double cutoff);

/// Analytic filtered mean E[C'] = E[C] + sqrt(2 Var[C]/pi) exp(-X^2)/erfc(X).
double expected_filtered_correlation(const CorrelationStats& stats, double cutoff);

} // namespace ghostproj
