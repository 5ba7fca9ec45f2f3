#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ghostproj/basis.hpp"
#include "ghostproj/correlate.hpp"
#include "ghostproj/image.hpp"

namespace ghostproj {

enum class SchemeTag {
    weighted,
    weighted_shifted,
    filtered,
    filtered_linear,
    color_global,
    color_independent,
    nnls,
    gradient_ascent,
};

std::string to_string(SchemeTag tag);

/// Non-negative exposures paired with mask indices. For uniform-exposure
/// schemes every weight is the same value; weights.size() == indices.size().
struct ExposurePlan {
    std::vector<std::uint64_t> indices;
    std::vector<double> weights;
    double pedestal_predicted = 0.0;
    SchemeTag scheme = SchemeTag::weighted;

    std::uint64_t size() const noexcept { return indices.size(); }
    double total_exposure() const;
    void validate() const; // non-negative weights, unique sorted indices
};

/// Accumulated projection P_ij with its predicted pedestal.
struct Projection {
    Image values;
    double pedestal = 0.0;
    std::uint64_t realization_seed = 0;
};

struct ShiftedImage {
    Image original;
    double delta = 0.0;
    Image shifted; // original - delta
};

ShiftedImage make_shifted(const Image& image, double delta);

/// ---- Weighted scheme -------------------------------------------------

/// t_k = R_k . I' / (N Var[R]); P = sum_k t_k R_k -> I' + nm E[R]^2 E[I'] / Var[R].
/// Streaming: each mask is generated once and discarded. Throws on the
/// first negative exposure, naming the offending mask (shift further).
std::pair<ExposurePlan, Projection> weighted_projection(
    const RandomBasis& basis, const Image& image,
    const std::optional<ShiftedImage>& shifted = std::nullopt);

/// One streaming pass producing the weighted projection for several image
/// shifts at once (deltas[0] = 0 gives the plain scheme). Used where the
/// mask-generation cost dominates and multiple variants are wanted.
std::vector<std::pair<ExposurePlan, Projection>> weighted_projection_multi(
    const RandomBasis& basis, const Image& image, const std::vector<double>& deltas);

/// Exact optimal shift: delta = min_k (R_k . I) / (R_k . J) over the basis.
ShiftedImage optimal_shift_exact(const RandomBasis& basis, const Image& image);

/// s = sqrt(2) erf^-1((N-1)/N): expected standardized minimum of N draws.
double confidence_sigmas(std::uint64_t n);

/// Statistical shift: delta = E[I] - s sqrt(E[I^2] Var[R] / (nm E[R]^2)).
ShiftedImage statistical_shift(const DistributionMoments& m, const Image& image,
                               std::uint64_t n);

/// SNR = sqrt(E[I^2] N Var[R]) / (nm E[R] E[I]). Throws for E[I] = 0.
double weighted_snr(const DistributionMoments& m, const Image& image, std::uint64_t n);

/// Inverse of weighted_snr: N = SNR^2 (nm)^2 E[R]^2 E[I]^2 / (Var[R] E[I^2]).
double weighted_basis_size(const DistributionMoments& m, const Image& image,
                           double target_snr);

/// Predicted pedestal of the weighted scheme: nm E[R]^2 E[I] / Var[R].
double weighted_pedestal(const DistributionMoments& m, const Image& image);

/// ---- Filtered scheme -------------------------------------------------

/// Uniform exposures 1/(gamma N') on the kept masks; P -> I + E[R]/gamma.
/// Uses the empirical kept-set mean inside gamma.
std::pair<ExposurePlan, Projection> filtered_projection(const RandomBasis& basis,
                                                        const Image& image,
                                                        const FilterSelection& selection);

struct FilteredSnr {
    double snr = 0.0;
    double xi = 0.0;
    double kept_fraction = 0.0;
    double n_kept_expected = 0.0;
    double uncertainty_product = 0.0; // SNR^2 nm / N
};

/// SNR = sqrt(N'/nm) xi(C_min) with xi = exp(-X^2)/(sqrt(2 pi) f).
/// `n` is the pre-filter basis size unless n_is_kept.
FilteredSnr filtered_snr(const CorrelationStats& stats, double cutoff, double n,
                         bool n_is_kept = false);

/// Pade-approximant optimum X = 3 sqrt(pi)(4 pi - 7) / (4(6 pi^2 - 15 pi + 5)).
double optimal_cutoff_x();

struct CutoffPlan {
    double x = 0.0;
    double cutoff = 0.0;        // E[C] + sqrt(2 Var[C]) X
    double kept_fraction = 0.0; // f(X)
    double xi = 0.0;
    double variance_prefactor = 0.0; // optimized Var[P] = prefactor * 2 pi nm E[I^2] / N
};

CutoffPlan optimal_cutoff_noiseless(const CorrelationStats& stats);

struct BasisSizePlan {
    double target_snr = 0.0;
    long nm = 0;
    double confidence_sigmas = 0.0;
    double n_required = 0.0;
    double n_mean_term = 0.0;      // SNR^2 nm / (f xi^2)
    double n_surcharge_term = 0.0; // s SNR sqrt(nm (1-f)) / (f xi)
    double kept_fraction = 0.0;
    double xi = 0.0;
};

/// N ~ SNR^2 nm / (f xi^2) + (s SNR / (f xi)) sqrt(nm (1 - f)), at cutoff
/// offset X.
BasisSizePlan basis_size_estimate(double target_snr, long nm, double s, double x);

struct DwellCutoff {
    double cutoff = 0.0;
    double x = 0.0;
    double kept_fraction = 0.0; // fraction the filter selects; 1 - f is discarded
    double predicted_snr = 0.0;
    double exposure = 0.0; // uniform exposure 1/(gamma N') implied by the cutoff
};

/// Raise the cutoff until the uniform exposure meets a minimum dwell time:
/// C_min = E[C] + sqrt(2 Var[C] ln(t_min N sqrt(E[R^2]/E[I^2]) sqrt(Var[C]/(2 pi)))),
/// SNR ~ sqrt(E[I^2] gamma / (t_min Var[R])). Uses the analytic gamma.
DwellCutoff dwell_constrained_cutoff(double t_min, double n, const DistributionMoments& m,
                                     const CorrelationStats& stats);

/// ---- Appendix-style linear weights ----------------------------------

/// t_k = (C_k - ratio) sqrt(E[I^2]/E[R^2]) / (N'(E[C'^2] - ratio E[C'])) on the
/// kept masks (ratio = beta/alpha). Image must be zero-centered.
std::pair<ExposurePlan, Projection> filtered_linear_projection(
    const RandomBasis& basis, const Image& image, const std::vector<double>& correlations,
    const FilterSelection& selection, double ratio);

/// ---- Color scheme ----------------------------------------------------

enum class ColorFilterMode { global, independent };

struct ColorProjectionResult {
    ExposurePlan plan; // one shared exposure per kept mask
    std::vector<Projection> channels;
    FilterSelection selection; // on the global color correlation sequence
    double predicted_snr = 0.0;
};

/// Global mode filters on the global color pseudo-correlation at the
/// noiseless optimum X; independent mode keeps masks positively correlated
/// in every channel. gamma uses channel-pooled moments.
ColorProjectionResult color_projection(const std::vector<const RandomBasis*>& bases,
                                       const ColorImage& image, ColorFilterMode mode);

/// ---- Shared accumulation --------------------------------------------

/// P_ij = sum_k w_k R_ijk, streaming over the plan's masks with
/// block-deterministic summation (thread count never changes the result).
Image accumulate_projection(const RandomBasis& basis, const ExposurePlan& plan);

/// Diagnostic for the Var[R'_ij] ~ Var[R] assumption: empirical pixel
/// variance of the filtered sub-ensemble, spatially averaged.
double filtered_pixel_variance(const RandomBasis& basis, const FilterSelection& selection);

} // namespace ghostproj
