#pragma once

#include <cstdint>

#include "ghostproj/basis.hpp"
#include "ghostproj/correlate.hpp"
#include "ghostproj/image.hpp"
#include "ghostproj/schemes.hpp"

namespace ghostproj {

/// lambda = photons incident per pixel per unit exposure (0 = noise-free
/// intensities); exposure_sigma = Gaussian jitter of realized shutter
/// times (0 = exact shutters).
struct NoiseModel {
    double photons_per_pixel = 0.0;
    double exposure_sigma = 0.0;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Realize a plan under the noise model. Per mask, the exposure is drawn
/// Normal(w_k, sigma_w^2) truncated at 0; with lambda > 0 each pixel then
/// contributes Poisson(lambda w~_k R_ijk) counts, otherwise the exact
/// intensity w~_k R_ijk. `truncated_draws`, when given, receives the
/// number of masks whose w_k/sigma_w < 4 (noticeable truncation bias).
Projection realize(const ExposurePlan& plan, const RandomBasis& basis,
                   const NoiseModel& model, std::uint64_t* truncated_draws = nullptr);

struct PoissonFilteredSnr {
    double snr = 0.0;
    double a = 0.0;       // scaled basis-to-photon ratio at this geometry
    double gamma = 0.0;   // analytic skew at the cutoff
    double n_kept = 0.0;  // expected N'
    double basis_rich_limit = 0.0;  // N' -> infinity: sqrt(lambda gamma E[I^2]/E[R])
    double photon_rich_limit = 0.0; // lambda -> infinity: noise-free filtered SNR
};

/// SNR ~ sqrt(N' lambda gamma^2 E[I^2] / (lambda Var[R] + gamma N' E[R]))
/// with the statistical N' = f N and analytic gamma. `n` is the pre-filter
/// basis size unless n_is_kept.
PoissonFilteredSnr predict_snr_filtered_poisson(const DistributionMoments& m,
                                                const CorrelationStats& stats, double cutoff,
                                                double lambda, double n,
                                                bool n_is_kept = false);

struct NumericPlanSnr {
    double snr = 0.0;
    double poisson_only = 0.0;  // sqrt(lambda E[I^2] / pedestal)
    double exposure_only = 0.0; // sqrt(E[I^2] / (N' sigma_w^2 Var[R]))
    double pedestal = 0.0;      // N' E[w] E[R]
    double n_active = 0.0;      // count of strictly positive weights
};

/// Combined predictor for a numerically optimized plan (assumes the plan
/// reconstructs the image nearly perfectly):
/// SNR = sqrt(lambda E[I^2] / (N' sigma_w^2 lambda Var[R] + N' E[w] E[R])).
NumericPlanSnr predict_snr_numeric(const ExposurePlan& plan, const DistributionMoments& m,
                                   double image_second_moment, double lambda,
                                   double sigma_w);

/// Var[P_ij] = lambda^2 (sum_k w_k R_ijk - (I_ij + pedestal))^2
///           + lambda sum_k w_k R_ijk, pedestal = spatial mean of the sum.
/// Image must be zero-centered (the plan's reconstruction target).
Image variance_map_imperfect_poisson(const ExposurePlan& plan, const RandomBasis& basis,
                                     const Image& image, double lambda);

struct DirectBaseline {
    Image pixel_snr;               // sqrt(lambda I_ij)
    double global = 0.0;           // sqrt(lambda E[I])
    double zero_centered_bound = 0.0; // sqrt(lambda)
};

/// Direct (non-ghost) projection shot-noise baseline; image must lie in [0,1].
DirectBaseline direct_projection_baseline(const Image& image, double lambda);

} // namespace ghostproj
