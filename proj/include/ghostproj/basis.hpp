#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ghostproj/rng.hpp"

namespace ghostproj {

enum class Distribution {
    uniform01,
    binary01,
    truncated_gaussian, // clipped to [0,1]
};

std::string to_string(Distribution d);
Distribution distribution_from_string(const std::string& s);

struct BasisSpec {
    int rows = 0;
    int cols = 0;
    std::uint64_t count = 0; // N
    Distribution distribution = Distribution::uniform01;
    double mu = 0.5;    // truncated gaussian only
    double sigma = 0.1; // truncated gaussian only
    std::uint64_t master_seed = 0;

    long pixels() const noexcept { return static_cast<long>(rows) * cols; }
    void validate() const;
};

struct DistributionMoments {
    double mean = 0.0;
    double variance = 0.0;
    double second_moment = 0.0;
    double square_variance = 0.0;  // Var[R^2]
    double product_variance = 0.0; // Var[R1 R2], independent deviates
};

/// Analytic moments for uniform01/binary01; a cached high-count sampling
/// oracle for the clipped Gaussian (no closed form is attempted).
DistributionMoments moments(const BasisSpec& spec);

/// Handle over the mask ensemble R_ijk. Mask k is a pure function of
/// (spec, k): streamed and materialized access are bit-identical, and any
/// access order gives the same values.
class RandomBasis {
public:
    static constexpr std::size_t kDefaultMemoryCap = std::size_t{2} << 30; // 2 GiB

    explicit RandomBasis(BasisSpec spec, std::size_t memory_cap_bytes = kDefaultMemoryCap);

    const BasisSpec& spec() const noexcept { return spec_; }
    const DistributionMoments& moments() const noexcept { return moments_; }
    bool materialized() const noexcept { return !cache_.empty(); }
    bool fits_in_memory() const noexcept;

    /// Fill `out` (spec().pixels() values, row-major) with mask k.
    void fill_mask(std::uint64_t k, std::span<double> out) const;
    std::vector<double> mask(std::uint64_t k) const;

    /// Random access to a single pixel of mask k without generating the
    /// whole mask.
    double pixel(std::uint64_t k, long p) const;

    /// Materialize the whole tensor; throws if it exceeds the memory cap.
    void materialize();
    void drop_cache() { cache_.clear(); cache_.shrink_to_fit(); }

private:
    BasisSpec spec_;
    DistributionMoments moments_;
    std::size_t memory_cap_;
    std::vector<double> cache_; // N * nm values when materialized
};

struct OrthogonalityReport {
    double offdiag_mean = 0.0, offdiag_mean_predicted = 0.0;
    double offdiag_variance = 0.0, offdiag_variance_predicted = 0.0;
    double diag_mean = 0.0, diag_mean_predicted = 0.0;
    double diag_variance = 0.0, diag_variance_predicted = 0.0;
    std::uint64_t pairs = 0;
};

/// Empirical check of the offset orthogonality relationship: normalized
/// spatial products of mask pairs against E[R]^2/Var[R] (k != k') and
/// E[R^2]/Var[R] (k = k'), with the finite-nm variance prediction.
OrthogonalityReport orthogonality_report(const RandomBasis& basis, std::uint64_t pairs);

struct CompletenessReport {
    double offdiag_mean = 0.0, offdiag_mean_predicted = 0.0;
    double offdiag_variance = 0.0, offdiag_variance_predicted = 0.0;
    double diag_mean = 0.0, diag_mean_predicted = 0.0;
    double diag_variance = 0.0, diag_variance_predicted = 0.0;
    int pixel_pairs = 0;
};

/// Empirical check of the offset completeness relationship over sampled
/// pixel pairs, against the truncated-sum variance prediction.
CompletenessReport completeness_report(const RandomBasis& basis, int pixel_pairs);

} // namespace ghostproj
