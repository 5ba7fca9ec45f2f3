#pragma once

#include <filesystem>
#include <limits>
#include <string>

#include "ghostproj/io.hpp"
#include "ghostproj/metrics.hpp"
#include "ghostproj/noise.hpp"
#include "ghostproj/schemes.hpp"

namespace ghostproj {

inline constexpr const char* kVersion = "0.1.0";

/// Flat key=value experiment description; every field can also be set by a
/// same-named CLI flag.
struct ExperimentConfig {
    std::string scheme; // weighted, weighted-shifted, filtered, filtered-linear,
                        // filtered-poisson, color-global, color-independent, nnls,
                        // nnls-poisson, nnls-exposure, nnls-combined, ga-poisson,
                        // photocopy
    int rows = 40;
    int cols = 40;
    std::uint64_t count = 0; // N
    std::string distribution = "uniform01";
    double mu = 0.5;
    double sigma = 0.1;
    std::uint64_t seed = 0;

    std::string image_path;                // CSV image; empty = built-in phantom
    std::string phantom_contrast = "raw";  // raw | zero-centered | moments:<m>:<e2>

    double lambda = 0.0;
    double exposure_sigma = 0.0;

    // Standardized cutoff offset X; NaN = noiseless optimum (or the
    // Poisson-aware optimum for filtered-poisson).
    double cutoff_x = std::numeric_limits<double>::quiet_NaN();
    double dwell_min = 0.0; // > 0 switches the filtered scheme to the dwell cutoff

    double ratio = std::numeric_limits<double>::quiet_NaN(); // filtered-linear beta/alpha
    double shift_delta = std::numeric_limits<double>::quiet_NaN();
    std::string shift_mode = "statistical"; // statistical | exact | fixed

    std::string photocopy_scheme = "filtered"; // weighted | filtered

    std::filesystem::path out_dir = ".";
    int threads = 0;

    static ExperimentConfig from_key_values(const KeyValues& kv);
    KeyValues to_key_values() const;
    void validate() const;
};

struct RunResult {
    double predicted_snr = 0.0;
    double simulated_snr = 0.0;
    double pedestal_predicted = 0.0;
    double pedestal_observed = 0.0;
    std::uint64_t n_kept = 0; // filtered schemes
    std::filesystem::path report_path;
};

/// Execute the configured scheme end-to-end and write projection CSV/PGM,
/// plan CSV, report key=value file, residual histogram CSV and a manifest
/// sufficient to reproduce the run bit-exactly.
RunResult run_experiment(const ExperimentConfig& config);

struct PhotocopyResult {
    ExposurePlan plan;
    Projection projection;
    ProjectionReport report;
    double predicted_snr = 0.0;
};

/// Two-step ghost photocopier: measure bucket signals (pseudo-correlations
/// of the object against the basis), then plan a projection from the
/// buckets alone — the masks stay unknown to the planner and known to the
/// simulator.
PhotocopyResult photocopy(const RandomBasis& basis, const Image& object,
                          const NoiseModel& model, SchemeTag scheme);

} // namespace ghostproj
