#pragma once

#include <vector>

#include "ghostproj/image.hpp"
#include "ghostproj/schemes.hpp"

namespace ghostproj {

struct ProjectionReport {
    Image snr_pixelwise;
    double snr_global = 0.0; // RMS of the pixel-wise map
    double pedestal_observed = 0.0;
    double pedestal_predicted = 0.0;
    double residual_variance = 0.0; // empirical, after pedestal removal
    double predicted_variance = 0.0;

    std::vector<double> histogram_edges;   // bins + 1 values
    std::vector<double> histogram_counts;  // sums to nm
    std::vector<double> predicted_overlay; // expected counts per bin, Gaussian model
};

/// Compare a projection against scale * image (+ pedestal): observed
/// pedestal is the spatial mean of P - scale I; residuals are binned with
/// Freedman-Diaconis widths (64-bin cap) and overlaid with the Gaussian of
/// the predicted variance. `scale` is lambda for photon-count runs, 1 for
/// transmission-unit runs — always explicit, never inferred.
ProjectionReport report(const Projection& projection, const Image& image, double scale,
                        double predicted_variance, double predicted_pedestal);

} // namespace ghostproj
