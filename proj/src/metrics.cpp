#include "ghostproj/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ghostproj {

ProjectionReport report(const Projection& projection, const Image& image, double scale,
                        double predicted_variance, double predicted_pedestal)
{
    const Image& p = projection.values;
    if (p.rows() != image.rows() || p.cols() != image.cols())
        throw std::invalid_argument("report: projection/image dimensions disagree");
    const long nm = p.pixels();

    ProjectionReport rep;
    rep.pedestal_predicted = predicted_pedestal;
    rep.predicted_variance = predicted_variance;

    std::vector<double> residual(static_cast<std::size_t>(nm));
    double mean = 0.0;
    for (long q = 0; q < nm; ++q) {
        residual[q] = p.values()[q] - scale * image.values()[q];
        mean += residual[q];
    }
    mean /= static_cast<double>(nm);
    rep.pedestal_observed = mean;

    double var = 0.0;
    for (double& r : residual) {
        r -= mean;
        var += r * r;
    }
    var /= static_cast<double>(nm);
    rep.residual_variance = var;

    const double inv_sigma =
        var > 0.0 ? 1.0 / std::sqrt(var) : std::numeric_limits<double>::infinity();
    std::vector<double> snr_map(static_cast<std::size_t>(nm));
    double sum_sq = 0.0;
    bool saturated = false;
    for (long q = 0; q < nm; ++q) {
        const double s = scale * image.values()[q] * inv_sigma;
        snr_map[q] = s;
        if (std::isinf(s))
            saturated = true;
        else
            sum_sq += s * s;
    }
    rep.snr_pixelwise = Image(p.rows(), p.cols(), std::move(snr_map));
    rep.snr_global = saturated ? std::numeric_limits<double>::infinity()
                               : std::sqrt(sum_sq / static_cast<double>(nm));

    // Freedman-Diaconis binning of the centered residuals, 64-bin cap.
    std::vector<double> sorted = residual;
    std::sort(sorted.begin(), sorted.end());
    const double q1 = sorted[static_cast<std::size_t>(0.25 * (nm - 1))];
    const double q3 = sorted[static_cast<std::size_t>(0.75 * (nm - 1))];
    const double lo = sorted.front();
    const double hi = sorted.back();
    const double span = hi - lo;
    int bins = 1;
    if (span > 0.0) {
        const double width = 2.0 * (q3 - q1) / std::cbrt(static_cast<double>(nm));
        bins = width > 0.0 ? static_cast<int>(std::ceil(span / width)) : 64;
        bins = std::clamp(bins, 1, 64);
    }

    rep.histogram_edges.resize(bins + 1);
    for (int b = 0; b <= bins; ++b)
        rep.histogram_edges[b] = lo + span * b / bins;
    rep.histogram_counts.assign(bins, 0.0);
    for (double r : residual) {
        int b = span > 0.0 ? static_cast<int>((r - lo) / span * bins) : 0;
        b = std::clamp(b, 0, bins - 1);
        rep.histogram_counts[b] += 1.0;
    }

    rep.predicted_overlay.resize(bins);
    const double bin_width = span > 0.0 ? span / bins : 1.0;
    for (int b = 0; b < bins; ++b) {
        const double center = 0.5 * (rep.histogram_edges[b] + rep.histogram_edges[b + 1]);
        const double pdf =
            predicted_variance > 0.0
                ? std::exp(-center * center / (2.0 * predicted_variance)) /
                      std::sqrt(2.0 * M_PI * predicted_variance)
                : 0.0;
        rep.predicted_overlay[b] = pdf * static_cast<double>(nm) * bin_width;
    }
    return rep;
}

} // namespace ghostproj
