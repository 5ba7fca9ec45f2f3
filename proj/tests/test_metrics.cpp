#include <doctest.h>

#include <cmath>
#include <numeric>

#include "ghostproj/metrics.hpp"
#include "ghostproj/rng.hpp"

using namespace ghostproj;

TEST_CASE("report recovers pedestal and snr from synthetic data")
{
    const int side = 40;
    const long nm = side * side;
    const Image img = phantom(side, side, "moments:0.5:0.376759");
    const double scale = 2.0, pedestal = 7.5, sigma = 0.05;

    CounterStream rng(123, RngStream::generic, 0);
    Projection proj;
    proj.values = Image(side, side, 0.0);
    for (long q = 0; q < nm; ++q)
        proj.values.values()[static_cast<std::size_t>(q)] =
            scale * img.values()[static_cast<std::size_t>(q)] + pedestal +
            sigma * rng.next_gaussian();

    const ProjectionReport rep =
        report(proj, img, scale, sigma * sigma, pedestal);

    CHECK(std::abs(rep.pedestal_observed - pedestal) <
          3.0 * sigma / std::sqrt(static_cast<double>(nm)));
    const double expected_snr = scale * std::sqrt(img.second_moment()) / sigma;
    CHECK(rep.snr_global == doctest::Approx(expected_snr).epsilon(0.10));
    CHECK(rep.residual_variance == doctest::Approx(sigma * sigma).epsilon(0.10));

    // Histogram bookkeeping: counts partition all pixels, edges ascend.
    const double total =
        std::accumulate(rep.histogram_counts.begin(), rep.histogram_counts.end(), 0.0);
    CHECK(total == doctest::Approx(static_cast<double>(nm)));
    REQUIRE(rep.histogram_edges.size() == rep.histogram_counts.size() + 1);
    CHECK(rep.histogram_counts.size() <= 64);
    for (std::size_t b = 1; b < rep.histogram_edges.size(); ++b)
        CHECK(rep.histogram_edges[b] > rep.histogram_edges[b - 1]);

    // The Gaussian overlay integrates to ~nm over the observed span.
    const double overlay =
        std::accumulate(rep.predicted_overlay.begin(), rep.predicted_overlay.end(), 0.0);
    CHECK(overlay == doctest::Approx(static_cast<double>(nm)).epsilon(0.05));
}

TEST_CASE("noiseless projections report infinite pixel snr safely")
{
    const Image img = phantom(20, 20);
    Projection proj;
    proj.values = img;
    const ProjectionReport rep = report(proj, img, 1.0, 0.0, 0.0);
    CHECK(std::isinf(rep.snr_global));
    CHECK(rep.pedestal_observed == doctest::Approx(0.0));
    CHECK(rep.residual_variance == doctest::Approx(0.0));
}

TEST_CASE("report rejects mismatched geometries")
{
    Projection proj;
    proj.values = Image(10, 10, 0.0);
    CHECK_THROWS(report(proj, Image(20, 20, 0.0), 1.0, 0.0, 0.0));
}
