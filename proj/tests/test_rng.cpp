#include <doctest.h>

#include <cmath>
#include <vector>

#include "ghostproj/rng.hpp"

using namespace ghostproj;

TEST_CASE("philox 4x32-10 known-answer vectors")
{
    // Reference vectors published with the original counter-based RNG paper.
    auto r = Philox4x32::round10({0, 0, 0, 0}, {0, 0});
    CHECK(r == Philox4x32::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});

    auto s = Philox4x32::round10({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                 {0xffffffffu, 0xffffffffu});
    CHECK(s == Philox4x32::Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});

    auto t = Philox4x32::round10({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                 {0xa4093822u, 0x299f31d0u});
    CHECK(t == Philox4x32::Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("counter streams are pure functions of their coordinates")
{
    CounterStream a(42, RngStream::mask, 7, 3);
    CounterStream b(42, RngStream::mask, 7, 3);
    for (int i = 0; i < 100; ++i)
        CHECK(a.next_u01() == b.next_u01());

    // Any coordinate change decorrelates the stream.
    CounterStream c(42, RngStream::poisson, 7, 3);
    CounterStream d(42, RngStream::mask, 8, 3);
    CounterStream e(43, RngStream::mask, 7, 3);
    CounterStream f(42, RngStream::mask, 7, 3);
    CHECK(c.next_u01() != f.next_u01());
    CounterStream f2(42, RngStream::mask, 7, 3);
    CHECK(d.next_u01() != f2.next_u01());
    CounterStream f3(42, RngStream::mask, 7, 3);
    CHECK(e.next_u01() != f3.next_u01());
}

TEST_CASE("uniform deviates live in [0,1) with the right moments")
{
    CounterStream s(1, RngStream::generic, 0);
    const int n = 200000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double u = s.next_u01();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        sum += u;
        sum2 += u * u;
    }
    const double mean = sum / n;
    const double var = sum2 / n - mean * mean;
    // 3 standard errors: se(mean) = sqrt(1/12/n).
    CHECK(std::abs(mean - 0.5) < 3.0 * std::sqrt(1.0 / 12.0 / n));
    CHECK(var == doctest::Approx(1.0 / 12.0).epsilon(0.02));
}

TEST_CASE("gaussian deviates have standard moments")
{
    CounterStream s(2, RngStream::generic, 0);
    const int n = 200000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double g = s.next_gaussian();
        sum += g;
        sum2 += g * g;
    }
    const double mean = sum / n;
    CHECK(std::abs(mean) < 3.0 / std::sqrt(static_cast<double>(n)));
    CHECK(sum2 / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("poisson deviates match mean and variance in both regimes")
{
    for (double lambda : {0.5, 4.0, 40.0, 4000.0}) {
        CounterStream s(3, RngStream::poisson, static_cast<std::uint64_t>(lambda * 10));
        const int n = 100000;
        double sum = 0.0, sum2 = 0.0;
        for (int i = 0; i < n; ++i) {
            const double k = static_cast<double>(s.next_poisson(lambda));
            sum += k;
            sum2 += k * k;
        }
        const double mean = sum / n;
        const double var = sum2 / n - mean * mean;
        // se(mean) = sqrt(lambda/n); variance tolerance is looser.
        CHECK(std::abs(mean - lambda) < 4.0 * std::sqrt(lambda / n));
        CHECK(var == doctest::Approx(lambda).epsilon(0.05));
    }
}

TEST_CASE("poisson of mean zero is identically zero")
{
    CounterStream s(4, RngStream::poisson, 0);
    for (int i = 0; i < 10; ++i)
        CHECK(s.next_poisson(0.0) == 0);
}
