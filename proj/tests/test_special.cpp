#include <doctest.h>

#include <cmath>
#include <initializer_list>

#include "ghostproj/special.hpp"

using namespace ghostproj;

TEST_CASE("erf_inv round-trips against std::erf")
{
    for (double x = -0.999; x < 1.0; x += 0.0371)
        CHECK(std::erf(erf_inv(x)) == doctest::Approx(x).epsilon(1e-12));
    CHECK(erf_inv(0.0) == 0.0);
    // Reference value: erf(0.4769362762044699) = 0.5.
    CHECK(erf_inv(0.5) == doctest::Approx(0.4769362762044699).epsilon(1e-12));
}

TEST_CASE("erfc_inv stays accurate deep in the tail")
{
    for (double y : {0.5, 0.1, 1e-3, 1e-6, 1e-9, 1e-12}) {
        const double x = erfc_inv(y);
        CHECK(std::erfc(x) == doctest::Approx(y).epsilon(1e-9));
    }
    CHECK(erfc_inv(1.0) == 0.0);
    // Symmetry: erfc_inv(2 - y) = -erfc_inv(y).
    CHECK(erfc_inv(1.5) == doctest::Approx(-erfc_inv(0.5)).epsilon(1e-12));
}

TEST_CASE("kept_fraction is the upper-tail mass")
{
    CHECK(kept_fraction(0.0) == doctest::Approx(0.5));
    // erfc(1)/2 = 0.078649603525143...
    CHECK(kept_fraction(1.0) == doctest::Approx(0.0786496035251426).epsilon(1e-12));
    CHECK(kept_fraction(5.0) < 1e-11);
    CHECK(kept_fraction(-5.0) == doctest::Approx(1.0).epsilon(1e-11));
}
