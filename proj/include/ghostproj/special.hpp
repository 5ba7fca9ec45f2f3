#pragma once

namespace ghostproj {

/// Inverse error function, accurate to better than 1e-10 absolute over
/// (-1, 1). Rational initial guess refined by one Halley/Newton step
/// against std::erf.
double erf_inv(double x);

/// Inverse of erfc; erfc_inv(y) = erf_inv(1 - y) but stays accurate for
/// small y.
double erfc_inv(double y);

/// Upper-tail fraction f(X) = erfc(X)/2 kept by a cutoff X standard
/// offsets above the mean (in units of sqrt(2 Var)).
double kept_fraction(double x);

} // namespace ghostproj
