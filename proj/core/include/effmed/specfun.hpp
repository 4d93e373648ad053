#pragma once

// Spherical Bessel and Hankel functions of complex argument, and Legendre
// polynomials.

#include <complex>
#include <vector>

namespace effmed::specfun {

using complex = std::complex<double>;

/// Highest order accepted by spherical_bessel().
inline constexpr int kMaxOrder = 500;

/// j_n, y_n, h_n^(1) and their derivatives at a single order and argument.
struct SphericalBesselEval {
  int n = 0;
  complex z;
  complex j, y, h1;
  complex dj, dy, dh1;
  /// Set when y_n (and therefore h_n^(1)) exceeded the double range; the
  /// affected values are saturated to infinity.
  bool overflowed = false;
};

/// Evaluates j_n, y_n, h_n^(1) and derivatives for n = 0..n_max.
///
/// j_n comes from Miller's downward recurrence normalised against the closed
/// forms of j_0 or j_1. Near the real axis (|Im z| < 1) y_n follows from the
/// upward recurrence and h_n^(1) = j_n + i y_n. Further from the axis that sum
/// cancels catastrophically, so the Hankel function that is small there is
/// obtained from its logarithmic derivative (Steed's continued fraction) and
/// the Wronskian against j_n; y_n is recovered from it.
/// Derivatives use P_n'(z) = -P_{n+1}(z) + (n/z) P_n(z).
///
/// Throws std::domain_error for z == 0 or n_max outside [0, kMaxOrder].
std::vector<SphericalBesselEval> spherical_bessel(int n_max, complex z);

/// Log-derivative h_n^(1)'(z) / h_n^(1)(z) by Steed's continued fraction.
/// Converges for Im z >= 0; the cost grows like n + 1/|z|.
complex hankel1_log_derivative(int n, complex z);

/// P_0(t) .. P_{n_max}(t) by the three-term recurrence.
/// Throws std::domain_error for |t| > 1 or n_max < 0.
std::vector<double> legendre(int n_max, double t);

}  // namespace effmed::specfun
