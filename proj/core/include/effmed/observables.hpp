#pragma once

// Far-field patterns, the far-field difference between the effective medium
// and the sound-soft sphere, the boundary trace norm, and the explicit bound
// constants for both.

#include <complex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "effmed/mie.hpp"

namespace effmed {

/// Green-representation normalisation in three dimensions.
inline constexpr double kPsi3 = 1.0 / (4.0 * std::numbers::pi);

/// Two-dimensional normalisation e^{i pi/4} / sqrt(8 pi k). Kept for
/// reference; nothing here evaluates two-dimensional fields.
complex psi_2d(double k);

struct FarFieldSample {
  double gamma = 0.0;  // angle between xhat and d
  complex value;
};

struct FarFieldPattern {
  std::vector<FarFieldSample> samples;
  complex psi{kPsi3, 0.0};
};

/// u^inf(gamma) = (-i/k) sum_n (2n+1) X_n P_n(cos gamma) for the convention
/// u^s(x) ~ e^{ik|x|}/|x| u^inf(xhat).
complex far_field_at(const PhysicalParams& params, const ModeCoefficients& coeffs,
                     Problem problem, double gamma);

FarFieldPattern far_field(const PhysicalParams& params, const ModeCoefficients& coeffs,
                          Problem problem, std::span<const double> gammas);

struct SupNorm {
  double value = 0.0;
  double gamma = 0.0;  // where the supremum is attained
};

/// sup over gamma in [0, pi] of |u_eps^inf - u^inf|: 2001-point grid, then
/// golden-section refinement around the grid maximum to 1e-10 in gamma.
SupNorm far_field_difference(const PhysicalParams& params, const ModeCoefficients& coeffs);

/// Convenience overload that builds both coefficient sets. n_max < 0 selects
/// truncation_order().
SupNorm far_field_difference(const PhysicalParams& params, const Contrast& contrast,
                             int n_max = -1);

/// max_n |A_n - C_n|.
double coefficient_gap(const ModeCoefficients& coeffs);

/// a < 0 somewhere: the bound constants are undefined.
class ParameterRegimeError : public std::runtime_error {
 public:
  explicit ParameterRegimeError(int n);
  int mode() const { return n_; }

 private:
  int n_;
};

struct BoundConstants {
  std::vector<double> a;  // 1 - k^2 r1^2 eta0 / ((2n+3)(n+1))
  std::vector<double> b;  // k^2 r1^2 tau0 / ((2n+3)(n+1))
  double c_inf = 0.0;         // with the (2n+1) from the m-sum, as printed
  double c_inf_single = 0.0;  // without it
  double h_v = 0.0;
  double c_v = 0.0;  // sqrt(h_v)
};

/// Throws ParameterRegimeError naming the first n with a_n <= 0.
BoundConstants bound_constants(const PhysicalParams& params, int n_max);

/// H^{1/2} norm of u_eps on the sphere:
/// (sum_n sqrt(1+n^2) (2n+1) 4 pi |B_n j_n(k sqrt(q0) r1)|^2)^{1/2}.
double trace_norm(const PhysicalParams& params, const ModeCoefficients& coeffs);
double trace_norm(const PhysicalParams& params, const Contrast& contrast, int n_max = -1);

/// (1/k) sum_n (2n+1) 4 pi |X_n|^2; equals Im of the scattered flux through
/// any sphere r > r1.
double scattered_flux_mode_sum(const PhysicalParams& params, const ModeCoefficients& coeffs,
                               Problem problem);

/// Im of the integral of du^s/dr conj(u^s) over the sphere of radius r, by
/// Gauss-Legendre quadrature in xhat.d.
double scattered_flux_quadrature(const PhysicalParams& params,
                                 const ModeCoefficients& coeffs, Problem problem, double r);

/// (1/k^2) sum_n (2n+1) 4 pi |X_n|^2.
double far_field_energy_mode_sum(const PhysicalParams& params,
                                 const ModeCoefficients& coeffs, Problem problem);

/// Integral of |u^inf|^2 over the unit sphere by Gauss-Legendre quadrature.
double far_field_energy_quadrature(const PhysicalParams& params,
                                   const ModeCoefficients& coeffs, Problem problem);

}  // namespace effmed
