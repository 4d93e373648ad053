#include "effmed/observables.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "effmed/quadrature.hpp"
#include "effmed/specfun.hpp"

namespace effmed {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr complex kI{0.0, 1.0};
constexpr int kDifferenceGrid = 2001;
constexpr double kGammaTol = 1e-10;

const std::vector<complex>& coefficients_for(const ModeCoefficients& coeffs, Problem problem) {
  if (problem == Problem::soft) {
    if (!coeffs.has_soft) throw std::domain_error("soft-sphere coefficients not populated");
    return coeffs.c;
  }
  if (!coeffs.has_effective) throw std::domain_error("effective coefficients not populated");
  return coeffs.a;
}

// (-i/k) sum_n g_n P_n(cos gamma)
complex legendre_series(std::span<const complex> g, double k, double gamma) {
  if (g.empty()) return 0.0;
  const auto p = specfun::legendre(static_cast<int>(g.size()) - 1,
                                   std::clamp(std::cos(gamma), -1.0, 1.0));
  complex sum = 0.0;
  for (std::size_t n = 0; n < g.size(); ++n) sum += g[n] * p[n];
  return -kI / k * sum;
}

double weighted_power(const std::vector<complex>& x) {
  double s = 0.0;
  for (std::size_t n = 0; n < x.size(); ++n) s += (2.0 * n + 1.0) * std::norm(x[n]);
  return 4.0 * kPi * s;
}

}  // namespace

complex psi_2d(double k) {
  return std::exp(kI * (kPi / 4.0)) / std::sqrt(8.0 * kPi * k);
}

complex far_field_at(const PhysicalParams& params, const ModeCoefficients& coeffs,
                     Problem problem, double gamma) {
  const auto& x = coefficients_for(coeffs, problem);
  std::vector<complex> g(x.size());
  for (std::size_t n = 0; n < x.size(); ++n) g[n] = (2.0 * n + 1.0) * x[n];
  return legendre_series(g, params.k, gamma);
}

FarFieldPattern far_field(const PhysicalParams& params, const ModeCoefficients& coeffs,
                          Problem problem, std::span<const double> gammas) {
  const auto& x = coefficients_for(coeffs, problem);
  std::vector<complex> g(x.size());
  for (std::size_t n = 0; n < x.size(); ++n) g[n] = (2.0 * n + 1.0) * x[n];
  FarFieldPattern out;
  out.samples.reserve(gammas.size());
  for (const double gamma : gammas) {
    out.samples.push_back({gamma, legendre_series(g, params.k, gamma)});
  }
  return out;
}

SupNorm far_field_difference(const PhysicalParams& params, const ModeCoefficients& coeffs) {
  if (!coeffs.has_soft || !coeffs.has_effective) {
    throw std::domain_error("far_field_difference needs both coefficient sets");
  }
  const std::size_t count = std::min(coeffs.a.size(), coeffs.c.size());
  std::vector<complex> g(count);
  for (std::size_t n = 0; n < count; ++n) g[n] = (2.0 * n + 1.0) * (coeffs.a[n] - coeffs.c[n]);

  auto diff = [&](double gamma) { return std::abs(legendre_series(g, params.k, gamma)); };

  const double step = kPi / (kDifferenceGrid - 1);
  int best = 0;
  double best_value = -1.0;
  for (int i = 0; i < kDifferenceGrid; ++i) {
    const double v = diff(i * step);
    if (v > best_value) {
      best_value = v;
      best = i;
    }
  }
  SupNorm out{best_value, best * step};
  const double lo = std::max(0.0, (best - 1) * step);
  const double hi = std::min(kPi, (best + 1) * step);
  const auto refined = quadrature::golden_section_maximize(diff, lo, hi, kGammaTol);
  if (refined.value > out.value) out = {refined.value, refined.x};
  return out;
}

SupNorm far_field_difference(const PhysicalParams& params, const Contrast& contrast,
                             int n_max) {
  if (n_max < 0) n_max = truncation_order(params, contrast);
  return far_field_difference(params, mie_coeffs(params, contrast, n_max));
}

double coefficient_gap(const ModeCoefficients& coeffs) {
  double gap = 0.0;
  const std::size_t count = std::min(coeffs.a.size(), coeffs.c.size());
  for (std::size_t n = 0; n < count; ++n) gap = std::max(gap, std::abs(coeffs.a[n] - coeffs.c[n]));
  return gap;
}

ParameterRegimeError::ParameterRegimeError(int n)
    : std::runtime_error("parameter regime error: a_n = 1 - k^2 r1^2 eta0/((2n+3)(n+1)) <= 0 at n = " +
                         std::to_string(n) + "; bound constants are undefined"),
      n_(n) {}

BoundConstants bound_constants(const PhysicalParams& params, int n_max) {
  params.validate();
  if (n_max < 0) throw std::invalid_argument("bound_constants: n_max must be nonnegative");
  const double t = params.kr1();
  const double t2 = t * t;
  const double k = params.k;
  const double r1 = params.r1;

  BoundConstants out;
  out.a.resize(n_max + 1);
  out.b.resize(n_max + 1);
  for (int n = 0; n <= n_max; ++n) {
    const double denom = (2.0 * n + 3.0) * (n + 1.0);
    out.a[n] = 1.0 - t2 * params.eta0 / denom;
    out.b[n] = t2 * params.tau0 / denom;
    if (!(out.a[n] > 0.0)) throw ParameterRegimeError(n);
  }

  const auto bt = specfun::spherical_bessel(n_max, t);
  complex sum_printed = 0.0;
  complex sum_single = 0.0;
  double hv = 0.0;
  for (int n = 0; n <= n_max; ++n) {
    if (bt[n].overflowed) break;
    const complex hh = bt[n].h1 * bt[n].dh1;
    const double root = std::sqrt(2.0 * out.a[n] * out.b[n]);
    const double w = 2.0 * n + 1.0;
    const complex term = 1.0 / (k * k * k * r1 * r1 * hh * root);
    if (std::isfinite(term.real()) && std::isfinite(term.imag())) {
      sum_printed += w * w * term;
      sum_single += w * term;
    }
    const double amp = 4.0 * kPi / (t2 * std::abs(bt[n].dh1));
    const double contrib =
        std::sqrt(1.0 + static_cast<double>(n) * n) * w / (4.0 * kPi) * amp * amp /
        (2.0 * out.a[n] * out.b[n]);
    if (std::isfinite(contrib)) hv += contrib;
  }
  out.c_inf = std::abs(sum_printed);
  out.c_inf_single = std::abs(sum_single);
  out.h_v = hv;
  out.c_v = std::sqrt(hv);
  return out;
}

double trace_norm(const PhysicalParams& params, const ModeCoefficients& coeffs) {
  if (!coeffs.has_effective) throw std::domain_error("trace_norm needs effective coefficients");
  if (coeffs.eps == 0.0 || coeffs.n_max < 0) return 0.0;
  const auto bz =
      specfun::spherical_bessel(coeffs.n_max, params.k * coeffs.sqrt_q0 * params.r1);
  double s = 0.0;
  for (int n = 0; n <= coeffs.n_max; ++n) {
    const double amp = std::abs(4.0 * kPi * coeffs.b[n] * bz[n].j);
    s += std::sqrt(1.0 + static_cast<double>(n) * n) * (2.0 * n + 1.0) / (4.0 * kPi) * amp * amp;
  }
  return std::sqrt(s);
}

double trace_norm(const PhysicalParams& params, const Contrast& contrast, int n_max) {
  if (n_max < 0) n_max = truncation_order(params, contrast);
  return trace_norm(params, effective_medium_coeffs(params, contrast, n_max));
}

double scattered_flux_mode_sum(const PhysicalParams& params, const ModeCoefficients& coeffs,
                               Problem problem) {
  return weighted_power(coefficients_for(coeffs, problem)) / params.k;
}

double scattered_flux_quadrature(const PhysicalParams& params,
                                 const ModeCoefficients& coeffs, Problem problem, double r) {
  const auto rule = quadrature::gauss_legendre(quadrature::sphere_rule_size(coeffs.n_max));
  double s = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const auto u = scattered_field(params, coeffs, problem, r, rule.nodes[i]);
    s += rule.weights[i] * (u.radial_derivative * std::conj(u.value)).imag();
  }
  return 2.0 * kPi * r * r * s;
}

double far_field_energy_mode_sum(const PhysicalParams& params,
                                 const ModeCoefficients& coeffs, Problem problem) {
  return weighted_power(coefficients_for(coeffs, problem)) / (params.k * params.k);
}

double far_field_energy_quadrature(const PhysicalParams& params,
                                   const ModeCoefficients& coeffs, Problem problem) {
  const auto rule = quadrature::gauss_legendre(quadrature::sphere_rule_size(coeffs.n_max));
  double s = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    s += rule.weights[i] * std::norm(far_field_at(params, coeffs, problem, std::acos(rule.nodes[i])));
  }
  return 2.0 * kPi * s;
}

}  // namespace effmed
