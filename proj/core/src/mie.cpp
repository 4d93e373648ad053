#include "effmed/mie.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "effmed/specfun.hpp"

namespace effmed {

namespace {

constexpr complex kI{0.0, 1.0};
constexpr double kDegenerateDenominator = 1e-250;

complex i_pow(int n) {
  switch (n & 3) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

bool finite(complex v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); }

double norm3(const Vec3& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }

double dot3(const Vec3& a, const Vec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

void check_n_max(int n_max) {
  if (n_max < 0 || n_max > specfun::kMaxOrder) {
    throw std::invalid_argument("n_max must lie in [0, " +
                                std::to_string(specfun::kMaxOrder) + "]");
  }
}

std::string degenerate_message(int n, double eps) {
  std::ostringstream os;
  os << "degenerate transmission system at mode n = " << n << ", eps = " << eps;
  return os.str();
}

}  // namespace

void PhysicalParams::validate() const {
  if (!(k > 0.0) || !(r1 > 0.0) || !(eta0 > 0.0) || !(tau0 > 0.0)) {
    throw std::invalid_argument("k, r1, eta0 and tau0 must be positive");
  }
  if (!(std::abs(norm3(d) - 1.0) <= 1e-14)) {
    throw std::invalid_argument("incident direction d must be a unit vector");
  }
}

DegenerateModeError::DegenerateModeError(int n, double eps)
    : std::runtime_error(degenerate_message(n, eps)), n_(n), eps_(eps) {}

Contrast make_contrast(const PhysicalParams& params, double eps, Branch branch) {
  if (!(eps >= 0.0) || !std::isfinite(eps)) {
    throw std::invalid_argument("eps must be finite and nonnegative");
  }
  Contrast c;
  c.eps = eps;
  c.q0 = complex(eps * params.eta0, params.tau0);
  // std::sqrt takes the principal root, Arg in (-pi/2, pi/2]; with tau0 > 0
  // this is the root with Arg = Arg(q0)/2 in (0, pi/2).
  c.sqrt_q0 = std::sqrt(c.q0);
  if (branch == Branch::negated) c.sqrt_q0 = -c.sqrt_q0;
  return c;
}

ModeCoefficients soft_sphere_coeffs(const PhysicalParams& params, int n_max) {
  params.validate();
  check_n_max(n_max);
  const auto bt = specfun::spherical_bessel(n_max, params.kr1());

  ModeCoefficients out;
  out.requested_n_max = n_max;
  out.has_soft = true;
  out.c.reserve(n_max + 1);
  for (int n = 0; n <= n_max; ++n) {
    if (bt[n].overflowed) break;
    const complex cn = -bt[n].j / bt[n].h1;
    if (!finite(cn)) break;
    out.c.push_back(cn);
  }
  out.n_max = static_cast<int>(out.c.size()) - 1;
  return out;
}

ModeCoefficients effective_medium_coeffs(const PhysicalParams& params,
                                         const Contrast& contrast, int n_max) {
  params.validate();
  check_n_max(n_max);
  const double t = params.kr1();
  const double eps = contrast.eps;
  const complex s = contrast.sqrt_q0;
  const auto bt = specfun::spherical_bessel(n_max, t);

  ModeCoefficients out;
  out.requested_n_max = n_max;
  out.has_effective = true;
  out.eps = eps;
  out.sqrt_q0 = s;
  out.a.reserve(n_max + 1);
  out.b.reserve(n_max + 1);

  if (eps == 0.0) {
    // Analytic limit: the eps factor removes every interior contribution.
    for (int n = 0; n <= n_max; ++n) {
      if (bt[n].overflowed) break;
      const complex an = -bt[n].j / bt[n].h1;
      if (!finite(an)) break;
      out.a.push_back(an);
      out.b.push_back(0.0);
    }
    out.n_max = static_cast<int>(out.a.size()) - 1;
    return out;
  }

  const auto bz = specfun::spherical_bessel(n_max, params.k * s * params.r1);
  for (int n = 0; n <= n_max; ++n) {
    if (bt[n].overflowed) break;
    const complex jz = bz[n].j;
    const complex djz = bz[n].dj;
    const complex den = eps * jz * bt[n].dh1 - s * bt[n].h1 * djz;
    if (!finite(den) || !finite(jz) || !finite(djz)) break;
    if (std::abs(den) < kDegenerateDenominator) {
      if (jz == 0.0 && djz == 0.0) break;  // interior functions underflowed
      throw DegenerateModeError(n, eps);
    }
    const complex an = -(eps * jz * bt[n].dj - s * bt[n].j * djz) / den;
    // The Wronskian j h' - h j' = i / t^2 replaces the numerator of B_n.
    const complex bn = eps * kI / (t * t) / den;
    if (!finite(an) || !finite(bn)) break;
    out.a.push_back(an);
    out.b.push_back(bn);
  }
  out.n_max = static_cast<int>(out.a.size()) - 1;
  return out;
}

ModeCoefficients mie_coeffs(const PhysicalParams& params, const Contrast& contrast,
                            int n_max) {
  ModeCoefficients soft = soft_sphere_coeffs(params, n_max);
  ModeCoefficients out = effective_medium_coeffs(params, contrast, n_max);
  out.has_soft = true;
  out.c = std::move(soft.c);
  const int cut = std::min<int>(static_cast<int>(out.c.size()),
                                static_cast<int>(out.a.size()));
  out.c.resize(cut);
  out.a.resize(cut);
  out.b.resize(cut);
  out.n_max = cut - 1;
  return out;
}

std::vector<TransmissionResidual> transmission_residuals(const PhysicalParams& params,
                                                         const Contrast& contrast,
                                                         const ModeCoefficients& coeffs) {
  if (!coeffs.has_effective) {
    throw std::invalid_argument("transmission residuals need effective-medium coefficients");
  }
  const int n_max = coeffs.n_max;
  std::vector<TransmissionResidual> out(static_cast<std::size_t>(n_max + 1));
  if (n_max < 0) return out;

  const double t = params.kr1();
  const double eps = contrast.eps;
  const complex s = std::sqrt(contrast.q0);
  const auto bt = specfun::spherical_bessel(n_max, t);
  const auto bz = specfun::spherical_bessel(n_max, params.k * s * params.r1);

  auto relative = [](complex sum, std::initializer_list<double> scale) {
    const double m = std::max(scale);
    return m > 0.0 ? std::abs(sum) / m : 0.0;
  };

  for (int n = 0; n <= n_max; ++n) {
    const complex A = coeffs.a[n];
    const complex B = coeffs.b[n];
    const complex t1 = B * bz[n].j;
    const complex t2 = A * bt[n].h1;
    const complex t3 = bt[n].j;
    out[n].continuity =
        relative(t1 - t2 - t3, {std::abs(t1), std::abs(t2), std::abs(t3)});

    const complex f1 = s * B * bz[n].dj;
    const complex f2 = eps * A * bt[n].dh1;
    const complex f3 = eps * bt[n].dj;
    out[n].flux = relative(f1 - f2 - f3, {std::abs(f1), std::abs(f2), std::abs(f3)});
  }
  return out;
}

complex eval_field(const PhysicalParams& params, const Contrast& contrast,
                   const ModeCoefficients& coeffs, Problem problem, const Vec3& x) {
  const double r = norm3(x);
  if (r == 0.0) throw std::domain_error("eval_field: x must be nonzero");
  const double mu = std::clamp(dot3(x, params.d) / r, -1.0, 1.0);
  const int n_max = coeffs.n_max;
  const auto p = specfun::legendre(std::max(n_max, 0), mu);

  if (r < params.r1) {
    if (problem == Problem::soft) {
      throw std::domain_error("eval_field: the sound-soft field is undefined inside the obstacle");
    }
    if (!coeffs.has_effective) throw std::domain_error("eval_field: missing effective coefficients");
    if (contrast.eps == 0.0) return 0.0;
    const auto bz = specfun::spherical_bessel(n_max, params.k * contrast.sqrt_q0 * r);
    complex sum = 0.0;
    for (int n = 0; n <= n_max; ++n) {
      sum += coeffs.b[n] * (2.0 * n + 1.0) * i_pow(n) * bz[n].j * p[n];
    }
    return sum;
  }

  const ScatteredSample us = scattered_field(params, coeffs, problem, r, mu);
  const complex incident = std::exp(kI * params.k * dot3(x, params.d));
  return incident + us.value;
}

ScatteredSample scattered_field(const PhysicalParams& params,
                                const ModeCoefficients& coeffs, Problem problem,
                                double r, double mu) {
  if (problem == Problem::soft && !coeffs.has_soft) {
    throw std::domain_error("scattered_field: missing soft-sphere coefficients");
  }
  if (problem == Problem::effective && !coeffs.has_effective) {
    throw std::domain_error("scattered_field: missing effective coefficients");
  }
  if (r < params.r1) throw std::domain_error("scattered_field: r must be at least r1");
  const auto& X = problem == Problem::soft ? coeffs.c : coeffs.a;
  const int n_max = coeffs.n_max;
  ScatteredSample out{};
  if (n_max < 0) return out;
  const auto p = specfun::legendre(n_max, std::clamp(mu, -1.0, 1.0));
  const auto bh = specfun::spherical_bessel(n_max, params.k * r);
  for (int n = 0; n <= n_max; ++n) {
    const complex w = X[n] * (2.0 * n + 1.0) * i_pow(n) * p[n];
    if (w == 0.0) continue;
    out.value += w * bh[n].h1;
    out.radial_derivative += w * params.k * bh[n].dh1;
  }
  return out;
}

int base_truncation_order(double kr1) {
  return static_cast<int>(std::ceil(kr1 + 4.0 * std::cbrt(kr1) + 12.0));
}

int truncation_order(const PhysicalParams& params, const Contrast& contrast) {
  params.validate();
  int n = std::min(base_truncation_order(params.kr1()), specfun::kMaxOrder);
  while (true) {
    const ModeCoefficients m = mie_coeffs(params, contrast, n);
    if (m.truncated()) return std::max(m.n_max, 0);

    std::vector<complex> jz;
    if (contrast.eps > 0.0) {
      const auto bz = specfun::spherical_bessel(n, params.k * contrast.sqrt_q0 * params.r1);
      jz.reserve(bz.size());
      for (const auto& e : bz) jz.push_back(e.j);
    }
    std::vector<double> w(static_cast<std::size_t>(n + 1));
    for (int i = 0; i <= n; ++i) {
      double mag = std::max(std::abs(m.c[i]), std::abs(m.a[i]));
      if (!jz.empty()) mag = std::max(mag, std::abs(m.b[i] * jz[i]));
      w[i] = (2.0 * i + 1.0) * mag;
    }
    const double peak = *std::max_element(w.begin(), w.end());
    const bool tail_small = n >= 2 && w[n] <= 1e-16 * peak && w[n - 1] <= 1e-16 * peak &&
                            w[n - 2] <= 1e-16 * peak;
    if (tail_small || n >= specfun::kMaxOrder) return n;
    n = std::min(n + std::max(8, n / 4), specfun::kMaxOrder);
  }
}

}  // namespace effmed
