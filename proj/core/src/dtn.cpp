#include "effmed/dtn.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "effmed/specfun.hpp"

namespace effmed {

namespace {
constexpr complex kI{0.0, 1.0};
}

std::vector<DtnSymbol> dtn_symbols(double k, double r, int n_max) {
  if (!(k > 0.0) || !(r > 0.0)) throw std::invalid_argument("dtn_symbols: k and r must be positive");
  if (n_max < 0) throw std::invalid_argument("dtn_symbols: n_max must be nonnegative");
  const double t = k * r;

  // rho_n = h_{n+1}(t) / h_n(t) obeys rho_n = (2n+1)/t - 1/rho_{n-1};
  // rho_0 = (t + i)/(i t) from h_0 = -i e^{it}/t and h_1 = -e^{it}(t + i)/t^2.
  std::vector<DtnSymbol> out(static_cast<std::size_t>(n_max) + 1);
  complex rho = (t + kI) / (kI * t);
  for (int n = 0; n <= n_max; ++n) {
    if (n > 0) rho = (2.0 * n + 1.0) / t - 1.0 / rho;
    // h_n' / h_n = -rho_n + n / t
    out[n] = {n, r, k * (-rho + static_cast<double>(n) / t), -(n + 1.0) / r};
  }
  return out;
}

double radiation_consistency(const PhysicalParams& params, const ModeCoefficients& coeffs,
                             Problem problem, double r, double symbol_scale) {
  if (!(r > params.r1)) throw std::invalid_argument("radiation_consistency: r must exceed r1");
  const auto& x = problem == Problem::soft ? coeffs.c : coeffs.a;
  if ((problem == Problem::soft && !coeffs.has_soft) ||
      (problem == Problem::effective && !coeffs.has_effective)) {
    throw std::domain_error("radiation_consistency: coefficients not populated");
  }
  const int n_max = coeffs.n_max;
  if (n_max < 0) return 0.0;
  const auto bh = specfun::spherical_bessel(n_max, params.k * r);
  const auto sym = dtn_symbols(params.k, r, n_max);
  double worst = 0.0;
  for (int n = 0; n <= n_max; ++n) {
    if (bh[n].overflowed) break;
    const complex u = x[n] * bh[n].h1;
    if (std::abs(x[n]) < 1e-300 || u == 0.0) continue;
    const complex neumann = params.k * x[n] * bh[n].dh1;
    const complex mapped = symbol_scale * sym[n].lambda * u;
    const double scale = std::max(std::abs(neumann), std::abs(mapped));
    if (scale == 0.0) continue;
    worst = std::max(worst, std::abs(neumann - mapped) / scale);
  }
  return worst;
}

}  // namespace effmed
