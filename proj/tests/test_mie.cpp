#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>

#include "effmed/harness.hpp"
#include "effmed/mie.hpp"
#include "effmed/observables.hpp"
#include "effmed/quadrature.hpp"
#include "effmed/specfun.hpp"
#include "support.hpp"

using namespace effmed;
using effmed::test::defaults;
using effmed::test::rel_err;

namespace {

constexpr complex kI{0.0, 1.0};

complex total_field(const PhysicalParams& p, const Contrast& c, const ModeCoefficients& m, const Vec3& x) {
  return eval_field(p, c, m, Problem::effective, x);
}

}  // namespace

TEST_SUITE("mie") {

TEST_CASE("contrast and its root") {
  const auto p = defaults();
  for (const double eps : {0.0, 1e-8, 1e-3, 0.1, 3.0}) {
    const Contrast c = make_contrast(p, eps);
    CHECK(c.q0 == complex(eps * p.eta0, p.tau0));
    CHECK(rel_err(c.sqrt_q0 * c.sqrt_q0, c.q0) < 1e-14);
    CHECK(std::abs(std::arg(c.sqrt_q0) - std::arg(c.q0) / 2.0) < 1e-15);
    CHECK(std::arg(c.sqrt_q0) > 0.0);
    CHECK(std::arg(c.sqrt_q0) <= std::numbers::pi / 2);
    const Contrast neg = make_contrast(p, eps, Branch::negated);
    CHECK(neg.sqrt_q0 == -c.sqrt_q0);
  }
  CHECK_THROWS_AS(make_contrast(p, -1e-3), std::invalid_argument);
  CHECK_THROWS_AS(make_contrast(p, std::nan("")), std::invalid_argument);
}

TEST_CASE("parameter validation") {
  PhysicalParams p;
  p.d = {1.0, 1.0, 0.0};
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  PhysicalParams q;
  q.tau0 = 0.0;
  CHECK_THROWS_AS(q.validate(), std::invalid_argument);
  CHECK_THROWS_AS(soft_sphere_coeffs(defaults(), -1), std::invalid_argument);
}

TEST_CASE("soft-sphere coefficient examples") {
  PhysicalParams p;
  p.k = std::numbers::pi;
  const auto m = soft_sphere_coeffs(p, 5);
  CHECK(std::abs(m.c[0]) < 1e-15);

  const auto d = soft_sphere_coeffs(defaults(), 5);
  const complex c0 = -std::sin(1.0) / (-kI * std::exp(kI));
  CHECK(rel_err(d.c[0], c0) < 1e-15);
  CHECK(std::abs(d.c[0]) == doctest::Approx(std::sin(1.0)).epsilon(1e-15));
}

TEST_CASE("soft sphere against boundary collocation") {
  // Least squares for alpha_n in u^s = sum alpha_n h_n(kr) P_n(mu) with
  // u^s = -e^{ik r1 mu} at collocation nodes; far field from the large-r
  // asymptotics h_n(kr) ~ (-i)^{n+1} e^{ikr}/(kr).
  const auto p = defaults();
  const int n_max = 20;
  const int rows = 80;
  const auto h = specfun::spherical_bessel(n_max, p.kr1());
  Eigen::MatrixXcd A(rows, n_max + 1);
  Eigen::VectorXcd rhs(rows);
  for (int i = 0; i < rows; ++i) {
    const double mu = std::cos(std::numbers::pi * (i + 0.5) / rows);
    const auto leg = specfun::legendre(n_max, mu);
    for (int n = 0; n <= n_max; ++n) A(i, n) = leg[n];  // unknowns scaled by h_n(k r1)
    rhs(i) = -std::exp(kI * p.kr1() * mu);
  }
  Eigen::VectorXcd alpha = A.colPivHouseholderQr().solve(rhs);
  for (int n = 0; n <= n_max; ++n) alpha(n) /= h[n].h1;

  const auto coeffs = soft_sphere_coeffs(p, n_max);
  for (const double gamma : {0.0, 0.5, 1.3, 2.0, std::numbers::pi}) {
    const auto leg = specfun::legendre(n_max, std::cos(gamma));
    complex oracle = 0.0;
    complex phase = -kI;
    for (int n = 0; n <= n_max; ++n) {
      oracle += alpha(n) * phase * leg[n];
      phase *= -kI;
    }
    oracle /= p.k;
    CHECK(std::abs(far_field_at(p, coeffs, Problem::soft, gamma) - oracle) < 1e-8);
  }
}

TEST_CASE("eps = 0 limit") {
  const auto p = defaults();
  const auto m = mie_coeffs(p, make_contrast(p, 0.0), 30);
  for (int n = 0; n <= m.n_max; ++n) {
    CHECK(m.b[n] == complex(0.0));
    CHECK(m.a[n] == m.c[n]);
  }
}

TEST_CASE("transmission conditions") {
  const auto p = defaults();
  const Contrast c = make_contrast(p, 1e-3);
  const auto m = mie_coeffs(p, c, 25);
  REQUIRE(m.n_max == 25);
  for (const auto& r : transmission_residuals(p, c, m)) {
    CHECK(r.continuity < 1e-10);
    CHECK(r.flux < 1e-10);
  }
  for (const double eps : default_eps_grid()) {
    const Contrast ce = make_contrast(p, eps);
    const auto me = mie_coeffs(p, ce, truncation_order(p, ce));
    for (const auto& r : transmission_residuals(p, ce, me)) {
      CHECK(r.continuity < 1e-10);
      CHECK(r.flux < 1e-10);
    }
  }
}

TEST_CASE("gap between effective and soft coefficients") {
  const auto p = defaults();
  const double t = p.kr1();
  for (const double eps : {1e-1, 1e-3, 1e-6}) {
    const Contrast c = make_contrast(p, eps);
    const auto m = mie_coeffs(p, c, 20);
    const auto bt = specfun::spherical_bessel(20, t);
    const auto bz = specfun::spherical_bessel(20, p.k * c.sqrt_q0 * p.r1);
    for (int n = 0; n <= 20; ++n) {
      const complex den = -eps * bz[n].j * bt[n].dh1 + c.sqrt_q0 * bt[n].h1 * bz[n].dj;
      const double want = std::abs(4.0 * std::numbers::pi * kI * eps * bz[n].j) /
                          std::abs(4.0 * std::numbers::pi * t * t * bt[n].h1 * den);
      CHECK(rel_err(std::abs(m.a[n] - m.c[n]), want) < 1e-9);
    }
  }
}

TEST_CASE("coefficient gap shrinks with eps") {
  const auto p = defaults();
  double prev = std::numeric_limits<double>::infinity();
  for (const double eps : {1e-2, 1e-4, 1e-6, 1e-8}) {
    const double g = coefficient_gap(mie_coeffs(p, make_contrast(p, eps), 20));
    CHECK(g < prev);
    prev = g;
  }
  CHECK(prev < 1e-7);
}

TEST_CASE("field values") {
  const auto p = defaults();
  const Contrast c0 = make_contrast(p, 0.0);
  const auto soft = mie_coeffs(p, c0, truncation_order(p, c0));
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    Vec3 x{u(rng), u(rng), u(rng)};
    const double len = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
    for (double& v : x) v *= p.r1 * (1.0 + 1e-14) / len;
    CHECK(std::abs(eval_field(p, c0, soft, Problem::soft, x)) < 1e-9);
  }
  CHECK_THROWS_AS(eval_field(p, c0, soft, Problem::soft, {0.1, 0.0, 0.2}), std::domain_error);
  CHECK_THROWS_AS(eval_field(p, c0, soft, Problem::effective, {0.0, 0.0, 0.0}), std::domain_error);

  const Contrast c = make_contrast(p, 1e-2);
  const auto m = mie_coeffs(p, c, truncation_order(p, c));
  for (const double mu : {-1.0, -0.3, 0.4, 1.0}) {
    const double s = std::sqrt(1.0 - mu * mu);
    const Vec3 on{s * p.r1, 0.0, mu * p.r1};
    const Vec3 in{s * p.r1 * (1.0 - 1e-12), 0.0, mu * p.r1 * (1.0 - 1e-12)};
    const complex outside = total_field(p, c, m, on);
    CHECK(rel_err(total_field(p, c, m, in), outside) < 1e-9);
  }
}

TEST_CASE("truncation robustness") {
  const auto p = defaults();
  const Contrast c = make_contrast(p, 1e-2);
  const int n = truncation_order(p, c);
  CHECK(n == 17);
  const Vec3 x{0.0, 0.0, 2.0};
  const complex a = total_field(p, c, mie_coeffs(p, c, n), x);
  const complex b = total_field(p, c, mie_coeffs(p, c, 2 * n), x);
  CHECK(rel_err(a, b) < 1e-12);

  const double d1 = far_field_difference(p, c, n).value;
  const double d2 = far_field_difference(p, c, 2 * n).value;
  CHECK(rel_err(d1, d2) < 1e-12);

  CHECK(base_truncation_order(1.0) == 17);
  CHECK(base_truncation_order(10.0) >= 30);
  PhysicalParams big;
  big.k = 10.0;
  big.eta0 = 0.01;
  CHECK(truncation_order(big, make_contrast(big, 1e-2)) >= 30);
}

TEST_CASE("interior field solves the Helmholtz equation") {
  const auto p = defaults();
  const Contrast c = make_contrast(p, 1e-2);
  const auto m = mie_coeffs(p, c, truncation_order(p, c));
  const double h = 1e-4 * p.r1;
  const complex kq = p.k * p.k * c.q0;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int tested = 0;
  while (tested < 20) {
    const Vec3 x{u(rng), u(rng), u(rng)};
    const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
    if (r > 0.9 * p.r1 || r < 0.05) continue;
    ++tested;
    const complex u0 = total_field(p, c, m, x);
    complex lap = -6.0 * u0;
    for (int axis = 0; axis < 3; ++axis) {
      Vec3 xp = x, xm = x;
      xp[axis] += h;
      xm[axis] -= h;
      lap += total_field(p, c, m, xp) + total_field(p, c, m, xm);
    }
    lap /= h * h;
    CHECK(std::abs(lap + kq * u0) < 1e-4 * std::abs(kq * u0));
  }
}

}  // TEST_SUITE
