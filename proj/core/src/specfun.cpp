#include "effmed/specfun.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace effmed::specfun {

namespace {

constexpr complex kI{0.0, 1.0};

// Rescale threshold for the downward recurrence.
constexpr double kBig = 1e200;

// Miller start index. The extra cbrt term covers the turning-point region
// when n_max is small relative to |z|.
int miller_start(int n_top, complex z) {
  const double r = std::abs(z);
  return n_top + 15 + static_cast<int>(std::ceil(r)) +
         static_cast<int>(std::ceil(4.0 * std::cbrt(r)));
}

// j_0 .. j_{n_top} by downward recurrence.
std::vector<complex> bessel_j_downward(int n_top, complex z) {
  const int start = miller_start(n_top, z);
  std::vector<complex> f(static_cast<std::size_t>(n_top) + 1);

  complex above{0.0, 0.0};
  complex cur{1e-30, 0.0};
  for (int n = start; n > 0; --n) {
    const complex below = (2.0 * n + 1.0) / z * cur - above;
    above = cur;
    cur = below;
    if (n - 1 <= n_top) f[n - 1] = cur;
    if (std::abs(cur) > kBig) {
      cur /= kBig;
      above /= kBig;
      for (int m = n - 1; m <= n_top; ++m) f[m] /= kBig;
    }
  }

  // Normalise against whichever closed form is better conditioned.
  const complex s = std::sin(z);
  const complex c = std::cos(z);
  const complex j0 = s / z;
  complex scale;
  if (n_top >= 1) {
    const complex j1 = s / (z * z) - c / z;
    scale = std::abs(j0) >= std::abs(j1) ? j0 / f[0] : j1 / f[1];
  } else {
    scale = j0 / f[0];
  }
  for (auto& v : f) v *= scale;
  return f;
}

}  // namespace

complex hankel1_log_derivative(int n, complex z) {
  // Modified Lentz evaluation of
  //   H'/H = -1/(2z) + i + (i/z) a_1/(b_1 + a_2/(b_2 + ...)),
  //   a_k = (k - 1/2)^2 - nu^2,  b_k = 2(z + i k),  nu = n + 1/2,
  // followed by h'/h = H'/H - 1/(2z).
  const double nu = n + 0.5;
  constexpr double tiny = 1e-300;
  constexpr double eps = std::numeric_limits<double>::epsilon();
  constexpr int max_iter = 200000;

  complex f = tiny;
  complex c = f;
  complex d = 0.0;
  bool converged = false;
  for (int k = 1; k < max_iter; ++k) {
    const double a = (k - 0.5) * (k - 0.5) - nu * nu;
    const complex b = 2.0 * (z + kI * static_cast<double>(k));
    d = b + a * d;
    if (d == 0.0) d = tiny;
    c = b + a / c;
    if (c == 0.0) c = tiny;
    d = 1.0 / d;
    const complex delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < eps) {
      converged = true;
      break;
    }
    if (a == 0.0) {
      // Fraction terminates exactly (n = 0).
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw std::runtime_error("hankel1_log_derivative: continued fraction did not converge");
  }
  return -1.0 / z + kI + kI / z * f;
}

std::vector<SphericalBesselEval> spherical_bessel(int n_max, complex z) {
  if (z == 0.0) throw std::domain_error("spherical_bessel: argument must be nonzero");
  if (n_max < 0 || n_max > kMaxOrder) {
    throw std::domain_error("spherical_bessel: n_max must lie in [0, " +
                            std::to_string(kMaxOrder) + "]");
  }

  // One order beyond n_max for the derivative recurrence.
  const int top = n_max + 1;
  const auto nt = static_cast<std::size_t>(top) + 1;
  const std::vector<complex> j = bessel_j_downward(top + 1, z);

  std::vector<complex> dj(nt);
  for (int n = 0; n <= top; ++n) dj[n] = -j[n + 1] + static_cast<double>(n) / z * j[n];

  std::vector<complex> y(nt);
  std::vector<complex> h(nt);
  std::vector<bool> overflow(nt, false);

  if (std::abs(z.imag()) < 1.0) {
    y[0] = -std::cos(z) / z;
    y[1] = -std::cos(z) / (z * z) - std::sin(z) / z;
    for (int n = 1; n < top; ++n) {
      if (!std::isfinite(std::abs(y[n]))) {
        y[n + 1] = complex(std::numeric_limits<double>::infinity(), 0.0);
        continue;
      }
      y[n + 1] = (2.0 * n + 1.0) / z * y[n] - y[n - 1];
    }
    for (std::size_t n = 0; n < nt; ++n) {
      if (!std::isfinite(y[n].real()) || !std::isfinite(y[n].imag())) {
        overflow[n] = true;
        y[n] = complex(std::numeric_limits<double>::infinity(), 0.0);
        h[n] = complex(std::numeric_limits<double>::infinity(),
                       std::numeric_limits<double>::infinity());
      } else {
        h[n] = j[n] + kI * y[n];
      }
    }
  } else {
    // The continued fraction is run in the upper half plane only. Below the
    // axis h^(2)(z) = conj(h^(1)(conj z)) is the small function and
    // h^(1) = 2 j - h^(2).
    const bool upper = z.imag() > 0.0;
    const complex z2 = z * z;
    for (int n = 0; n <= top; ++n) {
      if (upper) {
        const complex L = hankel1_log_derivative(n, z);
        h[n] = kI / (z2 * (j[n] * L - dj[n]));
      } else {
        const complex L = std::conj(hankel1_log_derivative(n, std::conj(z)));
        h[n] = 2.0 * j[n] + kI / (z2 * (j[n] * L - dj[n]));
      }
      if (!std::isfinite(h[n].real()) || !std::isfinite(h[n].imag())) {
        overflow[n] = true;
        y[n] = complex(std::numeric_limits<double>::infinity(), 0.0);
        h[n] = complex(std::numeric_limits<double>::infinity(),
                       std::numeric_limits<double>::infinity());
      } else {
        y[n] = (h[n] - j[n]) / kI;
      }
    }
  }

  std::vector<SphericalBesselEval> out(static_cast<std::size_t>(n_max) + 1);
  for (int n = 0; n <= n_max; ++n) {
    auto& e = out[n];
    const double nz = static_cast<double>(n);
    e.n = n;
    e.z = z;
    e.j = j[n];
    e.y = y[n];
    e.h1 = h[n];
    e.dj = dj[n];
    e.overflowed = overflow[n] || overflow[n + 1];
    if (e.overflowed) {
      e.dy = complex(std::numeric_limits<double>::infinity(), 0.0);
      e.dh1 = complex(std::numeric_limits<double>::infinity(),
                      std::numeric_limits<double>::infinity());
    } else {
      e.dy = -y[n + 1] + nz / z * y[n];
      e.dh1 = -h[n + 1] + nz / z * h[n];
    }
  }
  return out;
}

std::vector<double> legendre(int n_max, double t) {
  if (!(std::abs(t) <= 1.0)) throw std::domain_error("legendre: |t| must not exceed 1");
  if (n_max < 0) throw std::domain_error("legendre: n_max must be nonnegative");
  std::vector<double> p(static_cast<std::size_t>(n_max) + 1);
  p[0] = 1.0;
  if (n_max >= 1) p[1] = t;
  for (int n = 1; n < n_max; ++n) {
    p[n + 1] = ((2.0 * n + 1.0) * t * p[n] - n * p[n - 1]) / (n + 1.0);
  }
  return p;
}

}  // namespace effmed::specfun
