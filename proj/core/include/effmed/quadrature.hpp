#pragma once

#include <functional>
#include <vector>

namespace effmed::quadrature {

struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1]; exact for polynomials of degree
/// 2n - 1.
GaussLegendreRule gauss_legendre(int n);

/// Node count used for sphere integrals of fields truncated at n_max.
inline int sphere_rule_size(int n_max) { return 2 * n_max + 16; }

struct Maximum {
  double x = 0.0;
  double value = 0.0;
};

/// Golden-section search for the maximum of a unimodal f on [lo, hi],
/// stopping once the bracket is narrower than tol.
Maximum golden_section_maximize(const std::function<double(double)>& f, double lo,
                                double hi, double tol);

}  // namespace effmed::quadrature
