#pragma once

#include <algorithm>
#include <cmath>
#include <complex>

#include "effmed/mie.hpp"

namespace effmed::test {

inline double rel_err(complex got, complex want) {
  const double scale = std::abs(want);
  return scale > 0.0 ? std::abs(got - want) / scale : std::abs(got);
}

inline double rel_err(double got, double want) {
  const double scale = std::abs(want);
  return scale > 0.0 ? std::abs(got - want) / scale : std::abs(got);
}

inline PhysicalParams defaults() { return PhysicalParams{}; }

}  // namespace effmed::test
