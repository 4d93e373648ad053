#pragma once

// Dirichlet-to-Neumann maps on the sphere of radius r. Both are diagonal in
// spherical harmonics, so only their symbols per degree n are represented.

#include <complex>
#include <vector>

#include "effmed/mie.hpp"

namespace effmed {

struct DtnSymbol {
  int n = 0;
  double r = 0.0;
  complex lambda;        // k h_n'(kr) / h_n(kr), radiating exterior Helmholtz
  double lambda0 = 0.0;  // -(n+1)/r, decaying exterior harmonic
};

/// Symbols for n = 0..n_max. The Hankel ratio is propagated directly, so
/// large n does not overflow.
std::vector<DtnSymbol> dtn_symbols(double k, double r, int n_max);

/// max over modes of |k A_n h_n'(kr) - lambda_n A_n h_n(kr)| relative to the
/// larger of the two terms. Modes whose scattered amplitude is below 1e-300
/// are skipped. symbol_scale multiplies every lambda_n (fault injection).
double radiation_consistency(const PhysicalParams& params, const ModeCoefficients& coeffs,
                             Problem problem, double r, double symbol_scale = 1.0);

}  // namespace effmed
