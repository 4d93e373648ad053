#pragma once

// Series solutions for plane-wave scattering by a ball of radius r1: the
// sound-soft obstacle (u = 0 on the sphere) and the lossy penetrable medium
// that replaces it (gamma = 1/eps, q = eta0 + i tau0/eps inside).
//
// Coefficients are stored in reduced form. With the addition theorem every
// m-sum collapses to a Legendre polynomial of x.d, so the fields read
//   u^s(x)     = sum_n (2n+1) i^n X_n h_n(k|x|) P_n(xhat.d),  X in {C, A}
//   u_eps(x)   = sum_n (2n+1) i^n B_n j_n(k sqrt(q0) |x|) P_n(xhat.d)
// and the full coefficients are X_n^m = X_n i^n 4 pi conj(Y_n^m(d)).

#include <array>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace effmed {

using complex = std::complex<double>;
using Vec3 = std::array<double, 3>;

/// Fixed problem data. Defaults are the regime used throughout the tests.
struct PhysicalParams {
  double k = 1.0;
  double r1 = 1.0;
  Vec3 d{0.0, 0.0, 1.0};
  double eta0 = 1.0;
  double tau0 = 1.0;

  /// Throws std::invalid_argument unless k, r1, eta0, tau0 > 0 and |d| = 1.
  void validate() const;
  double kr1() const { return k * r1; }
};

enum class Branch {
  principal,  // Arg(sqrt q0) = Arg(q0)/2
  negated,    // the other root; fault injection only
};

/// One value of eps with q0 = eps*eta0 + i*tau0 and its square root.
struct Contrast {
  double eps = 0.0;
  complex q0;
  complex sqrt_q0;
};

/// Throws std::invalid_argument for eps < 0 or non-finite eps.
Contrast make_contrast(const PhysicalParams& params, double eps,
                       Branch branch = Branch::principal);

/// Per-mode reduced coefficients. Only the vectors for the problems that
/// were solved are populated.
struct ModeCoefficients {
  int n_max = 0;            // last mode stored (after any truncation)
  int requested_n_max = 0;  // what the caller asked for
  bool has_soft = false;
  bool has_effective = false;
  std::vector<complex> c;  // sound-soft scattering
  std::vector<complex> a;  // effective-medium scattering
  std::vector<complex> b;  // effective-medium interior
  double eps = 0.0;
  complex sqrt_q0;

  bool truncated() const { return n_max < requested_n_max; }
};

/// Raised when the linear system for a mode is numerically singular.
class DegenerateModeError : public std::runtime_error {
 public:
  DegenerateModeError(int n, double eps);
  int mode() const { return n_; }
  double eps() const { return eps_; }

 private:
  int n_;
  double eps_;
};

/// C_n = -j_n(k r1) / h_n(k r1). If h_n overflows the series is cut at the
/// last finite mode and n_max reports the cut.
ModeCoefficients soft_sphere_coeffs(const PhysicalParams& params, int n_max);

/// A_n and B_n from the transmission conditions. eps = 0 is accepted and
/// yields A_n = C_n, B_n = 0.
ModeCoefficients effective_medium_coeffs(const PhysicalParams& params,
                                         const Contrast& contrast, int n_max);

/// Both problems in one pass; n_max is the smaller of the two cuts.
ModeCoefficients mie_coeffs(const PhysicalParams& params, const Contrast& contrast,
                            int n_max);

/// Relative residuals of the two transmission conditions per mode.
struct TransmissionResidual {
  double continuity = 0.0;  // B j(z) - A h(t) - j(t)
  double flux = 0.0;        // sqrt(q0) B j'(z) - eps (A h'(t) + j'(t))
};

/// Evaluates the transmission conditions for stored coefficients using the
/// principal root of contrast.q0, independent of contrast.sqrt_q0.
std::vector<TransmissionResidual> transmission_residuals(const PhysicalParams& params,
                                                         const Contrast& contrast,
                                                         const ModeCoefficients& coeffs);

enum class Problem { soft, effective };

/// Total field at x. Inside the ball only the effective problem is defined.
/// Throws std::domain_error for x = 0, for interior points of the soft
/// problem, or when the requested coefficients are missing.
complex eval_field(const PhysicalParams& params, const Contrast& contrast,
                   const ModeCoefficients& coeffs, Problem problem, const Vec3& x);

/// Scattered field and its radial derivative at radius r >= r1 along
/// direction cosine mu = xhat.d.
struct ScatteredSample {
  complex value;
  complex radial_derivative;
};
ScatteredSample scattered_field(const PhysicalParams& params,
                                const ModeCoefficients& coeffs, Problem problem,
                                double r, double mu);

/// Base order ceil(kr1 + 4 (kr1)^(1/3) + 12), grown until the last three
/// weighted coefficient magnitudes fall below 1e-16 of the largest.
int truncation_order(const PhysicalParams& params, const Contrast& contrast);

/// ceil(kr1 + 4 (kr1)^(1/3) + 12).
int base_truncation_order(double kr1);

}  // namespace effmed
