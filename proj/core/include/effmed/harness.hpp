#pragma once

// eps-sweeps, log-log rate fits and the identity suite.

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "effmed/mie.hpp"

namespace effmed {

struct SweepRecord {
  double eps = 0.0;
  double D = 0.0;  // far-field difference sup-norm
  double T = 0.0;  // trace norm on the sphere
  double bound_D = 0.0;  // C_inf sqrt(eps), printed variant
  double bound_T = 0.0;  // C_v sqrt(eps)
  double max_transmission_residual = 0.0;
  double flux_residual = 0.0;  // relative, quadrature vs mode sum at r = 2 r1
  int n_max_used = 0;
  double coeff_gap = 0.0;  // max_n |A_n - C_n|; not part of the CSV
  double gamma_at_sup = 0.0;

  bool bounds_hold() const { return D <= bound_D && T <= bound_T; }
};

struct SweepOptions {
  std::optional<int> n_max;  // overrides truncation_order()
  unsigned threads = 0;      // 0: hardware concurrency
};

/// `points` logarithmically spaced values from eps_max down to eps_min.
/// Throws std::invalid_argument for points < 1 or a bad range.
std::vector<double> log_grid(double eps_max, double eps_min, int points);

/// The default 26-point grid on [1e-6, 1e-1].
std::vector<double> default_eps_grid();

/// One record per eps, in grid order. The grid must be strictly decreasing
/// and positive. Records are computed independently and may run on several
/// threads; results do not depend on the thread count.
/// Propagates DegenerateModeError and ParameterRegimeError.
std::vector<SweepRecord> sweep(const PhysicalParams& params, std::span<const double> eps_grid,
                               const SweepOptions& options = {});

enum class Quantity { D, T, coeff_gap };

const char* to_string(Quantity q);

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::pair<double, double> eps_range;
  Quantity quantity = Quantity::D;
  int points_used = 0;
  int excluded_nonpositive = 0;  // records in range with quantity <= 0
};

class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Least-squares slope of log(quantity) against log(eps) over records with
/// eps in [lo, hi] (inclusive, 1e-9 relative slack). Non-positive values are
/// dropped and counted; fewer than five survivors raise FitError.
RateFit fit_rate(std::span<const SweepRecord> records, Quantity quantity,
                 std::pair<double, double> eps_range);

struct RateReport {
  RateFit fit;
  double crossover_eps = 0.0;  // b_0 / a_0, where a_0 eps = b_0
  bool linear_regime = false;  // slope nearer 1 than 1/2
  std::string statement;
};

RateReport rate_report(const PhysicalParams& params, std::span<const SweepRecord> records,
                       Quantity quantity, std::pair<double, double> eps_range);

struct IdentityCheck {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string note;
};

struct IdentityReport {
  double eps = 0.0;
  int n_max = 0;
  std::vector<IdentityCheck> checks;

  bool all_pass() const;
  const IdentityCheck* find(const std::string& name) const;
};

struct IdentityOptions {
  std::optional<int> n_max;
  /// Build the coefficients from the non-principal root of q0. The checks
  /// still use the principal root, so this must fail.
  bool perturb_branch = false;
};

IdentityReport run_identity_suite(const PhysicalParams& params, double eps,
                                  const IdentityOptions& options = {});

/// Scientific notation with 17 significant digits, locale independent.
std::string format_double(double v);

/// Header `eps,D,T,bound_D,bound_T,max_trans_resid,flux_resid,n_max`.
std::string sweep_csv(std::span<const SweepRecord> records);

/// JSON object {"eps", "n_max", "pass", "checks": [{name, value, tolerance,
/// pass, note}]}.
std::string identity_report_json(const IdentityReport& report);

}  // namespace effmed
