// Acceptance run: one PASS/FAIL line per criterion; nonzero exit if any fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include <unistd.h>

#include "cli.hpp"
#include "effmed/dtn.hpp"
#include "effmed/harness.hpp"
#include "effmed/observables.hpp"
#include "effmed/specfun.hpp"
#include "oracles.hpp"

using namespace effmed;

namespace {

constexpr complex kI{0.0, 1.0};

int failures = 0;

void report(int id, bool pass, const std::string& what, const std::string& detail) {
  std::printf("%s [%d] %s: %s\n", pass ? "PASS" : "FAIL", id, what.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

double rel(complex got, complex want) {
  const double s = std::abs(want);
  return s > 0.0 ? std::abs(got - want) / s : std::abs(got);
}

void special_functions() {
  double closed = 0.0;
  for (const complex z : {complex(0.7), complex(2.5, 0.3), complex(10.0, -4.0), complex(1.3, 6.0),
                          complex(-3.0, 0.5), complex(0.0, 2.0), complex(7.25)}) {
    const auto b = specfun::spherical_bessel(1, z);
    const complex s = std::sin(z), c = std::cos(z);
    const complex j0 = s / z, y0 = -c / z, j1 = s / (z * z) - c / z, y1 = -c / (z * z) - s / z;
    for (const auto [got, want] :
         {std::pair{b[0].j, j0}, {b[0].y, y0}, {b[0].h1, -kI * std::exp(kI * z) / z}, {b[1].j, j1}, {b[1].y, y1},
          {b[1].h1, -std::exp(kI * z) * (z + kI) / (z * z)}, {b[0].dj, -j1}, {b[0].dy, -y1}, {b[1].dj, j0 - 2.0 * j1 / z},
          {b[1].dy, y0 - 2.0 * y1 / z}}) {
      closed = std::max(closed, rel(got, want));
    }
  }
  double oracle = 0.0;
  for (const auto& r : oracle::kBesselReference) {
    const auto& e = specfun::spherical_bessel(r.n, r.z)[r.n];
    for (const auto [got, want] : {std::pair{e.j, r.j}, {e.y, r.y}, {e.h1, r.h1}, {e.dj, r.dj}, {e.dy, r.dy},
                                   {e.dh1, r.dh1}}) {
      oracle = std::max(oracle, rel(got, want));
    }
  }
  double wronskian = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double t = 0.1 * std::pow(500.0, i / 199.0);
    for (const auto& e : specfun::spherical_bessel(50, t)) {
      if (e.overflowed) break;
      wronskian = std::max(wronskian, std::abs((e.j * e.dy - e.dj * e.y) * (t * t) - 1.0));
    }
  }
  report(1, closed < 1e-14 && oracle < 1e-11 && wronskian < 1e-10, "special functions",
         "closed-form " + sci(closed) + " (<1e-14), reference " + sci(oracle) + " (<1e-11), Wronskian " +
             sci(wronskian) + " (<1e-10)");
}

void transmission() {
  const PhysicalParams p;
  double worst = 0.0;
  for (const double eps : default_eps_grid()) {
    const Contrast c = make_contrast(p, eps);
    const auto m = mie_coeffs(p, c, truncation_order(p, c));
    for (const auto& r : transmission_residuals(p, c, m)) worst = std::max({worst, r.continuity, r.flux});
  }
  report(2, worst < 1e-10, "transmission conditions", "max per-mode residual " + sci(worst) + " (<1e-10)");
}

void soft_limit() {
  const PhysicalParams p;
  const auto coarse = sweep(p, std::vector<double>{1e-2, 1e-4, 1e-6, 1e-8});
  bool monotone = true;
  for (std::size_t i = 1; i < coarse.size(); ++i) monotone = monotone && coarse[i].coeff_gap < coarse[i - 1].coeff_gap;
  const auto fine = sweep(p, log_grid(1e-2, 1e-6, 9));
  const RateFit f = fit_rate(fine, Quantity::coeff_gap, {1e-6, 1e-2});
  report(3, monotone && f.slope >= 0.45 && f.slope <= 1.1, "soft-sphere limit",
         std::string("gap monotone ") + (monotone ? "yes" : "no") + ", slope on [1e-6, 1e-2] " + sci(f.slope) +
             " (in [0.45, 1.1])");
}

void far_field_bound(const std::vector<SweepRecord>& recs) {
  const PhysicalParams p;
  double ratio = 0.0;
  for (const auto& r : recs) ratio = std::max(ratio, r.D / r.bound_D);
  int n_top = 0;
  for (const auto& r : recs) n_top = std::max(n_top, r.n_max_used);
  const auto bc = bound_constants(p, n_top);
  bool per_mode = true;
  for (const auto& r : recs) {
    for (std::size_t n = 0; n < bc.a.size(); ++n) {
      const double a = bc.a[n], b = bc.b[n];
      per_mode = per_mode && r.eps / std::sqrt(a * a * r.eps * r.eps + b * b) <= std::sqrt(r.eps) / std::sqrt(2.0 * a * b);
    }
  }
  report(4, ratio <= 1.0 && per_mode, "far-field bound",
         "max D/(C_inf sqrt(eps)) " + sci(ratio) + " over " + std::to_string(recs.size()) +
             " points, per-mode inequality " + (per_mode ? "holds" : "violated"));
}

void trace_bound(const std::vector<SweepRecord>& recs) {
  const PhysicalParams p;
  double ratio = 0.0;
  for (const auto& r : recs) ratio = std::max(ratio, r.T / r.bound_T);
  const double t0 = trace_norm(p, make_contrast(p, 0.0));
  const Contrast c = make_contrast(p, 1e-3);
  const auto m = mie_coeffs(p, c, truncation_order(p, c));
  const double T = trace_norm(p, m);
  const double proj = std::abs(T - oracle::trace_norm_projection(p, c, m)) / T;
  report(5, ratio <= 1.0 && t0 == 0.0 && proj < 1e-8, "trace bound",
         "max T/(C_v sqrt(eps)) " + sci(ratio) + ", T(0) = " + sci(t0) + ", projection oracle " + sci(proj) +
             " (<1e-8)");
}

void flux_identities() {
  const PhysicalParams p;
  double worst = 0.0;
  double min_flux = std::numeric_limits<double>::infinity();
  for (const double eps : {0.0, 1e-3, 1e-1}) {
    const Contrast c = make_contrast(p, eps);
    const auto m = mie_coeffs(p, c, truncation_order(p, c));
    const double quad = scattered_flux_quadrature(p, m, Problem::effective, 2.0 * p.r1);
    const double modes = scattered_flux_mode_sum(p, m, Problem::effective);
    const double eq = far_field_energy_quadrature(p, m, Problem::effective);
    const double em = far_field_energy_mode_sum(p, m, Problem::effective);
    worst = std::max({worst, std::abs(quad - modes) / modes, std::abs(eq - em) / em});
    min_flux = std::min(min_flux, quad);
  }
  report(6, worst < 1e-9 && min_flux >= 0.0, "flux and far-field energy",
         "max relative mismatch " + sci(worst) + " (<1e-9), min Im flux " + sci(min_flux));
}

void dtn() {
  const PhysicalParams p;
  double resid = 0.0;
  for (const double eps : {0.0, 1e-3, 1e-1}) {
    const Contrast c = make_contrast(p, eps);
    const auto m = mie_coeffs(p, c, truncation_order(p, c));
    for (const Problem pr : {Problem::soft, Problem::effective}) {
      resid = std::max(resid, radiation_consistency(p, m, pr, 2.0 * p.r1));
    }
  }
  const auto s = dtn_symbols(1.0, 2.0, 500);
  bool negative = true;
  for (const auto& e : s) negative = negative && e.lambda0 < 0.0;
  bool decreasing = true;
  for (int n = 21; n <= 60; ++n) {
    const double prev = std::abs(s[n - 1].lambda - s[n - 1].lambda0) / std::abs(s[n - 1].lambda0);
    const double cur = std::abs(s[n].lambda - s[n].lambda0) / std::abs(s[n].lambda0);
    decreasing = decreasing && cur < prev;
  }
  report(7, resid < 1e-12 && negative && decreasing, "Dirichlet-to-Neumann symbols",
         "radiation residual " + sci(resid) + " (<1e-12), lambda0 < 0 " + (negative ? "yes" : "no") +
             ", ratio decreasing on [20, 60] " + (decreasing ? "yes" : "no"));
}

void rate(const std::vector<SweepRecord>& recs) {
  const PhysicalParams p;
  const RateReport rep = rate_report(p, recs, Quantity::D, {1e-4, 1e-1});
  const bool states_window = rep.statement.find(format_double(rep.fit.eps_range.first)) != std::string::npos &&
                             rep.statement.find(format_double(rep.fit.eps_range.second)) != std::string::npos;
  const bool states_regime = rep.statement.find("regime") != std::string::npos;
  report(8, rep.fit.slope >= 0.45 && rep.fit.slope <= 1.05 && states_window && states_regime, "rate report",
         "slope " + sci(rep.fit.slope) + " on [1e-4, 1e-1] (in [0.45, 1.05]), " +
             (rep.linear_regime ? "slope-1 regime dominates" : "slope-1/2 regime dominates"));
  std::printf("       %s\n", rep.statement.c_str());
}

void determinism() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / ("effmed_accept_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  std::ostringstream sink_out, sink_err;
  const std::string a = (dir / "a.csv").string(), b = (dir / "b.csv").string();
  const int ca = cli::run({"sweep", "--out", a}, sink_out, sink_err);
  const int cb = cli::run({"sweep", "--out", b}, sink_out, sink_err);
  auto slurp = [](const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  };
  const std::string sa = slurp(a), sb = slurp(b);
  fs::remove_all(dir);
  report(9, ca == 0 && cb == 0 && !sa.empty() && sa == sb, "determinism",
         "two sweep runs, " + std::to_string(sa.size()) + " bytes, " + (sa == sb ? "identical" : "different"));
}

}  // namespace

int main() {
  const PhysicalParams defaults;
  const auto recs = sweep(defaults, default_eps_grid());
  special_functions();
  transmission();
  soft_limit();
  far_field_bound(recs);
  trace_bound(recs);
  flux_identities();
  dtn();
  rate(recs);
  determinism();
  std::printf("%d of 9 criteria failed\n", failures);
  return failures ? 1 : 0;
}
