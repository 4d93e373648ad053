#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <numbers>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "effmed/dtn.hpp"
#include "effmed/harness.hpp"
#include "effmed/mie.hpp"
#include "effmed/observables.hpp"

namespace effmed::cli {

namespace {

using json = nlohmann::ordered_json;

struct Options {
  double k = 1.0;
  double r1 = 1.0;
  double eta0 = 1.0;
  double tau0 = 1.0;
  std::string d = "0,0,1";
  double eps = 1e-3;
  double eps_min = 1e-6;
  double eps_max = 1e-1;
  int points = 26;
  std::optional<int> n_max;
  std::string out;
  std::string format;
  int samples = 361;
  bool perturb_branch = false;
  unsigned threads = 0;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Vec3 parse_direction(const std::string& text) {
  Vec3 v{};
  std::stringstream ss(text);
  std::string item;
  int i = 0;
  while (std::getline(ss, item, ',')) {
    if (i == 3) throw UsageError("--d expects three comma-separated numbers");
    try {
      std::size_t used = 0;
      v[i] = std::stod(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("--d: cannot parse '" + item + "'");
    }
    ++i;
  }
  if (i != 3) throw UsageError("--d expects three comma-separated numbers");
  const double len = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  if (!(len > 0.0) || !std::isfinite(len)) throw UsageError("--d must be a nonzero finite vector");
  for (double& c : v) c /= len;
  return v;
}

PhysicalParams make_params(const Options& o) {
  PhysicalParams p;
  p.k = o.k;
  p.r1 = o.r1;
  p.eta0 = o.eta0;
  p.tau0 = o.tau0;
  p.d = parse_direction(o.d);
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return p;
}

void check_eps(double eps) {
  if (!(eps >= 0.0) || !std::isfinite(eps)) throw UsageError("--eps must be finite and >= 0");
}

int resolve_n_max(const Options& o, const PhysicalParams& params, const Contrast& contrast,
                  std::ostream& err) {
  const int automatic = truncation_order(params, contrast);
  if (!o.n_max) return automatic;
  if (*o.n_max < automatic) {
    err << "warning: --nmax " << *o.n_max << " is below the automatic truncation order "
        << automatic << "\n";
  }
  return *o.n_max;
}

// Output goes to --out when given, else to `fallback`.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary | std::ios::trunc);
      if (!*file_) throw UsageError("cannot open '" + path + "' for writing");
      stream_ = file_.get();
    }
  }
  std::ostream& stream() { return *stream_; }
  bool to_file() const { return file_ != nullptr; }
  void finish() {
    stream_->flush();
    if (!*stream_) throw UsageError("write failed");
  }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_;
};

std::string csv_row(std::initializer_list<double> values) {
  std::string row;
  bool first = true;
  for (const double v : values) {
    if (!first) row += ',';
    row += format_double(v);
    first = false;
  }
  return row;
}

int cmd_sweep(const Options& o, std::ostream& out, std::ostream& err) {
  const PhysicalParams params = make_params(o);
  if (o.points < 1) throw UsageError("--points must be at least 1");
  std::vector<double> grid;
  try {
    grid = log_grid(o.eps_max, o.eps_min, o.points);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (o.format == "json") throw UsageError("sweep writes csv only");
  Sink sink(o.out, out);

  SweepOptions so;
  so.n_max = o.n_max;
  so.threads = o.threads;
  const auto records = sweep(params, grid, so);
  sink.stream() << sweep_csv(records);
  sink.finish();

  std::ostream& report = sink.to_file() ? out : err;
  const std::pair<double, double> window{std::max(1e-4, o.eps_min), o.eps_max};
  try {
    const RateReport rep = rate_report(params, records, Quantity::D, window);
    report << rep.statement << "\n";
  } catch (const FitError&) {
    report << "rate fit skipped: fewer than 5 grid points in [" << format_double(window.first) << ", "
           << format_double(window.second) << "]\n";
  }

  int violations = 0;
  for (const auto& r : records) {
    if (!r.bounds_hold()) {
      ++violations;
      err << "bound violated at eps = " << format_double(r.eps) << ": D = " << format_double(r.D)
          << " (bound " << format_double(r.bound_D) << "), T = " << format_double(r.T) << " (bound "
          << format_double(r.bound_T) << ")\n";
    }
  }
  return violations ? kFailure : kOk;
}

int cmd_farfield(const Options& o, std::ostream& out, std::ostream& err) {
  const PhysicalParams params = make_params(o);
  check_eps(o.eps);
  if (o.samples < 1) throw UsageError("--samples must be at least 1");
  const std::string format = o.format.empty() ? "csv" : o.format;
  Sink sink(o.out, out);

  const Contrast contrast = make_contrast(params, o.eps);
  const ModeCoefficients coeffs = mie_coeffs(params, contrast, resolve_n_max(o, params, contrast, err));
  std::vector<double> gammas(o.samples, 0.0);
  for (int i = 1; i < o.samples; ++i) gammas[i] = std::numbers::pi * i / (o.samples - 1);
  const auto soft = far_field(params, coeffs, Problem::soft, gammas);
  const auto eff = far_field(params, coeffs, Problem::effective, gammas);

  if (format == "csv") {
    sink.stream() << "gamma,re_u,im_u,re_u_eps,im_u_eps,abs_diff\n";
    for (std::size_t i = 0; i < gammas.size(); ++i) {
      const complex u = soft.samples[i].value;
      const complex ue = eff.samples[i].value;
      sink.stream() << csv_row({gammas[i], u.real(), u.imag(), ue.real(), ue.imag(), std::abs(ue - u)})
                    << "\n";
    }
  } else {
    json j;
    j["eps"] = o.eps;
    j["n_max"] = coeffs.n_max;
    j["rows"] = json::array();
    for (std::size_t i = 0; i < gammas.size(); ++i) {
      const complex u = soft.samples[i].value;
      const complex ue = eff.samples[i].value;
      j["rows"].push_back({{"gamma", gammas[i]},
                           {"u", {u.real(), u.imag()}},
                           {"u_eps", {ue.real(), ue.imag()}},
                           {"abs_diff", std::abs(ue - u)}});
    }
    sink.stream() << j.dump(2) << "\n";
  }
  sink.finish();
  return kOk;
}

int cmd_trace(const Options& o, std::ostream& out, std::ostream& err) {
  const PhysicalParams params = make_params(o);
  check_eps(o.eps);
  Sink sink(o.out, out);
  const Contrast contrast = make_contrast(params, o.eps);
  const int n_max = resolve_n_max(o, params, contrast, err);
  const double T = trace_norm(params, contrast, n_max);
  const BoundConstants bc = bound_constants(params, std::max(n_max, base_truncation_order(params.kr1())));
  const double bound = bc.c_v * std::sqrt(o.eps);
  if (o.format == "json") {
    json j{{"eps", o.eps}, {"T", T}, {"bound_T", bound}, {"n_max", n_max}};
    sink.stream() << j.dump(2) << "\n";
  } else {
    sink.stream() << "eps,T,bound_T,n_max\n"
                  << csv_row({o.eps, T, bound}) << ',' << n_max << "\n";
  }
  sink.finish();
  return T <= bound ? kOk : kFailure;
}

int cmd_coeffs(const Options& o, std::ostream& out, std::ostream& err) {
  const PhysicalParams params = make_params(o);
  check_eps(o.eps);
  Sink sink(o.out, out);
  const Contrast principal = make_contrast(params, o.eps);
  const Contrast used =
      o.perturb_branch ? make_contrast(params, o.eps, Branch::negated) : principal;
  const ModeCoefficients coeffs = mie_coeffs(params, used, resolve_n_max(o, params, principal, err));
  const auto resid = transmission_residuals(params, principal, coeffs);

  if (o.format == "json") {
    json j;
    j["eps"] = o.eps;
    j["n_max"] = coeffs.n_max;
    j["modes"] = json::array();
    for (int n = 0; n <= coeffs.n_max; ++n) {
      j["modes"].push_back({{"n", n},
                            {"c", {coeffs.c[n].real(), coeffs.c[n].imag()}},
                            {"a", {coeffs.a[n].real(), coeffs.a[n].imag()}},
                            {"b", {coeffs.b[n].real(), coeffs.b[n].imag()}},
                            {"resid_continuity", resid[n].continuity},
                            {"resid_flux", resid[n].flux}});
    }
    sink.stream() << j.dump(2) << "\n";
  } else {
    sink.stream() << "n,re_c,im_c,re_a,im_a,re_b,im_b,resid_continuity,resid_flux\n";
    for (int n = 0; n <= coeffs.n_max; ++n) {
      sink.stream() << n << ','
                    << csv_row({coeffs.c[n].real(), coeffs.c[n].imag(), coeffs.a[n].real(),
                                coeffs.a[n].imag(), coeffs.b[n].real(), coeffs.b[n].imag(),
                                resid[n].continuity, resid[n].flux})
                    << "\n";
    }
  }
  sink.finish();
  return kOk;
}

int cmd_check(const Options& o, std::ostream& out, std::ostream& err) {
  const PhysicalParams params = make_params(o);
  check_eps(o.eps);
  Sink sink(o.out, out);
  IdentityOptions io;
  io.n_max = o.n_max;
  io.perturb_branch = o.perturb_branch;
  const IdentityReport rep = run_identity_suite(params, o.eps, io);
  if (o.format == "csv") {
    sink.stream() << "name,value,tolerance,pass\n";
    for (const auto& c : rep.checks) {
      sink.stream() << c.name << ',' << format_double(c.value) << ',' << format_double(c.tolerance)
                    << ',' << (c.pass ? "true" : "false") << "\n";
    }
  } else {
    sink.stream() << identity_report_json(rep) << "\n";
  }
  sink.finish();
  for (const auto& c : rep.checks) {
    if (!c.pass) err << "identity check failed: " << c.name << " = " << format_double(c.value) << "\n";
  }
  return rep.all_pass() ? kOk : kFailure;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Effective-medium approximation of a sound-soft sphere", "effmed"};
  app.require_subcommand(1);
  Options o;
  int n_max = -1;

  app.set_config("--config", "", "Flat key = value file; keys mirror the long flag names");
  app.add_option("--k", o.k, "Wavenumber");
  app.add_option("--r1", o.r1, "Sphere radius");
  app.add_option("--eta0", o.eta0, "Real contrast scale");
  app.add_option("--tau0", o.tau0, "Absorption");
  app.add_option("--d", o.d, "Incident direction x,y,z (normalised)");
  app.add_option("--eps", o.eps, "Contrast parameter for farfield, trace, coeffs, check");
  app.add_option("--eps-min", o.eps_min, "Smallest eps of the sweep grid");
  app.add_option("--eps-max", o.eps_max, "Largest eps of the sweep grid");
  app.add_option("--points", o.points, "Number of sweep points");
  auto* nmax_opt = app.add_option("--nmax", n_max, "Truncation order override");
  app.add_option("--out", o.out, "Output file (default: standard output)");
  app.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--samples", o.samples, "Far-field sample count");
  app.add_option("--threads", o.threads, "Sweep worker threads (0: all cores)");
  app.add_flag("--perturb-branch", o.perturb_branch,
               "Debug: build coefficients from the negated root of q0");

  auto* sweep_cmd = app.add_subcommand("sweep", "eps sweep of D, T and their bounds (CSV)");
  auto* farfield_cmd = app.add_subcommand("farfield", "Far-field table at one eps");
  auto* trace_cmd = app.add_subcommand("trace", "Trace norm and its bound at one eps");
  auto* coeffs_cmd = app.add_subcommand("coeffs", "Mode coefficients and transmission residuals");
  auto* check_cmd = app.add_subcommand("check", "Identity suite (JSON report)");
  for (auto* sub : {sweep_cmd, farfield_cmd, trace_cmd, coeffs_cmd, check_cmd}) sub->fallthrough();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "effmed: " << e.what() << "\n" << "run 'effmed --help' for usage\n";
    return kUsage;
  }
  if (nmax_opt->count() > 0 || n_max != -1) {
    if (n_max < 0) {
      err << "effmed: --nmax must be nonnegative\n";
      return kUsage;
    }
    o.n_max = n_max;
  }

  try {
    if (*sweep_cmd) return cmd_sweep(o, out, err);
    if (*farfield_cmd) return cmd_farfield(o, out, err);
    if (*trace_cmd) return cmd_trace(o, out, err);
    if (*coeffs_cmd) return cmd_coeffs(o, out, err);
    return cmd_check(o, out, err);
  } catch (const UsageError& e) {
    err << "effmed: " << e.what() << "\n";
    return kUsage;
  } catch (const ParameterRegimeError& e) {
    err << "effmed: " << e.what() << "\n";
    return kFailure;
  } catch (const DegenerateModeError& e) {
    err << "effmed: " << e.what() << "\n";
    return kFailure;
  } catch (const std::invalid_argument& e) {
    err << "effmed: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "effmed: " << e.what() << "\n";
    return kFailure;
  }
}

}  // namespace effmed::cli
