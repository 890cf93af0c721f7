// Command-line front end for the polymer large-deviation library.
//
//   oyldp compute  --curve <name> ...     analytic curves as CSV/JSON
//   oyldp simulate --estimator <name> ... Monte Carlo tables, seeded
//   oyldp verify   --suite <name> ...     consistency batteries + JSON report
//
// Exit codes: 0 success, 1 failed verification check, 2 configuration error,
// 3 numeric-domain error, 4 warning escalated by --strict. Outputs carry a
// provenance block (version, seed, config digest) and no timestamps, so a
// rerun with the same inputs is byte-identical.

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "oyldp/convex.hpp"
#include "oyldp/env_grid.hpp"
#include "oyldp/mc.hpp"
#include "oyldp/polymer.hpp"
#include "oyldp/rates.hpp"
#include "oyldp/report.hpp"
#include "oyldp/rng.hpp"
#include "oyldp/specfun.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr double kInf = std::numeric_limits<double>::infinity();

using nlohmann::json;
using oyldp::VerificationReport;
namespace rates = oyldp::rates;
namespace mc = oyldp::mc;
namespace env = oyldp::env;
namespace polymer = oyldp::polymer;

// Configuration problems exit 2; the message always names the field.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt17(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

double parse_double(const std::string& text, const std::string& field) {
  try {
    std::size_t used = 0;
    double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument("trailing junk");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(field + ": '" + text + "' is not a number");
  }
}

long parse_long(const std::string& text, const std::string& field) {
  long v = 0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || p != text.data() + text.size())
    throw ConfigError(field + ": '" + text + "' is not an integer");
  return v;
}

// Either a single scalar "1.5" or a uniform grid "min:max:count" with
// min < max and count >= 2.
struct Range {
  double lo = 0.0;
  double hi = 0.0;
  int count = 1;

  double point(int i) const {
    return count < 2 ? lo : lo + i * (hi - lo) / (count - 1);
  }
};

Range parse_range(const std::string& text, const std::string& field) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : text) {
    if (c == ':') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  if (parts.size() == 1) return {parse_double(parts[0], field), 0.0, 1};
  if (parts.size() != 3)
    throw ConfigError(field + ": expected 'value' or 'min:max:count', got '" +
                      text + "'");
  Range r;
  r.lo = parse_double(parts[0], field);
  r.hi = parse_double(parts[1], field);
  long n = parse_long(parts[2], field);
  if (!(r.lo < r.hi))
    throw ConfigError(field + ": range '" + text + "' needs min < max");
  if (n < 2)
    throw ConfigError(field + ": range '" + text + "' needs count >= 2");
  if (n > 100000000) throw ConfigError(field + ": count too large");
  r.count = static_cast<int>(n);
  return r;
}

std::vector<int> parse_int_list(const std::string& text,
                                const std::string& field) {
  std::vector<int> out;
  std::string cur;
  auto flush = [&] {
    if (cur.empty()) throw ConfigError(field + ": empty entry in '" + text + "'");
    long v = parse_long(cur, field);
    if (v < 1 || v > 4096) throw ConfigError(field + ": value out of range");
    out.push_back(static_cast<int>(v));
    cur.clear();
  };
  for (char c : text) {
    if (c == ',') {
      flush();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      cur += c;
    }
  }
  flush();
  return out;
}

// Fully resolved run parameters (flags > config file > env/defaults).
struct Options {
  std::string command;
  std::string curve;
  std::string estimator;
  std::string suite = "all";
  double s = 1.0;
  double t = 1.0;
  std::string theta = "1";
  std::string xi;
  std::string x;
  std::string lines = "3";
  double horizon = 1.0;
  double step = 1e-3;
  bool step_given = false;
  double trunc_T = 0.0;  // 0 = auto: max(30 / theta, 10), rounded to the step
  long replicates = 1000;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string out;
  std::string format = "csv";
  bool strict = false;

  // Canonical description of the computation only: thread count, output
  // format, and strictness never change the numbers, so they stay out of
  // the digest.
  std::string canonical() const {
    std::ostringstream os;
    os << "command=" << command << ";curve=" << curve
       << ";estimator=" << estimator << ";suite=" << suite << ";s=" << fmt17(s)
       << ";t=" << fmt17(t) << ";theta=" << theta << ";xi=" << xi << ";x=" << x
       << ";lines=" << lines << ";horizon=" << fmt17(horizon)
       << ";step=" << fmt17(step) << ";trunc_T=" << fmt17(trunc_T)
       << ";replicates=" << replicates << ";seed=" << seed;
    return os.str();
  }

  json provenance() const {
    json p;
    p["version"] = kVersion;
    p["command"] = command;
    if (!curve.empty()) p["curve"] = curve;
    if (!estimator.empty()) p["estimator"] = estimator;
    if (command == "verify") p["suite"] = suite;
    p["s"] = s;
    p["t"] = t;
    p["theta"] = theta;
    if (!xi.empty()) p["xi"] = xi;
    if (!x.empty()) p["x"] = x;
    p["lines"] = lines;
    p["horizon"] = horizon;
    p["step"] = step;
    p["trunc_T"] = trunc_T;
    p["replicates"] = replicates;
    p["seed"] = seed;
    p["config_digest"] = hex64(fnv1a64(canonical()));
    return p;
  }
};

// Column-oriented result table with one provenance block.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  json provenance;

  void write_csv(std::ostream& os) const {
    os << "# " << provenance.dump() << "\n";
    for (std::size_t i = 0; i < columns.size(); ++i)
      os << (i ? "," : "") << columns[i];
    os << "\n";
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i)
        os << (i ? "," : "") << fmt17(row[i]);
      os << "\n";
    }
  }

  void write_json(std::ostream& os) const {
    json j;
    j["provenance"] = provenance;
    j["columns"] = columns;
    json rws = json::array();
    for (const auto& row : rows) {
      json r = json::array();
      for (double v : row) {
        if (std::isfinite(v))
          r.push_back(v);
        else
          r.push_back(fmt17(v));
      }
      rws.push_back(r);
    }
    j["rows"] = rws;
    os << j.dump(2) << "\n";
  }
};

void emit(const Table& table, const Options& opt) {
  std::ostream* os = &std::cout;
  std::ofstream file;
  if (!opt.out.empty()) {
    file.open(opt.out);
    if (!file) throw ConfigError("--out: cannot open '" + opt.out + "'");
    os = &file;
  }
  if (opt.format == "json")
    table.write_json(*os);
  else
    table.write_csv(*os);
}

double scalar_or_throw(const std::string& text, const std::string& field) {
  if (text.empty()) throw ConfigError(field + " is required here");
  Range r = parse_range(text, field);
  if (r.count != 1)
    throw ConfigError(field + ": a single value is required here, got a range");
  return r.lo;
}

double auto_trunc(const Options& opt, double theta) {
  if (opt.trunc_T > 0.0) return opt.trunc_T;
  double raw = std::max(30.0 / theta, 10.0);
  return std::ceil(raw / opt.step) * opt.step;
}

// ---------------------------------------------------------------------------
// compute

int cmd_compute(const Options& opt) {
  if (opt.curve.empty()) throw ConfigError("--curve is required for compute");
  Table table;
  table.provenance = opt.provenance();
  rates::Shape sh{opt.s, opt.t};

  auto sweep = [&](const std::string& field, const std::string& column,
                   const std::string& text, auto&& fn) {
    if (text.empty())
      throw ConfigError(field + " is required for curve '" + opt.curve + "'");
    Range r = parse_range(text, field);
    table.columns = {column, "value"};
    table.provenance["grid"] = {{"lo", r.lo},
                               {"hi", r.count < 2 ? r.lo : r.hi},
                               {"count", r.count}};
    for (int i = 0; i < r.count; ++i) {
      double p = r.point(i);
      table.rows.push_back({p, fn(p)});
    }
  };

  if (opt.curve == "free-energy") {
    table.columns = {"s", "t", "theta_star", "value"};
    table.rows.push_back(
        {opt.s, opt.t, rates::free_energy_tilt(sh), rates::free_energy(sh)});
  } else if (opt.curve == "lyapunov") {
    sweep("--xi", "xi", opt.xi, [&](double v) { return rates::lyapunov(sh, v); });
  } else if (opt.curve == "lyapunov-dual") {
    sweep("--xi", "xi", opt.xi,
          [&](double v) { return rates::lyapunov_dual_form(sh, v); });
  } else if (opt.curve == "rate") {
    sweep("--x", "x", opt.x, [&](double v) { return rates::rate_function(sh, v); });
  } else if (opt.curve == "stationary-u") {
    double theta = scalar_or_throw(opt.theta, "--theta");
    sweep("--x", "x", opt.x,
          [&](double v) { return rates::stationary_rate_u(opt.s, theta, v); });
  } else if (opt.curve == "brownian-r") {
    double theta = scalar_or_throw(opt.theta, "--theta");
    sweep("--x", "x", opt.x,
          [&](double v) { return rates::brownian_rate_r(opt.t, theta, v); });
  } else if (opt.curve == "dual-u-star") {
    double theta = scalar_or_throw(opt.theta, "--theta");
    sweep("--xi", "xi", opt.xi,
          [&](double v) { return rates::dual_u_star(opt.s, theta, v); });
  } else if (opt.curve == "dual-r-star") {
    double theta = scalar_or_throw(opt.theta, "--theta");
    sweep("--xi", "xi", opt.xi,
          [&](double v) { return rates::dual_r_star(opt.t, theta, v); });
  } else if (opt.curve == "jgue") {
    sweep("--x", "r", opt.x, [&](double v) { return rates::j_gue(v); });
  } else {
    throw ConfigError("--curve: unknown curve '" + opt.curve +
                      "' (free-energy, lyapunov, lyapunov-dual, rate, "
                      "stationary-u, brownian-r, dual-u-star, dual-r-star, jgue)");
  }
  emit(table, opt);
  return 0;
}

// ---------------------------------------------------------------------------
// simulate

int cmd_simulate(const Options& opt) {
  if (opt.estimator.empty())
    throw ConfigError("--estimator is required for simulate");
  if (opt.replicates < 100)
    throw ConfigError("--replicates: " + std::to_string(opt.replicates) +
                      " is below the minimum of 100");
  std::vector<int> ns = parse_int_list(opt.lines, "--lines");
  Table table;
  table.provenance = opt.provenance();
  bool heavy_tail = false;

  if (opt.estimator == "first-moment") {
    table.columns = {"n", "estimate", "se", "ci_low", "ci_high", "analytic"};
    for (int n : ns) {
      auto sum = mc::log_first_moment(n, opt.horizon, opt.step, opt.replicates,
                                      opt.seed, opt.threads);
      double analytic = (n - 1) * std::log(opt.horizon) -
                        oyldp::specfun::log_gamma(n) + opt.horizon / 2.0;
      table.rows.push_back({double(n), sum.mean, sum.std_error, sum.ci_low,
                            sum.ci_high, analytic});
    }
  } else if (opt.estimator == "lyapunov") {
    double xi = scalar_or_throw(opt.xi, "--xi");
    table.columns = {"n", "estimate", "se", "analytic_finite_n", "heavy_tail"};
    auto cells = mc::lyapunov_cells({opt.s, opt.t}, xi, ns, opt.replicates,
                                    opt.step, opt.seed, opt.threads);
    for (const auto& c : cells) {
      table.rows.push_back({double(c.n), c.estimate, c.std_error,
                            c.analytic_finite_n,
                            c.heavy_tail_warning ? 1.0 : 0.0});
      if (c.heavy_tail_warning) {
        heavy_tail = true;
        std::cerr << "warning: one replicate carries most of the mass at n="
                  << c.n << "; the moment estimate is unstable\n";
      }
    }
  } else if (opt.estimator == "tail") {
    double x = scalar_or_throw(opt.x, "--x");
    table.columns = {"n",       "hits",   "censored",       "rate", "se",
                     "ci_low",  "ci_high", "analytic_bound", "bound_applicable"};
    auto cells = mc::tail_cells({opt.s, opt.t}, x, ns, opt.replicates, opt.step,
                                opt.seed, opt.threads);
    for (const auto& c : cells) {
      table.rows.push_back({double(c.n), double(c.hits), c.censored ? 1.0 : 0.0,
                            c.rate.mean, c.rate.std_error, c.rate.ci_low,
                            c.rate.ci_high, c.analytic_bound,
                            c.bound_applicable ? 1.0 : 0.0});
    }
  } else {
    throw ConfigError("--estimator: unknown estimator '" + opt.estimator +
                      "' (first-moment, lyapunov, tail)");
  }
  emit(table, opt);
  if (heavy_tail && opt.strict) {
    std::cerr << "strict mode: heavy-tail warning escalated\n";
    return 4;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// verify

void absorb(VerificationReport& into, const VerificationReport& from,
            const std::string& prefix) {
  for (const auto& c : from.checks)
    into.add(prefix + "." + c.name, c.value, c.tolerance, c.pass, c.note);
  if (!from.provenance.empty()) into.provenance[prefix] = from.provenance;
}

void suite_analytic(const Options& opt, VerificationReport& report) {
  rates::Shape sh{opt.s, opt.t};
  double theta = scalar_or_throw(opt.theta, "--theta");
  double rho = rates::free_energy(sh);

  double exact = opt.t / 2.0 + opt.s + opt.s * std::log(opt.t / opt.s);
  report.add("analytic.moment_point", std::abs(rates::lyapunov(sh, 1.0) - exact),
             1e-9, std::abs(rates::lyapunov(sh, 1.0) - exact) <= 1e-9,
             "closed form of the first moment exponent");

  double dual_gap = 0.0;
  for (int i = 0; i < 30; ++i) {
    double xi = 0.1 + i * 0.1;
    dual_gap = std::max(dual_gap, std::abs(rates::lyapunov(sh, xi) -
                                           rates::lyapunov_dual_form(sh, xi)));
  }
  report.add("analytic.dual_route_gap", dual_gap, 1e-10, dual_gap <= 1e-10,
             "primal vs dual minimization, xi in [0.1, 3]");

  double h = 1e-4;
  double slope =
      (rates::lyapunov(sh, h) - rates::lyapunov(sh, -h)) / (2.0 * h);
  report.add("analytic.slope_at_zero", std::abs(slope - rho), 1e-3,
             std::abs(slope - rho) <= 1e-3,
             "central difference of the exponent at 0 vs the free energy");

  double hom = std::abs(rates::lyapunov({2 * opt.s, 2 * opt.t}, 1.3) -
                        2.0 * rates::lyapunov(sh, 1.3));
  report.add("analytic.homogeneity", hom, 1e-9, hom <= 1e-9,
             "degree-1 scaling of the exponent in (s, t)");

  double at_rho = rates::rate_function(sh, rho);
  report.add("analytic.rate_at_free_energy", at_rho, 1e-8, at_rho <= 1e-8, "");
  bool below_inf = std::isinf(rates::rate_function(sh, rho - 0.1));
  report.add("analytic.rate_below_free_energy", below_inf ? 0.0 : 1.0, 0.0,
             below_inf, "left of the free energy the rate is +inf");

  // Numeric conjugate on a fixed dual window as an independent route.
  double conj_gap = 0.0;
  for (int i = 0; i <= 4; ++i) {
    double x = rho + 0.5 + i;
    double best = -kInf;
    for (int k = 0; k <= 2000; ++k) {
      double xi = k * (20.0 / 2000);
      best = std::max(best, xi * x - rates::lyapunov(sh, xi));
    }
    conj_gap = std::max(conj_gap, std::abs(best - rates::rate_function(sh, x)));
  }
  report.add("analytic.conjugate_route_gap", conj_gap, 1e-4, conj_gap <= 1e-4,
             "rate function vs dense numeric conjugate");

  double x0 = -opt.s * oyldp::specfun::digamma(theta);
  auto vr = rates::verify_variational_identity(
      sh, theta, {x0 - 0.5, x0 + 1.5, 7}, 60);
  absorb(report, vr, "analytic.variational");
}

void suite_variational(VerificationReport& report) {
  struct Probe {
    double s, t, theta;
  };
  const Probe probes[] = {{1, 1, 1}, {2, 1, 1.5}, {1, 2, 0.8}};
  for (const auto& p : probes) {
    double x0 = -p.s * oyldp::specfun::digamma(p.theta);
    auto vr = rates::verify_variational_identity(
        {p.s, p.t}, p.theta, {x0 - 1.0, x0 + 3.0, 21}, 200);
    std::ostringstream tag;
    tag << "variational[s=" << p.s << ",t=" << p.t << ",theta=" << p.theta
        << "]";
    absorb(report, vr, tag.str());
  }
}

void suite_burke(const Options& opt, VerificationReport& report, bool& warned) {
  Range thetas = parse_range(opt.theta, "--theta");
  int n_seeds = static_cast<int>(std::min<long>(opt.replicates, 200000));
  for (int i = 0; i < thetas.count; ++i) {
    double theta = thetas.point(i);
    auto br = mc::verify_burke(theta, n_seeds, opt.step, opt.seed, opt.threads);
    std::ostringstream tag;
    tag << "burke[theta=" << theta << "]";
    absorb(report, br, tag.str());
    double rem = br.provenance.value("max_remainder", 0.0);
    if (rem > 1e-8) {
      warned = true;
      std::cerr << "warning: boundary truncation remainder " << rem
                << " above 1e-8 at theta=" << theta << "\n";
    }
  }
}

void suite_stationary(const Options& opt, VerificationReport& report,
                      bool& warned) {
  double theta = scalar_or_throw(opt.theta, "--theta");
  std::vector<int> ns = parse_int_list(opt.lines, "--lines");
  int n = ns.front();
  double trunc = auto_trunc(opt, theta);
  int n_seeds = opt.replicates == 1000 ? 20 : static_cast<int>(opt.replicates);

  double max_resid = 0.0;
  double max_rem = 0.0;
  for (int i = 0; i < n_seeds; ++i) {
    auto g = env::sample_environment(n, opt.horizon, opt.step, trunc,
                                     oyldp::rng::derive_seed(opt.seed, i));
    auto rep = polymer::verify_stationary_decomposition(g, theta, n, opt.horizon);
    for (const auto& c : rep.checks)
      if (c.name == "queueing_decomposition_residual")
        max_resid = std::max(max_resid, c.value);
    max_rem = std::max(max_rem, rep.provenance.value("remainder_estimate", 0.0));
  }
  report.add("stationary.max_decomposition_residual", max_resid, 1e-6,
             max_resid <= 1e-6,
             std::to_string(n_seeds) + " seeds, shared-grid identity");
  report.provenance["stationary"] = {{"seeds", n_seeds},
                                     {"max_remainder", max_rem},
                                     {"trunc_T", trunc}};
  if (max_rem > 1e-8) {
    warned = true;
    std::cerr << "warning: boundary truncation remainder " << max_rem
              << " above 1e-8\n";
  }

  // Coupling identity carries a quadrature residual; gate its step decay.
  auto fine = env::sample_environment(n, opt.horizon, opt.step, trunc,
                                      oyldp::rng::derive_seed(opt.seed, 0));
  auto coarse = fine.coarsen();
  auto get_coupling = [&](const env::EnvGrid& g) {
    auto rep = polymer::verify_stationary_decomposition(g, theta, n, opt.horizon);
    for (const auto& c : rep.checks)
      if (c.name == "coupling_residual") return c.value;
    return 0.0;
  };
  double res_fine = get_coupling(fine);
  double res_coarse = get_coupling(coarse);
  double ratio = res_fine > 0 ? res_coarse / res_fine : kInf;
  report.add("stationary.coupling_residual_decay", ratio, 1.5, ratio > 1.5,
             "halving the step must at least halve the residual");
  report.provenance["stationary"]["coupling_fine"] = res_fine;
  report.provenance["stationary"]["coupling_coarse"] = res_coarse;
}

void suite_gue(const Options& opt, VerificationReport& report) {
  std::vector<int> ns = parse_int_list(opt.lines, "--lines");
  double step = opt.step_given ? opt.step : 1e-4;
  long reps = opt.replicates;
  for (int n : ns) {
    auto ks = mc::gue_identity_ks(n, reps, step, opt.seed, true, opt.threads);
    std::ostringstream tag;
    tag << "gue[n=" << n << "]";
    report.add(tag.str() + ".identity_ks", ks.statistic, ks.critical_05,
               ks.statistic < ks.critical_05,
               "top eigenvalue vs scaled last-passage maximum");
    auto neg = mc::gue_identity_ks(n, reps, step, opt.seed + 1, false,
                                   opt.threads);
    report.add(tag.str() + ".negative_control", neg.statistic, neg.critical_05,
               neg.statistic >= neg.critical_05,
               "unscaled comparison must exceed the critical value");
  }
}

int cmd_verify(Options opt) {
  if (opt.suite.empty()) throw ConfigError("--suite is required for verify");
  const std::vector<std::string> known = {"analytic", "variational", "burke",
                                          "stationary", "gue"};
  std::vector<std::string> run;
  if (opt.suite == "all") {
    run = known;
  } else {
    bool ok = false;
    for (const auto& k : known) ok = ok || k == opt.suite;
    if (!ok)
      throw ConfigError("--suite: unknown suite '" + opt.suite +
                        "' (analytic, variational, burke, stationary, gue, all)");
    run = {opt.suite};
  }

  VerificationReport report;
  report.title = "verify:" + opt.suite;
  report.provenance["config"] = opt.provenance();
  bool warned = false;
  for (const auto& name : run) {
    if (name == "analytic") suite_analytic(opt, report);
    if (name == "variational") suite_variational(report);
    if (name == "burke") suite_burke(opt, report, warned);
    if (name == "stationary") suite_stationary(opt, report, warned);
    if (name == "gue") suite_gue(opt, report);
  }

  report.write_text(std::cout);
  std::string path = opt.out.empty() ? "verify_report.json" : opt.out;
  std::ofstream file(path);
  if (!file) throw ConfigError("--out: cannot open '" + path + "'");
  file << report.to_json().dump(2) << "\n";

  if (!report.all_pass()) return 1;
  if (warned && opt.strict) {
    std::cerr << "strict mode: truncation warning escalated\n";
    return 4;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// configuration plumbing

json load_config(int argc, char** argv) {
  std::string path;
  for (int i = 1; i < argc; ++i) {
    std::string a = argv[i];
    if (a == "--config" && i + 1 < argc) path = argv[i + 1];
    if (a.rfind("--config=", 0) == 0) path = a.substr(9);
  }
  if (path.empty()) return json::object();
  std::ifstream f(path);
  if (!f) throw ConfigError("--config: cannot open '" + path + "'");
  json cfg;
  try {
    f >> cfg;
  } catch (const json::exception& e) {
    throw ConfigError("--config: " + path + " is not valid JSON (" + e.what() +
                      ")");
  }
  if (!cfg.is_object()) throw ConfigError("--config: top level must be an object");
  const std::vector<std::string> allowed = {
      "curve",   "estimator",  "suite", "s",     "t",       "theta",
      "xi",      "x",          "lines", "n",     "horizon", "step",
      "trunc_T", "replicates", "seed",  "threads", "out",   "format",
      "strict"};
  for (const auto& [key, _] : cfg.items()) {
    bool ok = false;
    for (const auto& a : allowed) ok = ok || a == key;
    if (!ok) throw ConfigError("config: unknown key '" + key + "'");
  }
  return cfg;
}

std::string cfg_str(const json& v, const std::string& key) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) return fmt17(v.get<double>());
  throw ConfigError("config: key '" + key + "' must be a string or number");
}

}  // namespace

int main(int argc, char** argv) {
  Options opt;
  if (const char* env_seed = std::getenv("OYLDP_SEED")) {
    try {
      opt.seed = parse_long(env_seed, "OYLDP_SEED");
    } catch (const ConfigError& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 2;
    }
  }

  CLI::App app{"Large-deviation curves and Monte Carlo checks for the "
               "semi-discrete Brownian polymer"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON configuration file");
  auto* o_curve = app.add_option("--curve", opt.curve, "compute: curve name");
  auto* o_estimator =
      app.add_option("--estimator", opt.estimator, "simulate: estimator name");
  auto* o_suite = app.add_option("--suite", opt.suite, "verify: check suite");
  auto* o_s = app.add_option("--s", opt.s, "shape: units of lines");
  auto* o_t = app.add_option("--t", opt.t, "shape: time horizon per unit");
  auto* o_theta =
      app.add_option("--theta", opt.theta, "boundary tilt (value or range)");
  auto* o_xi = app.add_option("--xi", opt.xi, "moment order (value or min:max:count)");
  auto* o_x = app.add_option("--x", opt.x, "abscissa (value or min:max:count)");
  auto* o_lines =
      app.add_option("--lines,--n", opt.lines, "line counts, comma separated");
  auto* o_horizon = app.add_option("--horizon", opt.horizon, "time horizon");
  auto* o_step = app.add_option("--step", opt.step, "grid step");
  auto* o_trunc =
      app.add_option("--trunc-T", opt.trunc_T, "boundary truncation depth");
  auto* o_reps =
      app.add_option("--replicates", opt.replicates, "replicate count (>= 100)");
  auto* o_seed = app.add_option("--seed", opt.seed, "base RNG seed");
  auto* o_threads = app.add_option("--threads", opt.threads,
                                   "worker threads (never affects results)");
  auto* o_out = app.add_option("--out", opt.out, "output path (default stdout)");
  auto* o_format = app.add_option("--format", opt.format, "csv or json")
                       ->check(CLI::IsMember({"csv", "json"}));
  app.add_flag("--strict", opt.strict, "escalate warnings to exit code 4");

  auto* c_compute = app.add_subcommand("compute", "evaluate analytic curves");
  auto* c_simulate = app.add_subcommand("simulate", "run Monte Carlo estimators");
  auto* c_verify = app.add_subcommand("verify", "run consistency check suites");
  for (auto* sub : {c_compute, c_simulate, c_verify}) sub->fallthrough();

  try {
    try {
      app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
      int rc = app.exit(e);
      return rc == 0 ? 0 : 2;
    }

    json cfg = load_config(argc, argv);
    auto merge_str = [&](CLI::Option* o, std::string& target,
                         const char* key) {
      if (o->count() == 0 && cfg.contains(key))
        target = cfg_str(cfg.at(key), key);
    };
    auto merge_num = [&](CLI::Option* o, auto& target, const char* key) {
      if (o->count() == 0 && cfg.contains(key)) {
        const json& v = cfg.at(key);
        if (v.is_string()) {
          target = static_cast<std::decay_t<decltype(target)>>(
              parse_double(v.get<std::string>(), key));
        } else if (v.is_number()) {
          target = v.get<std::decay_t<decltype(target)>>();
        } else {
          throw ConfigError("config: key '" + std::string(key) +
                            "' must be a number");
        }
      }
    };
    merge_str(o_curve, opt.curve, "curve");
    merge_str(o_estimator, opt.estimator, "estimator");
    merge_str(o_suite, opt.suite, "suite");
    merge_num(o_s, opt.s, "s");
    merge_num(o_t, opt.t, "t");
    merge_str(o_theta, opt.theta, "theta");
    merge_str(o_xi, opt.xi, "xi");
    merge_str(o_x, opt.x, "x");
    if (o_lines->count() == 0) {
      if (cfg.contains("lines")) opt.lines = cfg_str(cfg.at("lines"), "lines");
      if (cfg.contains("n")) opt.lines = cfg_str(cfg.at("n"), "n");
    }
    merge_num(o_horizon, opt.horizon, "horizon");
    merge_num(o_step, opt.step, "step");
    merge_num(o_trunc, opt.trunc_T, "trunc_T");
    merge_num(o_reps, opt.replicates, "replicates");
    merge_num(o_seed, opt.seed, "seed");
    merge_num(o_threads, opt.threads, "threads");
    merge_str(o_out, opt.out, "out");
    merge_str(o_format, opt.format, "format");
    if (!app.count("--strict") && cfg.contains("strict")) {
      if (!cfg.at("strict").is_boolean())
        throw ConfigError("config: key 'strict' must be a boolean");
      opt.strict = cfg.at("strict").get<bool>();
    }
    opt.step_given = o_step->count() > 0 || cfg.contains("step");

    if (opt.format != "csv" && opt.format != "json")
      throw ConfigError("--format: must be 'csv' or 'json'");
    if (!(opt.step > 0))
      throw ConfigError("--step: must be positive");
    if (opt.threads < 1 || opt.threads > 256)
      throw ConfigError("--threads: must be in [1, 256]");

    if (c_compute->parsed()) {
      opt.command = "compute";
      return cmd_compute(opt);
    }
    if (c_simulate->parsed()) {
      opt.command = "simulate";
      return cmd_simulate(opt);
    }
    opt.command = "verify";
    return cmd_verify(opt);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
