#include "oyldp/mc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <thread>

#include "oyldp/env_grid.hpp"
#include "oyldp/gue.hpp"
#include "oyldp/polymer.hpp"
#include "oyldp/rng.hpp"
#include "oyldp/specfun.hpp"

namespace oyldp::mc {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kZ95 = 1.959963984540054;

// Smirnov coefficients sqrt(-log(alpha / 2) / 2).
constexpr double kKs10 = 1.2238478702170824;
constexpr double kKs05 = 1.3580986393225504;
constexpr double kKs01 = 1.6276236115189502;

std::string fnv_digest(const std::string& canonical) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : canonical) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

double log_sum_exp(const std::vector<double>& v) {
  double c = -kInf;
  for (double x : v) c = std::max(c, x);
  if (!std::isfinite(c)) return -kInf;
  double acc = 0.0;
  for (double x : v) acc += std::exp(x - c);
  return c + std::log(acc);
}

// log of the chamber volume T^{N-1} / (N-1)!.
double log_chamber_volume(int n_lines, double horizon) {
  return (n_lines - 1) * std::log(horizon) -
         std::lgamma(static_cast<double>(n_lines));
}

// Summary of log((1/R) sum exp(v_i)) with a delta-method standard error.
McSummary summarize_log_mean(const std::vector<double>& v, std::uint64_t seed,
                             const std::string& canonical) {
  const long r = static_cast<long>(v.size());
  std::vector<double> twice(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) twice[i] = 2.0 * v[i];
  McSummary s;
  s.n_replicates = r;
  s.seed = seed;
  s.config_digest = fnv_digest(canonical);
  const double l1 = log_sum_exp(v) - std::log(static_cast<double>(r));
  const double l2 = log_sum_exp(twice) - std::log(static_cast<double>(r));
  s.mean = l1;
  s.std_error = std::sqrt(std::max(0.0, std::expm1(l2 - 2.0 * l1)) / r);
  s.ci_low = s.mean - kZ95 * s.std_error;
  s.ci_high = s.mean + kZ95 * s.std_error;
  return s;
}

std::vector<double> replicate_log_partitions(int n_lines, double horizon,
                                             double step, long replicates,
                                             std::uint64_t seed, int threads) {
  if (n_lines < 1 || !(horizon > 0.0) || !(step > 0.0) || replicates < 2) {
    throw std::invalid_argument("mc: bad replication parameters");
  }
  std::vector<double> out(replicates);
  parallel_map(replicates, threads, [&](long i) {
    const auto g = env::sample_environment(
        n_lines, horizon, step, 0.0,
        rng::derive_seed(seed, static_cast<std::uint64_t>(i)));
    out[i] = polymer::log_partition(g, 1, n_lines, 0.0, horizon);
  });
  return out;
}

struct WilsonInterval {
  double lo = 0.0;
  double hi = 0.0;
};

WilsonInterval wilson(long hits, long total) {
  const double z = kZ95;
  const double n = static_cast<double>(total);
  const double p = static_cast<double>(hits) / n;
  const double denom = 1.0 + z * z / n;
  const double center = (p + z * z / (2.0 * n)) / denom;
  const double half =
      z * std::sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

int lines_for(rates::Shape sh, int n) {
  const int lines = static_cast<int>(std::floor(n * sh.s + 1e-9));
  if (lines < 1) {
    throw std::invalid_argument("mc: scale too small, no full line fits");
  }
  return lines;
}

}  // namespace

void parallel_map(long count, int threads, const std::function<void(long)>& fn) {
  if (threads <= 1 || count < 2) {
    for (long i = 0; i < count; ++i) fn(i);
    return;
  }
  const int workers = static_cast<int>(std::min<long>(threads, count));
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (long i = w; i < count; i += workers) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

McSummary log_first_moment(int n_lines, double horizon, double step,
                           long replicates, std::uint64_t seed, int threads) {
  const auto v =
      replicate_log_partitions(n_lines, horizon, step, replicates, seed, threads);
  char canonical[160];
  std::snprintf(canonical, sizeof(canonical),
                "first_moment|N=%d|T=%.17g|step=%.17g|R=%ld|seed=%llu", n_lines,
                horizon, step, replicates,
                static_cast<unsigned long long>(seed));
  return summarize_log_mean(v, seed, canonical);
}

std::vector<LyapunovCell> lyapunov_cells(rates::Shape sh, double xi,
                                         const std::vector<int>& ns,
                                         long replicates, double step,
                                         std::uint64_t seed, int threads) {
  rates::validate(sh);
  std::vector<LyapunovCell> cells;
  cells.reserve(ns.size());
  for (int n : ns) {
    const int lines = lines_for(sh, n);
    const double horizon = n * sh.t;
    auto v = replicate_log_partitions(lines, horizon, step, replicates,
                                      rng::derive_seed(seed, n), threads);
    for (double& x : v) x *= xi;
    const double total = log_sum_exp(v);
    LyapunovCell c;
    c.n = n;
    c.estimate = (total - std::log(static_cast<double>(replicates))) / n;
    char canonical[200];
    std::snprintf(canonical, sizeof(canonical),
                  "lyapunov|s=%.17g|t=%.17g|xi=%.17g|n=%d|step=%.17g|R=%ld|seed=%llu",
                  sh.s, sh.t, xi, n, step, replicates,
                  static_cast<unsigned long long>(seed));
    const auto summary = summarize_log_mean(v, seed, canonical);
    c.std_error = summary.std_error / n;
    if (xi == 1.0) {
      c.analytic_finite_n =
          (log_chamber_volume(lines, horizon) + 0.5 * horizon) / n;
    }
    c.heavy_tail_warning =
        std::exp(*std::max_element(v.begin(), v.end()) - total) > 0.5;
    cells.push_back(c);
  }
  return cells;
}

VerificationReport check_moment_bound(int n_lines, double horizon, double xi,
                                      long replicates, double step,
                                      std::uint64_t seed, int threads) {
  if (!(std::abs(xi) > 1.0)) {
    throw std::invalid_argument("check_moment_bound: only proved for |xi| > 1");
  }
  auto v =
      replicate_log_partitions(n_lines, horizon, step, replicates, seed, threads);
  for (double& x : v) x *= xi;
  char canonical[200];
  std::snprintf(canonical, sizeof(canonical),
                "moment_bound|N=%d|T=%.17g|xi=%.17g|step=%.17g|R=%ld|seed=%llu",
                n_lines, horizon, xi, step, replicates,
                static_cast<unsigned long long>(seed));
  const auto s = summarize_log_mean(v, seed, canonical);
  const double bound =
      xi * log_chamber_volume(n_lines, horizon) + 0.5 * xi * xi * horizon;

  VerificationReport rep;
  rep.title = "moment bound";
  rep.provenance = {{"n_lines", n_lines}, {"horizon", horizon},
                    {"xi", xi},           {"replicates", replicates},
                    {"step", step},       {"seed", seed},
                    {"estimate", s.mean}, {"std_error", s.std_error},
                    {"bound", bound},     {"config_digest", s.config_digest}};
  const double excess = s.mean - bound;
  rep.add("log_moment_minus_bound", excess, 3.0 * s.std_error,
          excess <= 3.0 * s.std_error,
          "estimate may not exceed the bound by more than 3 SE");
  return rep;
}

std::vector<TailCell> tail_cells(rates::Shape sh, double x,
                                 const std::vector<int>& ns, long replicates,
                                 double step, std::uint64_t seed, int threads) {
  rates::validate(sh);
  // Hypothesis and value of the scaled GUE tail bound at this x.
  const double centered =
      x - sh.s * std::log(sh.t) - sh.s + sh.s * std::log(sh.s);
  const double width = 2.0 * std::sqrt(sh.t * sh.s);
  const bool applicable = centered > width;
  const double bound =
      applicable ? sh.s * rates::j_gue(centered / width - 1.0) : 0.0;

  std::vector<TailCell> cells;
  cells.reserve(ns.size());
  for (int n : ns) {
    const int lines = lines_for(sh, n);
    const double horizon = n * sh.t;
    const auto v = replicate_log_partitions(lines, horizon, step, replicates,
                                            rng::derive_seed(seed, n), threads);
    TailCell c;
    c.n = n;
    for (double z : v) {
      if (z >= n * x) ++c.hits;
    }
    c.censored = (c.hits == 0);
    c.bound_applicable = applicable;
    c.analytic_bound = bound;
    const auto w = wilson(c.hits, replicates);
    char canonical[200];
    std::snprintf(canonical, sizeof(canonical),
                  "tail|s=%.17g|t=%.17g|x=%.17g|n=%d|step=%.17g|R=%ld|seed=%llu",
                  sh.s, sh.t, x, n, step, replicates,
                  static_cast<unsigned long long>(seed));
    c.rate.n_replicates = replicates;
    c.rate.seed = seed;
    c.rate.config_digest = fnv_digest(canonical);
    // Larger probabilities mean smaller rates, so the interval flips.
    c.rate.ci_low = -std::log(w.hi) / n;
    if (c.censored) {
      c.rate.mean = kInf;
      c.rate.ci_high = kInf;
      c.rate.std_error = kInf;
    } else {
      const double p = static_cast<double>(c.hits) / replicates;
      c.rate.mean = -std::log(p) / n;
      c.rate.ci_high = w.lo > 0.0 ? -std::log(w.lo) / n : kInf;
      c.rate.std_error = (c.rate.ci_high - c.rate.ci_low) / (2.0 * kZ95);
    }
    cells.push_back(c);
  }
  return cells;
}

bool KsResult::pass_at(double alpha) const {
  if (alpha == 0.10) return statistic < critical_10;
  if (alpha == 0.05) return statistic < critical_05;
  if (alpha == 0.01) return statistic < critical_01;
  throw std::invalid_argument("KsResult: tabulated levels are 0.10, 0.05, 0.01");
}

KsResult ks_test(std::vector<double> samples,
                 const std::function<double(double)>& cdf) {
  if (samples.size() < 8) throw std::invalid_argument("ks_test: too few samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max(d, std::max((i + 1) / n - f, f - i / n));
  }
  KsResult r;
  r.statistic = d;
  r.n1 = static_cast<long>(samples.size());
  const double scale = 1.0 / std::sqrt(n);
  r.critical_10 = kKs10 * scale;
  r.critical_05 = kKs05 * scale;
  r.critical_01 = kKs01 * scale;
  return r;
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.size() < 8 || b.size() < 8) {
    throw std::invalid_argument("ks_two_sample: too few samples");
  }
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j]) {
      ++i;
    } else {
      ++j;
    }
    d = std::max(d, std::abs(static_cast<double>(i) / a.size() -
                             static_cast<double>(j) / b.size()));
  }
  KsResult r;
  r.statistic = d;
  r.n1 = static_cast<long>(a.size());
  r.n2 = static_cast<long>(b.size());
  const double scale =
      std::sqrt(static_cast<double>(a.size() + b.size()) /
                (static_cast<double>(a.size()) * static_cast<double>(b.size())));
  r.critical_10 = kKs10 * scale;
  r.critical_05 = kKs05 * scale;
  r.critical_01 = kKs01 * scale;
  return r;
}

VerificationReport verify_burke(double theta, int n_seeds, double step,
                                std::uint64_t seed, int threads) {
  if (!(theta > 0.0)) throw std::invalid_argument("verify_burke: theta");
  if (n_seeds < 16) throw std::invalid_argument("verify_burke: too few seeds");
  const double trunc_raw = std::max(30.0 / theta, 10.0);
  const double trunc = std::ceil(trunc_raw / step) * step;

  std::vector<double> r1(n_seeds), r2(n_seeds), remainder(n_seeds);
  parallel_map(n_seeds, threads, [&](long i) {
    const auto g = env::sample_environment(
        2, 0.0, step, trunc, rng::derive_seed(seed, static_cast<std::uint64_t>(i)));
    const auto q = polymer::stationary_r_sequence(g, theta, 2);
    const int k0 = g.node_of(0.0);
    r1[i] = q.r(0, k0);
    r2[i] = q.r(1, k0);
    remainder[i] = q.remainder_estimate;
  });

  std::vector<double> w(n_seeds);
  for (int i = 0; i < n_seeds; ++i) w[i] = std::exp(-r1[i]);
  const auto ks = ks_test(
      w, [theta](double x) { return x <= 0.0 ? 0.0 : specfun::gamma_p(theta, x); });

  double m1 = 0.0, m2 = 0.0;
  for (int i = 0; i < n_seeds; ++i) {
    m1 += r1[i];
    m2 += r2[i];
  }
  m1 /= n_seeds;
  m2 /= n_seeds;
  double c11 = 0.0, c22 = 0.0, c12 = 0.0;
  for (int i = 0; i < n_seeds; ++i) {
    c11 += (r1[i] - m1) * (r1[i] - m1);
    c22 += (r2[i] - m2) * (r2[i] - m2);
    c12 += (r1[i] - m1) * (r2[i] - m2);
  }
  const double corr = c12 / std::sqrt(c11 * c22);
  const double corr_tol = 3.0 / std::sqrt(static_cast<double>(n_seeds));

  VerificationReport rep;
  rep.title = "departure process distribution";
  rep.provenance = {{"theta", theta},
                    {"n_seeds", n_seeds},
                    {"step", step},
                    {"trunc_T", trunc},
                    {"seed", seed},
                    {"ks_statistic", ks.statistic},
                    {"ks_critical_01", ks.critical_01},
                    {"max_remainder", *std::max_element(remainder.begin(),
                                                        remainder.end())}};
  rep.add("gamma_ks_distance", ks.statistic, ks.critical_01,
          ks.pass_at(0.01), "exp(-r_1(0)) against Gamma(theta, 1)");
  rep.add("adjacent_departure_correlation", corr, corr_tol,
          std::abs(corr) <= corr_tol);
  return rep;
}

KsResult gue_identity_ks(int n, long replicates, double step,
                         std::uint64_t seed, bool scaled, int threads) {
  std::vector<double> eig(replicates), lpp(replicates);
  parallel_map(replicates, threads, [&](long i) {
    const auto idx = static_cast<std::uint64_t>(i);
    eig[i] = gue::top_eigenvalue(
        gue::sample_matrix(n, rng::derive_seed(seed, 2 * idx)));
    const auto g = env::sample_environment(n, 1.0, step, 0.0,
                                           rng::derive_seed(seed, 2 * idx + 1));
    const double m = polymer::brownian_lpp_max(g, n, 1.0);
    lpp[i] = scaled ? m / (2.0 * std::sqrt(static_cast<double>(n))) : m;
  });
  return ks_two_sample(std::move(eig), std::move(lpp));
}

}  // namespace oyldp::mc
