#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "oyldp/rates.hpp"
#include "oyldp/report.hpp"

// Monte Carlo estimators over replicated environments. Replicate i always
// draws its environment from derive_seed(seed, i), and reductions run in a
// fixed order after all replicates finish, so results do not depend on the
// thread count.

namespace oyldp::mc {

struct McSummary {
  long n_replicates = 0;
  double mean = 0.0;
  double std_error = 0.0;
  double ci_low = 0.0;   // 95% normal interval
  double ci_high = 0.0;
  std::uint64_t seed = 0;
  std::string config_digest;  // FNV-1a of the canonical parameter string
};

// Runs fn(0), ..., fn(count - 1), partitioned over the given thread count.
void parallel_map(long count, int threads, const std::function<void(long)>& fn);

// log E[Z_{1,n_lines}(0, horizon)] by averaging replicate partition functions
// in log space. The standard error is for the log of the mean, by the delta
// method, so it degrades gracefully when a few replicates dominate.
McSummary log_first_moment(int n_lines, double horizon, double step,
                           long replicates, std::uint64_t seed, int threads = 1);

// One scale point of the moment-Lyapunov estimate (1/n) log E[Z^xi] at shape
// (n s, n t), using floor(n s) lines over horizon n t.
struct LyapunovCell {
  int n = 0;
  double estimate = 0.0;
  double std_error = 0.0;
  // Exact finite-size value, available at xi = 1 only; NaN otherwise.
  double analytic_finite_n = std::numeric_limits<double>::quiet_NaN();
  // Set when one replicate carries more than half the exponential mass.
  bool heavy_tail_warning = false;
};

std::vector<LyapunovCell> lyapunov_cells(rates::Shape sh, double xi,
                                         const std::vector<int>& ns,
                                         long replicates, double step,
                                         std::uint64_t seed, int threads = 1);

// E[Z^xi] <= (T^{N-1} / (N-1)!)^xi exp(xi^2 T / 2), valid for |xi| > 1.
VerificationReport check_moment_bound(int n_lines, double horizon, double xi,
                                      long replicates, double step,
                                      std::uint64_t seed, int threads = 1);

// Upper-tail hit counting: rate = -(1/n) log P(log Z >= n x), with a Wilson
// interval mapped through the same transform. censored marks zero hits; the
// analytic comparison point is the scaled GUE tail bound where its
// hypothesis applies.
struct TailCell {
  int n = 0;
  long hits = 0;
  bool censored = false;
  McSummary rate;
  double analytic_bound = 0.0;
  bool bound_applicable = false;
};

std::vector<TailCell> tail_cells(rates::Shape sh, double x,
                                 const std::vector<int>& ns, long replicates,
                                 double step, std::uint64_t seed,
                                 int threads = 1);

// Kolmogorov-Smirnov distance with the usual asymptotic two-sided critical
// values at 10% / 5% / 1%.
struct KsResult {
  double statistic = 0.0;
  long n1 = 0;
  long n2 = 0;  // zero for the one-sample form
  double critical_10 = 0.0;
  double critical_05 = 0.0;
  double critical_01 = 0.0;
  bool pass_at(double alpha) const;  // alpha in {0.10, 0.05, 0.01}
};

KsResult ks_test(std::vector<double> samples,
                 const std::function<double(double)>& cdf);
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

// Distributional checks on the queueing departures: exp(-r_1(0)) against the
// Gamma(theta, 1) law, plus decorrelation of r_1(0) and r_2(0).
VerificationReport verify_burke(double theta, int n_seeds, double step,
                                std::uint64_t seed, int threads = 1);

// Two-sample comparison between the top GUE eigenvalue at size n and the
// Brownian last-passage value over n lines on [0, 1], scaled by 1/(2 sqrt n).
// scaled = false skips the scaling and serves as the negative control.
KsResult gue_identity_ks(int n, long replicates, double step,
                         std::uint64_t seed, bool scaled, int threads = 1);

}  // namespace oyldp::mc
