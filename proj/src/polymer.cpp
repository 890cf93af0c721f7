#include "oyldp/polymer.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace oyldp::polymer {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// logs -> log of the trapezoid integral of exp(logs) with spacing h.
// Streams a prefix sum after subtracting the window maximum, so the result
// vector out[i] = log int over the first i cells. out[0] = -inf.
void log_trapezoid_prefix(const Eigen::ArrayXd& logs, double h,
                          Eigen::ArrayXd& out) {
  const auto m = logs.size();
  out.resize(m);
  const double c = logs.maxCoeff();
  if (!std::isfinite(c)) {  // empty window: all mass at -inf
    out.setConstant(-kInf);
    return;
  }
  const Eigen::ArrayXd e = (logs - c).exp();
  double acc = 0.0;
  out[0] = -kInf;
  for (Eigen::Index i = 1; i < m; ++i) {
    acc += 0.5 * h * (e[i - 1] + e[i]);
    out[i] = c + std::log(acc);
  }
}

// Suffix variant: out[i] = log int over cells from i to the end; out[m-1] = -inf.
void log_trapezoid_suffix(const Eigen::ArrayXd& logs, double h,
                          Eigen::ArrayXd& out) {
  const auto m = logs.size();
  out.resize(m);
  const double c = logs.maxCoeff();
  if (!std::isfinite(c)) {
    out.setConstant(-kInf);
    return;
  }
  const Eigen::ArrayXd e = (logs - c).exp();
  double acc = 0.0;
  out[m - 1] = -kInf;
  for (Eigen::Index i = m - 2; i >= 0; --i) {
    acc += 0.5 * h * (e[i] + e[i + 1]);
    out[i] = c + std::log(acc);
  }
}

void check_lines(const env::EnvGrid& g, int j, int n) {
  if (j < 1 || n < j || n > g.n_lines) {
    throw std::invalid_argument("polymer: need 1 <= j <= n <= n_lines");
  }
}

}  // namespace

double log_partition(const env::EnvGrid& g, int j, int n, double u, double t) {
  check_lines(g, j, n);
  if (u > t) throw std::invalid_argument("polymer: need u <= t");
  const int ku = g.node_of(u);
  const int kt = g.node_of(t);
  Eigen::VectorXd p = g.prefix_line(j - 1);
  if (j == n) return p[kt] - p[ku];
  if (ku == kt) return -kInf;

  const int m = kt - ku + 1;
  Eigen::ArrayXd logw = (p.segment(ku, m).array() - p[ku]);
  Eigen::ArrayXd integral;
  for (int line = j + 1; line <= n; ++line) {
    p = g.prefix_line(line - 1);
    const Eigen::ArrayXd pk = p.segment(ku, m).array();
    log_trapezoid_prefix(logw - pk, g.step, integral);
    logw = pk + integral;
  }
  return logw[m - 1];
}

Eigen::MatrixXd backward_log_partition(const env::EnvGrid& g, int n, double t) {
  check_lines(g, 1, n);
  const int kt = g.node_of(t);
  const int m = kt + 1;  // start nodes 0..kt
  Eigen::MatrixXd v(n, g.n_nodes());
  v.setConstant(-kInf);

  Eigen::VectorXd p = g.prefix_line(n - 1);
  v.row(n - 1).head(m) = (p[kt] - p.head(m).array()).transpose();
  Eigen::ArrayXd integral;
  for (int line = n - 1; line >= 1; --line) {
    p = g.prefix_line(line - 1);
    const Eigen::ArrayXd pk = p.head(m).array();
    log_trapezoid_suffix(pk + v.row(line).head(m).transpose().array(), g.step,
                         integral);
    v.row(line - 1).head(m) = (integral - pk).transpose();
  }
  return v;
}

Eigen::MatrixXd stationary_levels(const env::EnvGrid& g, double theta, int n) {
  if (!(theta > 0.0)) throw std::invalid_argument("polymer: need theta > 0");
  if (!g.has_boundary()) {
    throw std::invalid_argument("polymer: stationary model needs a boundary motion");
  }
  check_lines(g, 1, std::max(n, 1));
  const int nn = g.n_nodes();
  Eigen::MatrixXd levels(n + 1, nn);
  const Eigen::VectorXd pb = g.prefix_boundary();
  for (int v = 0; v < nn; ++v) levels(0, v) = theta * g.time_at(v) - pb[v];

  Eigen::ArrayXd integral;
  for (int k = 1; k <= n; ++k) {
    const Eigen::ArrayXd pk = g.prefix_line(k - 1).array();
    log_trapezoid_prefix(levels.row(k - 1).transpose().array() - pk, g.step,
                         integral);
    levels.row(k) = (pk + integral).transpose();
  }
  return levels;
}

double log_partition_stationary(const env::EnvGrid& g, double theta, int n,
                                double t) {
  return stationary_levels(g, theta, n)(n, g.node_of(t));
}

StationaryQueue stationary_r_sequence(const env::EnvGrid& g, double theta,
                                      int k_max) {
  if (!(theta > 0.0)) throw std::invalid_argument("polymer: need theta > 0");
  if (!g.has_boundary()) {
    throw std::invalid_argument("polymer: queueing recursion needs a boundary motion");
  }
  check_lines(g, 1, k_max);
  const int nn = g.n_nodes();
  const int k0 = g.node_of(0.0);

  Eigen::ArrayXd times(nn);
  for (int v = 0; v < nn; ++v) times[v] = g.time_at(v);

  StationaryQueue q;
  q.r.resize(k_max, nn);
  Eigen::ArrayXd y = g.prefix_boundary().array();
  Eigen::ArrayXd integral;
  for (int k = 1; k <= k_max; ++k) {
    const Eigen::ArrayXd pk = g.prefix_line(k - 1).array();
    // At the cut node Y_{k-1} is +inf for k >= 2, which sends logs[0] to -inf
    // without producing NaNs; for k = 1 the first cell carries real mass.
    const Eigen::ArrayXd logs = theta * times - y - pk;
    log_trapezoid_prefix(logs, g.step, integral);
    Eigen::ArrayXd r = y - theta * times + pk + integral;
    // Empty integral at the cut; also sidesteps inf - inf once Y is +inf there.
    r[0] = -kInf;
    if (k == 1) {
      // Mass fraction of the first cell in the r_1 integral at time 0,
      // a stand-in for what truncation at -trunc_T discarded.
      const double total = integral[k0];
      const double c = logs.head(k0 + 1).maxCoeff();
      const double first =
          c + std::log(0.5 * g.step * (std::exp(logs[0] - c) + std::exp(logs[1] - c)));
      q.remainder_estimate = std::exp(first - total);
    }
    q.r.row(k - 1) = r.transpose();
    y = y + r[k0] - r;
    y[0] = kInf;
  }
  return q;
}

VerificationReport verify_stationary_decomposition(const env::EnvGrid& g,
                                                   double theta, int n,
                                                   double t) {
  const int kt = g.node_of(t);
  const int k0 = g.node_of(0.0);
  const auto queue = stationary_r_sequence(g, theta, n);
  const auto levels = stationary_levels(g, theta, n);
  const Eigen::VectorXd pb = g.prefix_boundary();

  // Route 1: the queueing telescoping sum. Route 2: the level recursion.
  const double lhs = queue.r.col(kt).sum();
  const double rhs = pb[kt] - theta * t + levels(n, kt);
  const double decomposition_residual = std::abs(lhs - rhs);

  // Coupling: split the level-n partition at time 0 into the polymer started
  // from each level j at time 0 plus the boundary segment still active on
  // (0, t). Quadrature differs between the two sides, so this residual is
  // O(step) rather than exact.
  const auto back = backward_log_partition(g, n, t);
  std::vector<double> terms;
  if (kt > k0) {
    const int m = kt - k0 + 1;
    Eigen::ArrayXd logs(m);
    for (int i = 0; i < m; ++i) {
      logs[i] = levels(0, k0 + i) + back(0, k0 + i);
    }
    Eigen::ArrayXd integral;
    log_trapezoid_prefix(logs, g.step, integral);
    terms.push_back(integral[m - 1]);
  }
  for (int j = 1; j <= n; ++j) {
    terms.push_back(levels(j, k0) + back(j - 1, k0));
  }
  double c = -kInf;
  for (double v : terms) c = std::max(c, v);
  double acc = 0.0;
  for (double v : terms) acc += std::exp(v - c);
  const double rebuilt = c + std::log(acc);
  const double coupling_residual = std::abs(rebuilt - levels(n, kt));

  VerificationReport rep;
  rep.title = "stationary decomposition";
  rep.provenance = {{"theta", theta},
                    {"n", n},
                    {"t", t},
                    {"step", g.step},
                    {"trunc_T", g.trunc_T},
                    {"seed", g.seed},
                    {"remainder_estimate", queue.remainder_estimate}};
  rep.add("queueing_decomposition_residual", decomposition_residual, 1e-6,
          decomposition_residual <= 1e-6);
  rep.add("coupling_residual", coupling_residual, 0.0, true,
          "O(step) quadrature mismatch; gate by halving the step, not here");
  return rep;
}

double brownian_lpp_max(const env::EnvGrid& g, int n, double t) {
  check_lines(g, 1, n);
  const int k0 = g.node_of(0.0);
  const int kt = g.node_of(t);
  const int m = kt - k0 + 1;
  Eigen::VectorXd p = g.prefix_line(0);
  Eigen::ArrayXd best = p.segment(k0, m).array() - p[k0];
  for (int line = 2; line <= n; ++line) {
    p = g.prefix_line(line - 1);
    const Eigen::ArrayXd pk = p.segment(k0, m).array();
    double run = -kInf;
    for (int i = 0; i < m; ++i) {
      run = std::max(run, best[i] - pk[i]);
      best[i] = pk[i] + run;
    }
  }
  return best[m - 1];
}

}  // namespace oyldp::polymer
