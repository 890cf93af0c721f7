#pragma once

#include <Eigen/Dense>

#include "oyldp/env_grid.hpp"
#include "oyldp/report.hpp"

// Partition functions of the semi-discrete directed polymer over a sampled
// environment. Chamber integrals are trapezoid sums over the grid; every
// recursion normalizes by the running maximum before exponentiating, so the
// only numbers ever exponentiated are <= 0.

namespace oyldp::polymer {

// log Z_{j,n}(u, t): polymer started on line j at time u, ending on line n at
// time t (1-based lines). Returns -inf when the chamber is empty (u == t with
// j < n); throws std::invalid_argument for u > t, off-grid times, or line
// indices outside 1 <= j <= n <= n_lines.
double log_partition(const env::EnvGrid& g, int j, int n, double u, double t);

// log Z_{j,n}(w, t) for every start node w <= node_of(t), one backward sweep.
// Row j-1 holds level j; entries at nodes past t are -inf.
Eigen::MatrixXd backward_log_partition(const env::EnvGrid& g, int n, double t);

// Stationary partition functions with boundary tilt theta, all levels in one
// sweep: row k holds log Z_k^theta at every node, where the level-0 process
// is exp(theta u - B(u)) on the boundary motion B. The integral over
// (-inf, -trunc_T) is dropped; with trunc_T ~ 30 / theta the lost mass is
// below 1e-12 relative. Row k's value at the first node is -inf.
Eigen::MatrixXd stationary_levels(const env::EnvGrid& g, double theta, int n);

double log_partition_stationary(const env::EnvGrid& g, double theta, int n,
                                double t);

// Departure increments of the coupled queueing system: r(k-1, v) is r_k at
// node v, built by the recursion
//   r_k(v) = Y_{k-1}(v) - theta v + B_k(v) + log int_{-T}^v exp(theta u -
//            Y_{k-1}(u) - B_k(u)) du,   Y_k = Y_{k-1} + r_k(0) - r_k(.),
// with Y_0 = B. In the stationary law exp(-r_k(v)) is Gamma(theta, 1) in
// each coordinate and increments over disjoint k are independent.
struct StationaryQueue {
  Eigen::MatrixXd r;
  // Share of the r_1 integral at time 0 carried by its first grid cell; a
  // proxy for the mass lost to boundary truncation.
  double remainder_estimate = 0.0;
};

StationaryQueue stationary_r_sequence(const env::EnvGrid& g, double theta,
                                      int k_max);

// Two consistency checks on one environment:
//  - queueing decomposition: sum_k r_k(t) = B(t) - theta t + log Z_n^theta(t),
//    exact for the shared trapezoid quadrature (tolerance 1e-6);
//  - coupling: Z_n^theta(t) rebuilt from level values at time 0 and plain
//    polymer partitions, which carries an O(step) quadrature residual and is
//    reported for step-halving comparisons, not gated here.
VerificationReport verify_stationary_decomposition(const env::EnvGrid& g,
                                                   double theta, int n,
                                                   double t);

// Brownian last-passage time over lines 1..n from time 0 to t:
//   max over 0 <= s_1 <= ... <= s_{n-1} <= t of sum_k B_k(s_{k-1}, s_k).
double brownian_lpp_max(const env::EnvGrid& g, int n, double t);

}  // namespace oyldp::polymer
