#pragma once

#include <cstdint>
#include <string>

#include <Eigen/Dense>

// A sampled Brownian environment: n_lines independent driving motions plus an
// optional boundary motion, all on the uniform grid
//   time(k) = (k - n_neg) * step,   k = 0 .. n_steps,
// covering [-trunc_T, horizon] with time 0 at node n_neg. increments(i, k) is
// the motion of line i over (time(k), time(k+1)), variance step.

namespace oyldp::env {

struct EnvGrid {
  std::uint64_t seed = 0;
  double step = 0.0;
  double horizon = 0.0;
  double trunc_T = 0.0;
  int n_lines = 0;
  int n_neg = 0;    // increments before time 0
  int n_steps = 0;  // total increments; nodes are n_steps + 1
  Eigen::MatrixXd increments;  // n_lines x n_steps
  Eigen::VectorXd boundary;    // n_steps, present iff trunc_T > 0

  bool has_boundary() const { return trunc_T > 0.0; }
  int n_nodes() const { return n_steps + 1; }
  double time_at(int node) const { return (node - n_neg) * step; }

  // Grid node at the given time; throws std::invalid_argument when the time
  // is not on the grid (relative slack 1e-9).
  int node_of(double time) const;

  // Cumulative motion of line i (row index), anchored so the value at time 0
  // is exactly zero. Length n_nodes().
  Eigen::VectorXd prefix_line(int i) const;
  Eigen::VectorXd prefix_boundary() const;

  // The same underlying motions on a grid of step 2 * step, by summing
  // adjacent increments. Requires n_neg and n_steps - n_neg to be even.
  EnvGrid coarsen() const;

  void validate() const;  // throws std::invalid_argument on malformed state

  // Raw little-endian container plus a JSON manifest at path + ".json".
  void write_binary(const std::string& path) const;
  static EnvGrid read_binary(const std::string& path);
};

// Fresh Gaussian increments. Line i draws from stream i + 1 and the boundary
// from stream 0, so enlarging n_lines never perturbs existing lines.
// horizon / step and trunc_T / step must be integral; horizon may be 0 when
// trunc_T > 0.
EnvGrid sample_environment(int n_lines, double horizon, double step,
                           double trunc_T, std::uint64_t seed);

}  // namespace oyldp::env
