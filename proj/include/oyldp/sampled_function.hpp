#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include <json.hpp>

namespace oyldp::convex {

struct GridSpec {
  double lo = 0.0;
  double hi = 1.0;
  int n = 2;  // node count, >= 2

  double step() const { return (hi - lo) / (n - 1); }
  double point(int i) const { return lo + i * step(); }
  void validate() const;  // throws std::invalid_argument
};

// Function table on a uniform grid. +infinity entries mark points outside the
// effective domain; the finite region must be a contiguous block. Arithmetic
// with the sentinel saturates (IEEE semantics), NaN and -infinity are rejected.
class SampledFunction {
 public:
  SampledFunction(GridSpec grid, Eigen::ArrayXd values);
  SampledFunction(GridSpec grid, Eigen::ArrayXd values,
                  std::vector<std::uint8_t> boundary);

  const GridSpec& grid() const { return grid_; }
  const Eigen::ArrayXd& values() const { return values_; }

  // Per-node flag: the extremum defining this value was attained at an
  // endpoint of the search window, so the value is window-limited.
  const std::vector<std::uint8_t>& boundary_flags() const { return boundary_; }
  bool any_boundary_flag(int node_lo, int node_hi) const;

  int first_finite() const { return first_finite_; }  // -1 when domain empty
  int last_finite() const { return last_finite_; }
  bool empty_domain() const { return first_finite_ < 0; }

  // Linear interpolation inside the grid; +infinity outside it and on cells
  // with an infinite endpoint (values exactly on a finite node stay finite).
  double operator()(double x) const;

  // Largest midpoint-convexity violation over consecutive finite triples;
  // <= 0 (up to rounding) for convex data.
  double convexity_defect() const;

  // CSV: header "x,value", rows with 17 significant digits, "inf" sentinel.
  void write_csv(std::ostream& os) const;
  static SampledFunction read_csv(std::istream& is);

  nlohmann::json to_json() const;
  static SampledFunction from_json(const nlohmann::json& j);

 private:
  void establish_invariants();

  GridSpec grid_;
  Eigen::ArrayXd values_;
  std::vector<std::uint8_t> boundary_;
  int first_finite_ = -1;
  int last_finite_ = -1;
};

}  // namespace oyldp::convex
