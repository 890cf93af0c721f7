#include "oyldp/sampled_function.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace oyldp::convex {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string format_value(double v) {
  if (v == kInf) return "inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_value(const std::string& tok) {
  if (tok == "inf" || tok == "+inf") return kInf;
  size_t pos = 0;
  const double v = std::stod(tok, &pos);
  if (pos != tok.size()) throw std::invalid_argument("bad numeric token: " + tok);
  return v;
}

}  // namespace

void GridSpec::validate() const {
  if (!(n >= 2)) throw std::invalid_argument("GridSpec: need at least 2 nodes");
  if (!(lo < hi)) throw std::invalid_argument("GridSpec: lo must be < hi");
  if (!std::isfinite(lo) || !std::isfinite(hi)) {
    throw std::invalid_argument("GridSpec: endpoints must be finite");
  }
}

SampledFunction::SampledFunction(GridSpec grid, Eigen::ArrayXd values)
    : grid_(grid), values_(std::move(values)), boundary_(values_.size(), 0) {
  establish_invariants();
}

SampledFunction::SampledFunction(GridSpec grid, Eigen::ArrayXd values,
                                 std::vector<std::uint8_t> boundary)
    : grid_(grid), values_(std::move(values)), boundary_(std::move(boundary)) {
  if (static_cast<int>(boundary_.size()) != static_cast<int>(values_.size())) {
    throw std::invalid_argument("SampledFunction: flag array size mismatch");
  }
  establish_invariants();
}

void SampledFunction::establish_invariants() {
  grid_.validate();
  if (static_cast<int>(values_.size()) != grid_.n) {
    throw std::invalid_argument("SampledFunction: value count does not match grid");
  }
  first_finite_ = last_finite_ = -1;
  bool seen_gap_after_finite = false;
  for (int i = 0; i < grid_.n; ++i) {
    const double v = values_[i];
    if (std::isnan(v) || v == -kInf) {
      throw std::invalid_argument("SampledFunction: values must be finite or +inf");
    }
    if (v < kInf) {
      if (seen_gap_after_finite) {
        throw std::invalid_argument("SampledFunction: finite region must be contiguous");
      }
      if (first_finite_ < 0) first_finite_ = i;
      last_finite_ = i;
    } else if (first_finite_ >= 0) {
      seen_gap_after_finite = true;
    }
  }
}

bool SampledFunction::any_boundary_flag(int node_lo, int node_hi) const {
  for (int i = std::max(node_lo, 0); i <= std::min(node_hi, grid_.n - 1); ++i) {
    if (boundary_[i]) return true;
  }
  return false;
}

double SampledFunction::operator()(double x) const {
  const double h = grid_.step();
  const double t = (x - grid_.lo) / h;
  if (t < -1e-9 || t > grid_.n - 1 + 1e-9) return kInf;
  int i = static_cast<int>(std::floor(t));
  i = std::max(0, std::min(i, grid_.n - 2));
  const double frac = t - i;
  if (frac <= 1e-12) return values_[i];
  if (frac >= 1.0 - 1e-12) return values_[i + 1];
  const double a = values_[i], b = values_[i + 1];
  if (a == kInf || b == kInf) return kInf;
  return a + frac * (b - a);
}

double SampledFunction::convexity_defect() const {
  double worst = -kInf;
  for (int i = first_finite_ + 1; i <= last_finite_ - 1; ++i) {
    worst = std::max(worst, values_[i] - 0.5 * (values_[i - 1] + values_[i + 1]));
  }
  return (worst == -kInf) ? 0.0 : worst;
}

void SampledFunction::write_csv(std::ostream& os) const {
  os << "x,value\n";
  for (int i = 0; i < grid_.n; ++i) {
    os << format_value(grid_.point(i)) << ',' << format_value(values_[i]) << '\n';
  }
}

SampledFunction SampledFunction::read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("x,value", 0) != 0) {
    throw std::invalid_argument("SampledFunction csv: missing x,value header");
  }
  std::vector<double> xs, vs;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw std::invalid_argument("SampledFunction csv: malformed row: " + line);
    }
    xs.push_back(parse_value(line.substr(0, comma)));
    vs.push_back(parse_value(line.substr(comma + 1)));
  }
  if (xs.size() < 2) throw std::invalid_argument("SampledFunction csv: need >= 2 rows");
  GridSpec grid{xs.front(), xs.back(), static_cast<int>(xs.size())};
  grid.validate();
  const double h = grid.step();
  for (size_t i = 0; i < xs.size(); ++i) {
    if (std::abs(xs[i] - grid.point(static_cast<int>(i))) > 1e-9 * std::max(1.0, std::abs(h))) {
      throw std::invalid_argument("SampledFunction csv: grid is not uniform");
    }
  }
  Eigen::ArrayXd values(static_cast<int>(vs.size()));
  for (size_t i = 0; i < vs.size(); ++i) values[static_cast<int>(i)] = vs[i];
  return SampledFunction(grid, std::move(values));
}

nlohmann::json SampledFunction::to_json() const {
  nlohmann::json j;
  j["grid"] = {{"lo", grid_.lo}, {"hi", grid_.hi}, {"n", grid_.n}};
  auto& vals = j["values"] = nlohmann::json::array();
  for (int i = 0; i < grid_.n; ++i) {
    if (values_[i] == kInf) {
      vals.push_back("inf");
    } else {
      vals.push_back(values_[i]);
    }
  }
  j["boundary_flags"] = boundary_;
  return j;
}

SampledFunction SampledFunction::from_json(const nlohmann::json& j) {
  GridSpec grid{j.at("grid").at("lo").get<double>(), j.at("grid").at("hi").get<double>(),
                j.at("grid").at("n").get<int>()};
  const auto& vals = j.at("values");
  Eigen::ArrayXd values(static_cast<int>(vals.size()));
  for (int i = 0; i < static_cast<int>(vals.size()); ++i) {
    values[i] = vals[i].is_string() ? kInf : vals[i].get<double>();
  }
  std::vector<std::uint8_t> flags;
  if (j.contains("boundary_flags")) {
    flags = j.at("boundary_flags").get<std::vector<std::uint8_t>>();
    return SampledFunction(grid, std::move(values), std::move(flags));
  }
  return SampledFunction(grid, std::move(values));
}

}  // namespace oyldp::convex
