#include "oyldp/env_grid.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "oyldp/rng.hpp"

namespace oyldp::env {
namespace {

constexpr char kMagic[8] = {'O', 'Y', 'E', 'N', 'V', 'G', 'R', 'D'};
constexpr std::uint32_t kVersion = 1;

int steps_of(double span, double step, const char* what) {
  const double q = span / step;
  const int n = static_cast<int>(std::llround(q));
  if (n < 0 || std::abs(q - n) > 1e-9 * std::max(1.0, std::abs(q))) {
    throw std::invalid_argument(std::string(what) + " must be a multiple of step");
  }
  return n;
}

template <typename T>
void put(std::ofstream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void get(std::ifstream& is, T& v) {
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
}

}  // namespace

int EnvGrid::node_of(double time) const {
  const int k = n_neg + static_cast<int>(std::llround(time / step));
  if (k < 0 || k > n_steps ||
      std::abs(time - time_at(k)) > 1e-9 * std::max(1.0, std::abs(time))) {
    throw std::invalid_argument("EnvGrid: time is not a grid node");
  }
  return k;
}

Eigen::VectorXd EnvGrid::prefix_line(int i) const {
  if (i < 0 || i >= n_lines) throw std::invalid_argument("EnvGrid: line index");
  Eigen::VectorXd p(n_nodes());
  p[n_neg] = 0.0;
  for (int k = n_neg; k < n_steps; ++k) p[k + 1] = p[k] + increments(i, k);
  for (int k = n_neg; k > 0; --k) p[k - 1] = p[k] - increments(i, k - 1);
  return p;
}

Eigen::VectorXd EnvGrid::prefix_boundary() const {
  if (!has_boundary()) throw std::invalid_argument("EnvGrid: no boundary motion");
  Eigen::VectorXd p(n_nodes());
  p[n_neg] = 0.0;
  for (int k = n_neg; k < n_steps; ++k) p[k + 1] = p[k] + boundary[k];
  for (int k = n_neg; k > 0; --k) p[k - 1] = p[k] - boundary[k - 1];
  return p;
}

EnvGrid EnvGrid::coarsen() const {
  validate();
  if (n_neg % 2 != 0 || (n_steps - n_neg) % 2 != 0) {
    throw std::invalid_argument("EnvGrid::coarsen: odd step counts");
  }
  EnvGrid out;
  out.seed = seed;
  out.step = 2.0 * step;
  out.horizon = horizon;
  out.trunc_T = trunc_T;
  out.n_lines = n_lines;
  out.n_neg = n_neg / 2;
  out.n_steps = n_steps / 2;
  out.increments.resize(n_lines, out.n_steps);
  for (int k = 0; k < out.n_steps; ++k) {
    out.increments.col(k) = increments.col(2 * k) + increments.col(2 * k + 1);
  }
  if (has_boundary()) {
    out.boundary.resize(out.n_steps);
    for (int k = 0; k < out.n_steps; ++k) {
      out.boundary[k] = boundary[2 * k] + boundary[2 * k + 1];
    }
  }
  return out;
}

void EnvGrid::validate() const {
  if (!(step > 0.0)) throw std::invalid_argument("EnvGrid: step must be > 0");
  if (n_lines < 1) throw std::invalid_argument("EnvGrid: need at least one line");
  if (n_steps < 1 || n_neg < 0 || n_neg > n_steps) {
    throw std::invalid_argument("EnvGrid: inconsistent step counts");
  }
  if (increments.rows() != n_lines || increments.cols() != n_steps) {
    throw std::invalid_argument("EnvGrid: increment matrix shape");
  }
  if (has_boundary() && boundary.size() != n_steps) {
    throw std::invalid_argument("EnvGrid: boundary length");
  }
}

void EnvGrid::write_binary(const std::string& path) const {
  validate();
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("EnvGrid: cannot open " + path);
  os.write(kMagic, sizeof(kMagic));
  put(os, kVersion);
  put(os, seed);
  put(os, static_cast<std::int32_t>(n_lines));
  put(os, static_cast<std::int32_t>(n_neg));
  put(os, static_cast<std::int32_t>(n_steps));
  put(os, step);
  put(os, horizon);
  put(os, trunc_T);
  const std::uint8_t hb = has_boundary() ? 1 : 0;
  put(os, hb);
  for (int i = 0; i < n_lines; ++i) {
    os.write(reinterpret_cast<const char*>(increments.row(i).eval().data()),
             sizeof(double) * n_steps);
  }
  if (hb) {
    os.write(reinterpret_cast<const char*>(boundary.data()),
             sizeof(double) * n_steps);
  }
  if (!os) throw std::runtime_error("EnvGrid: short write to " + path);

  nlohmann::json manifest = {
      {"format", "oyldp-env"}, {"version", kVersion},
      {"seed", seed},          {"n_lines", n_lines},
      {"n_neg", n_neg},        {"n_steps", n_steps},
      {"step", step},          {"horizon", horizon},
      {"trunc_T", trunc_T},    {"has_boundary", hb != 0},
      {"payload", path.substr(path.find_last_of("/\\") + 1)}};
  std::ofstream ms(path + ".json", std::ios::trunc);
  ms << manifest.dump(2) << "\n";
}

EnvGrid EnvGrid::read_binary(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("EnvGrid: cannot open " + path);
  char magic[8];
  is.read(magic, sizeof(magic));
  std::uint32_t version = 0;
  get(is, version);
  if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0 || version != kVersion) {
    throw std::runtime_error("EnvGrid: bad container header in " + path);
  }
  EnvGrid g;
  std::int32_t n_lines = 0, n_neg = 0, n_steps = 0;
  std::uint8_t hb = 0;
  get(is, g.seed);
  get(is, n_lines);
  get(is, n_neg);
  get(is, n_steps);
  get(is, g.step);
  get(is, g.horizon);
  get(is, g.trunc_T);
  get(is, hb);
  g.n_lines = n_lines;
  g.n_neg = n_neg;
  g.n_steps = n_steps;
  if (!is || n_lines < 1 || n_steps < 1) {
    throw std::runtime_error("EnvGrid: corrupt dimensions in " + path);
  }
  g.increments.resize(n_lines, n_steps);
  Eigen::VectorXd row(n_steps);
  for (int i = 0; i < n_lines; ++i) {
    is.read(reinterpret_cast<char*>(row.data()), sizeof(double) * n_steps);
    g.increments.row(i) = row;
  }
  if (hb) {
    g.boundary.resize(n_steps);
    is.read(reinterpret_cast<char*>(g.boundary.data()), sizeof(double) * n_steps);
  }
  if (!is) throw std::runtime_error("EnvGrid: truncated payload in " + path);
  g.validate();
  return g;
}

EnvGrid sample_environment(int n_lines, double horizon, double step,
                           double trunc_T, std::uint64_t seed) {
  if (!(step > 0.0)) throw std::invalid_argument("sample_environment: step");
  if (horizon < 0.0 || trunc_T < 0.0) {
    throw std::invalid_argument("sample_environment: negative span");
  }
  EnvGrid g;
  g.seed = seed;
  g.step = step;
  g.horizon = horizon;
  g.trunc_T = trunc_T;
  g.n_lines = n_lines;
  g.n_neg = steps_of(trunc_T, step, "trunc_T");
  g.n_steps = g.n_neg + steps_of(horizon, step, "horizon");
  if (g.n_steps < 1) {
    throw std::invalid_argument("sample_environment: empty grid");
  }
  const double scale = std::sqrt(step);
  g.increments.resize(n_lines, g.n_steps);
  Eigen::VectorXd row(g.n_steps);
  for (int i = 0; i < n_lines; ++i) {
    rng::CounterRng r(seed, static_cast<std::uint64_t>(i) + 1, 0);
    r.fill_gaussian(row.data(), g.n_steps);
    g.increments.row(i) = scale * row;
  }
  if (g.has_boundary()) {
    rng::CounterRng r(seed, 0, 1);
    g.boundary.resize(g.n_steps);
    r.fill_gaussian(g.boundary.data(), g.n_steps);
    g.boundary *= scale;
  }
  g.validate();
  return g;
}

}  // namespace oyldp::env
