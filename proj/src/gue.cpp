#include "oyldp/gue.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "oyldp/rng.hpp"

namespace oyldp::gue {
namespace {

// Eigenvalues of T - x I strictly below zero, counted through the signs of
// the LDL^T pivots. A vanishing pivot is treated as an infinitesimal
// negative, the usual bisection-safe convention.
int count_below(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double x) {
  const auto n = a.size();
  int count = 0;
  double d = 1.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double off = (i > 0) ? b[i - 1] * b[i - 1] / d : 0.0;
    d = a[i] - x - off;
    if (d == 0.0) d = -1e-300;
    if (d < 0.0) ++count;
  }
  return count;
}

}  // namespace

Eigen::MatrixXcd sample_matrix(int n, std::uint64_t seed) {
  if (n < 1 || n > 64) throw std::invalid_argument("gue: need 1 <= n <= 64");
  rng::CounterRng r(seed, 0, 0);
  std::vector<double> draws(static_cast<std::size_t>(n) * n);
  r.fill_gaussian(draws.data(), static_cast<std::ptrdiff_t>(draws.size()));

  const double sd_diag = 0.5 / std::sqrt(static_cast<double>(n));
  const double sd_off = sd_diag / std::sqrt(2.0);
  Eigen::MatrixXcd h(n, n);
  std::size_t next = 0;
  for (int i = 0; i < n; ++i) {
    h(i, i) = sd_diag * draws[next++];
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const std::complex<double> z(sd_off * draws[next], sd_off * draws[next + 1]);
      next += 2;
      h(i, j) = z;
      h(j, i) = std::conj(z);
    }
  }
  return h;
}

double top_eigenvalue_tridiagonal(const Eigen::VectorXd& a,
                                  const Eigen::VectorXd& b) {
  const auto n = a.size();
  if (n < 1 || b.size() != n - 1) {
    throw std::invalid_argument("gue: tridiagonal shape mismatch");
  }
  if (n == 1) return a[0];
  double lo = a[0], hi = a[0];
  for (Eigen::Index i = 0; i < n; ++i) {
    const double radius = ((i > 0) ? std::abs(b[i - 1]) : 0.0) +
                          ((i + 1 < n) ? std::abs(b[i]) : 0.0);
    lo = std::min(lo, a[i] - radius);
    hi = std::max(hi, a[i] + radius);
  }
  const double scale = std::max({1.0, std::abs(lo), std::abs(hi)});
  for (int iter = 0; iter < 200 && hi - lo > 1e-14 * scale; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (count_below(a, b, mid) >= n) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double top_eigenvalue(const Eigen::MatrixXcd& h) {
  if (h.rows() != h.cols() || h.rows() < 1) {
    throw std::invalid_argument("gue: matrix must be square");
  }
  if (h.rows() == 1) return h(0, 0).real();
  Eigen::Tridiagonalization<Eigen::MatrixXcd> tri(h);
  return top_eigenvalue_tridiagonal(tri.diagonal(), tri.subDiagonal());
}

}  // namespace oyldp::gue
