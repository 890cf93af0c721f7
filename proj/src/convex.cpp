#include "oyldp/convex.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace oyldp::convex {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::ArrayXd grid_points(const GridSpec& g) {
  return Eigen::ArrayXd::LinSpaced(g.n, g.lo, g.hi);
}

}  // namespace

SampledFunction legendre_transform(const SampledFunction& f, const GridSpec& dual) {
  dual.validate();
  if (f.empty_domain()) {
    throw std::domain_error("legendre_transform: empty effective domain");
  }
  const int i0 = f.first_finite();
  const int len = f.last_finite() - i0 + 1;
  const Eigen::ArrayXd xs = grid_points(f.grid()).segment(i0, len);
  const Eigen::ArrayXd vs = f.values().segment(i0, len);
  Eigen::ArrayXd out(dual.n);
  std::vector<std::uint8_t> flags(dual.n, 0);
  for (int k = 0; k < dual.n; ++k) {
    const double p = dual.point(k);
    Eigen::Index arg = 0;
    out[k] = (p * xs - vs).maxCoeff(&arg);
    flags[k] = (arg == 0 || arg == len - 1) ? 1 : 0;
  }
  return SampledFunction(dual, std::move(out), std::move(flags));
}

SampledFunction inf_convolution(const SampledFunction& f, const SampledFunction& g,
                                const GridSpec& out) {
  out.validate();
  if (f.empty_domain() || g.empty_domain()) {
    throw std::domain_error("inf_convolution: empty effective domain");
  }
  const double dom_lo = f.grid().point(f.first_finite()) + g.grid().point(g.first_finite());
  const double dom_hi = f.grid().point(f.last_finite()) + g.grid().point(g.last_finite());
  if (out.hi < dom_lo - 1e-12 || out.lo > dom_hi + 1e-12) {
    throw std::invalid_argument("inf_convolution: output window misses dom f + dom g");
  }
  const int j0 = g.first_finite();
  const int j1 = g.last_finite();
  const double f_lo = f.grid().point(f.first_finite());
  const double f_hi = f.grid().point(f.last_finite());
  const double f_step = f.grid().step();
  Eigen::ArrayXd vals(out.n);
  std::vector<std::uint8_t> flags(out.n, 0);
  for (int k = 0; k < out.n; ++k) {
    const double x = out.point(k);
    double best = kInf;
    int best_j = -1;
    for (int j = j0; j <= j1; ++j) {
      const double gv = g.values()[j];
      const double cand = gv + f(x - g.grid().point(j));
      if (cand < best) {
        best = cand;
        best_j = j;
      }
    }
    vals[k] = best;
    if (best_j >= 0 && best < kInf) {
      bool flag = (best_j == j0 || best_j == j1) || g.boundary_flags()[best_j];
      const double farg = x - g.grid().point(best_j);
      if (farg < f_lo + f_step || farg > f_hi - f_step) flag = true;
      if (!flag) {
        const int fi = static_cast<int>(std::lround((farg - f.grid().lo) / f_step));
        if (fi >= 0 && fi < f.grid().n && f.boundary_flags()[fi]) flag = true;
      }
      flags[k] = flag ? 1 : 0;
    }
  }
  return SampledFunction(out, std::move(vals), std::move(flags));
}

SampledFunction biconjugate(const SampledFunction& f, const GridSpec& dual) {
  return legendre_transform(legendre_transform(f, dual), f.grid());
}

SampledFunction biconjugate(const SampledFunction& f) {
  if (f.empty_domain()) {
    throw std::domain_error("biconjugate: empty effective domain");
  }
  const int i0 = f.first_finite();
  const int i1 = f.last_finite();
  double lo_slope = -1.0, hi_slope = 1.0;
  if (i1 > i0) {
    const double h = f.grid().step();
    lo_slope = kInf;
    hi_slope = -kInf;
    for (int i = i0; i < i1; ++i) {
      const double s = (f.values()[i + 1] - f.values()[i]) / h;
      lo_slope = std::min(lo_slope, s);
      hi_slope = std::max(hi_slope, s);
    }
  } else {
    lo_slope = hi_slope = 0.0;
  }
  GridSpec dual{lo_slope - 1.0, hi_slope + 1.0,
                std::min(20001, std::max(1001, 4 * (f.grid().n - 1) + 1))};
  return biconjugate(f, dual);
}

}  // namespace oyldp::convex
