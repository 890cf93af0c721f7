#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

// Scalar root finding and one-dimensional minimization used throughout the
// library. Every routine has a hard iteration budget; exhausting it throws
// std::runtime_error rather than returning a half-converged value.

namespace oyldp::solvers {

inline constexpr int kIterationBudget = 200;

// Expands multiplicatively from a positive initial guess until f changes sign.
// f must be monotone on (0, inf) in the stated direction; on return
// [lo, hi] brackets the root.
inline void expand_bracket_positive(const std::function<double(double)>& f,
                                    double guess, bool increasing, double& lo,
                                    double& hi) {
  if (!(guess > 0.0)) guess = 1.0;
  double x = guess;
  double fx = f(x);
  if (fx == 0.0) {
    lo = hi = x;
    return;
  }
  // Root lies below x when f already has the sign it takes at +inf.
  const bool root_below = increasing ? (fx > 0.0) : (fx < 0.0);
  if (root_below) {
    hi = x;
    for (int i = 0; i < kIterationBudget; ++i) {
      lo = hi / 4.0;
      const double flo = f(lo);
      if (flo == 0.0) {
        hi = lo;
        return;
      }
      if ((flo > 0.0) != (fx > 0.0)) return;
      hi = lo;
    }
  } else {
    lo = x;
    for (int i = 0; i < kIterationBudget; ++i) {
      hi = lo * 4.0;
      const double fhi = f(hi);
      if (fhi == 0.0) {
        lo = hi;
        return;
      }
      if ((fhi > 0.0) != (fx > 0.0)) return;
      lo = hi;
    }
  }
  throw std::runtime_error("expand_bracket_positive: no sign change found");
}

// Root of monotone f on [lo, hi] (f(lo), f(hi) of opposite sign or zero) by
// bisection safeguarded with secant steps; converges to machine precision.
inline double bracketed_root(const std::function<double(double)>& f, double lo,
                             double hi) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) {
    throw std::invalid_argument("bracketed_root: endpoints do not bracket a root");
  }
  double x = 0.5 * (lo + hi);
  for (int i = 0; i < kIterationBudget; ++i) {
    // Secant proposal, bisection fallback.
    double cand = lo - flo * (hi - lo) / (fhi - flo);
    if (!(cand > lo && cand < hi)) cand = 0.5 * (lo + hi);
    const double fc = f(cand);
    x = cand;
    if (fc == 0.0) return cand;
    if ((fc > 0.0) == (fhi > 0.0)) {
      hi = cand;
      fhi = fc;
    } else {
      lo = cand;
      flo = fc;
    }
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() *
                       (std::abs(lo) + std::abs(hi))) {
      return 0.5 * (lo + hi);
    }
  }
  return x;
}

// Newton iteration for monotone f on a valid bracket [lo, hi], clipped to the
// bracket with bisection fallback when a step leaves it or stalls.
inline double newton_root(const std::function<double(double)>& f,
                          const std::function<double(double)>& fprime,
                          double lo, double hi) {
  if (lo == hi) return lo;
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) {
    throw std::invalid_argument("newton_root: endpoints do not bracket a root");
  }
  double x = 0.5 * (lo + hi);
  for (int i = 0; i < kIterationBudget; ++i) {
    const double fx = f(x);
    if (fx == 0.0) return x;
    if ((fx > 0.0) == (fhi > 0.0)) {
      hi = x;
      fhi = fx;
    } else {
      lo = x;
      flo = fx;
    }
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() *
                       (std::abs(lo) + std::abs(hi))) {
      return 0.5 * (lo + hi);
    }
    const double dfx = fprime(x);
    double next = (dfx != 0.0) ? x - fx / dfx : lo;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    x = next;
  }
  return x;
}

struct MinResult {
  double x;
  double value;
};

// Golden-section minimum of a unimodal f on [lo, hi] to interval width xtol.
// +infinity values are legal (treated as larger than everything finite).
inline MinResult golden_min(const std::function<double(double)>& f, double lo,
                            double hi, double xtol = 1e-12) {
  if (!(hi >= lo)) throw std::invalid_argument("golden_min: empty interval");
  const double invphi = 0.6180339887498948482;
  double a = lo, b = hi;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int i = 0; i < kIterationBudget && (b - a) > xtol; ++i) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = f(x2);
    }
  }
  MinResult res;
  res.x = (f1 <= f2) ? x1 : x2;
  res.value = std::min(f1, f2);
  // One finite-difference Newton polish step, kept only if it improves.
  const double h = 1e-6 * (1.0 + std::abs(res.x));
  if (res.x - h > lo && res.x + h < hi) {
    const double fp = f(res.x + h), fm = f(res.x - h), f0 = res.value;
    const double d1 = (fp - fm) / (2.0 * h);
    const double d2 = (fp - 2.0 * f0 + fm) / (h * h);
    if (d2 > 0.0 && std::isfinite(d1)) {
      const double cand = res.x - d1 / d2;
      if (cand > lo && cand < hi) {
        const double fc = f(cand);
        if (fc < res.value) {
          res.x = cand;
          res.value = fc;
        }
      }
    }
  }
  return res;
}

// Downhill expansion for a minimum of f over the open interval (lo, hi),
// starting from an interior seed. hi may be +infinity. Returns [a, b]
// containing a minimizer. Evaluations stay strictly inside (lo, hi).
inline void bracket_minimum(const std::function<double(double)>& f, double lo,
                            double hi, double& a, double& b) {
  const bool unbounded = !std::isfinite(hi);
  double seed = unbounded ? lo + 1.0 : 0.5 * (lo + hi);
  double step = unbounded ? 1.0 : 0.25 * (hi - lo);
  double fseed = f(seed);
  // Walk right while descending.
  double right = seed, fright = fseed, s = step;
  for (int i = 0; i < kIterationBudget; ++i) {
    double cand = unbounded ? right + s : right + 0.5 * (hi - right);
    if (!unbounded && cand >= hi) cand = 0.5 * (right + hi);
    const double fc = f(cand);
    if (fc >= fright) {
      b = cand;
      break;
    }
    right = cand;
    fright = fc;
    s *= 2.0;
    if (i == kIterationBudget - 1) {
      throw std::runtime_error("bracket_minimum: function keeps descending to the right");
    }
  }
  // Walk left while descending, approaching the open endpoint geometrically.
  double left = seed, fleft = fseed;
  for (int i = 0; i < kIterationBudget; ++i) {
    const double cand = lo + 0.25 * (left - lo);
    const double fc = f(cand);
    if (fc >= fleft) {
      a = cand;
      return;
    }
    left = cand;
    fleft = fc;
    if (i == kIterationBudget - 1) {
      throw std::runtime_error("bracket_minimum: function keeps descending to the left");
    }
  }
}

}  // namespace oyldp::solvers
