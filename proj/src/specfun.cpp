#include "oyldp/specfun.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "oyldp/solvers.hpp"

namespace oyldp::specfun {
namespace {

constexpr double kHalfLog2Pi = 0.91893853320467274178032973640562;
constexpr double kEulerGamma = 0.57721566490153286060651209008240;

// Asymptotic series are applied after shifting the argument to >= kShift;
// truncation error there is below 1e-17 for every series used.
constexpr double kShift = 10.0;

void require_positive(double x, const char* who) {
  if (!(x > 0.0)) throw std::domain_error(std::string(who) + ": argument must be > 0");
}

}  // namespace

double log_gamma(double x) {
  require_positive(x, "log_gamma");
  double shift = 0.0;
  while (x < kShift) {
    shift -= std::log(x);
    x += 1.0;
  }
  // Stirling series, coefficients B_{2k} / (2k (2k-1)).
  const double w = 1.0 / (x * x);
  double series = -3617.0 / 122400.0;
  series = series * w + 1.0 / 156.0;
  series = series * w - 691.0 / 360360.0;
  series = series * w + 1.0 / 1188.0;
  series = series * w - 1.0 / 1680.0;
  series = series * w + 1.0 / 1260.0;
  series = series * w - 1.0 / 360.0;
  series = series * w + 1.0 / 12.0;
  return shift + (x - 0.5) * std::log(x) - x + kHalfLog2Pi + series / x;
}

double digamma(double x) {
  require_positive(x, "digamma");
  double shift = 0.0;
  while (x < kShift) {
    shift -= 1.0 / x;
    x += 1.0;
  }
  // psi_0(x) ~ log x - 1/(2x) - sum B_{2k} / (2k x^{2k}).
  const double w = 1.0 / (x * x);
  double series = -3617.0 / 8160.0;
  series = series * w + 1.0 / 12.0;
  series = series * w - 691.0 / 32760.0;
  series = series * w + 1.0 / 132.0;
  series = series * w - 1.0 / 240.0;
  series = series * w + 1.0 / 252.0;
  series = series * w - 1.0 / 120.0;
  series = series * w + 1.0 / 12.0;
  return shift + std::log(x) - 0.5 / x - series * w;
}

double trigamma(double x) {
  require_positive(x, "trigamma");
  double shift = 0.0;
  while (x < kShift) {
    shift += 1.0 / (x * x);
    x += 1.0;
  }
  // psi_1(x) ~ 1/x + 1/(2x^2) + sum B_{2k} x^{-2k-1}.
  const double w = 1.0 / (x * x);
  double series = -3617.0 / 510.0;
  series = series * w + 7.0 / 6.0;
  series = series * w - 691.0 / 2730.0;
  series = series * w + 5.0 / 66.0;
  series = series * w - 1.0 / 30.0;
  series = series * w + 1.0 / 42.0;
  series = series * w - 1.0 / 30.0;
  series = series * w + 1.0 / 6.0;
  return shift + 1.0 / x + 0.5 * w + series * w / x;
}

double tetragamma(double x) {
  require_positive(x, "tetragamma");
  double shift = 0.0;
  while (x < kShift) {
    shift -= 2.0 / (x * x * x);
    x += 1.0;
  }
  // psi_2(x) ~ -1/x^2 - 1/x^3 - sum (2k+1) B_{2k} x^{-2k-2}.
  const double w = 1.0 / (x * x);
  double series = -35.0 / 2.0;
  series = series * w + 691.0 / 210.0;
  series = series * w - 5.0 / 6.0;
  series = series * w + 3.0 / 10.0;
  series = series * w - 1.0 / 6.0;
  series = series * w + 1.0 / 6.0;
  series = series * w - 1.0 / 2.0;
  return shift - w - w / x + series * w * w;
}

double inv_digamma(double y) {
  // Asymptotic initial guess: psi_0(x) ~ log x for large x, ~ -1/x near 0.
  const double guess = (y >= -2.22) ? std::exp(y) + 0.5 : -1.0 / (y + kEulerGamma);
  auto f = [y](double x) { return digamma(x) - y; };
  double lo, hi;
  solvers::expand_bracket_positive(f, guess, /*increasing=*/true, lo, hi);
  return solvers::newton_root(f, [](double x) { return trigamma(x); }, lo, hi);
}

double inv_trigamma(double y) {
  if (!(y > 0.0)) throw std::domain_error("inv_trigamma: argument must be > 0");
  // From psi_1(x) ~ 1/x + 1/(2x^2): positive root of 2x^2 y - 2x - 1 = 0.
  const double guess = (1.0 + std::sqrt(1.0 + 2.0 * y)) / (2.0 * y);
  auto f = [y](double x) { return trigamma(x) - y; };
  double lo, hi;
  solvers::expand_bracket_positive(f, guess, /*increasing=*/false, lo, hi);
  return solvers::newton_root(f, [](double x) { return tetragamma(x); }, lo, hi);
}

double gamma_p(double a, double x) {
  require_positive(a, "gamma_p");
  if (x < 0.0) throw std::domain_error("gamma_p: x must be >= 0");
  if (x == 0.0) return 0.0;
  const double log_prefactor = -x + a * std::log(x) - log_gamma(a);
  if (x < a + 1.0) {
    // Series for P(a, x).
    double ap = a;
    double del = 1.0 / a;
    double sum = del;
    for (int i = 0; i < 500; ++i) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::abs(del) < std::abs(sum) * 1e-16) {
        return sum * std::exp(log_prefactor);
      }
    }
    throw std::runtime_error("gamma_p: series did not converge");
  }
  // Lentz continued fraction for Q(a, x).
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) {
      return 1.0 - h * std::exp(log_prefactor);
    }
  }
  throw std::runtime_error("gamma_p: continued fraction did not converge");
}

}  // namespace oyldp::specfun
