#pragma once

// Gamma-family special functions on the positive half line. All routines are
// double precision; arguments outside the stated domain throw std::domain_error.

namespace oyldp::specfun {

// log Gamma(x), x > 0.
double log_gamma(double x);

// psi_0(x) = d/dx log Gamma(x), x > 0. Strictly increasing, range all of R.
double digamma(double x);

// psi_1(x), x > 0. Strictly decreasing, range (0, inf).
double trigamma(double x);

// psi_2(x), x > 0. Negative and strictly increasing on (0, inf).
double tetragamma(double x);

// Unique x > 0 with psi_0(x) = y. Defined for every real y.
double inv_digamma(double y);

// Unique x > 0 with psi_1(x) = y, y > 0.
double inv_trigamma(double y);

// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
// P(a, .) is the CDF of the Gamma(a, 1) distribution.
double gamma_p(double a, double x);

}  // namespace oyldp::specfun
