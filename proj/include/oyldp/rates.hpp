#pragma once

#include <functional>
#include <limits>

#include "oyldp/convex.hpp"
#include "oyldp/report.hpp"

// Exact large-deviation quantities of the semi-discrete polymer with shape
// parameter (s, t): time-per-line horizon t over s units of lines. All rate
// functions are in the convention "P(X >= n x) ~ exp(-n I(x))".

namespace oyldp::rates {

struct Shape {
  double s = 1.0;
  double t = 1.0;
};

void validate(const Shape& sh);  // throws std::domain_error unless s, t > 0

// Law-of-large-numbers limit of (1/n) log Z: the minimum over theta > 0 of
// t theta - s psi_0(theta).
double free_energy(Shape sh);

// The minimizing tilt theta* = psi_1^{-1}(t / s).
double free_energy_tilt(Shape sh);

// Moment Lyapunov exponent: (1/n) log E[Z^xi] in the limit, finite and
// differentiable for every real xi; linear with slope free_energy for xi <= 0.
double lyapunov(Shape sh, double xi);

// Envelope-theorem derivative of lyapunov; equals free_energy at xi <= 0.
double lyapunov_derivative(Shape sh, double xi);

// Same value as lyapunov for xi > 0, computed through the dual minimization
// over tilts theta > xi (an independent code path, used for cross-checks).
double lyapunov_dual_form(Shape sh, double xi);

// Large-deviation rate of (1/n) log Z: +infinity below free_energy, the
// convex conjugate of lyapunov above it.
double rate_function(Shape sh, double x);

// Right-tail rate: zero up to free_energy, rate_function beyond it.
double right_tail_rate(Shape sh, double x);

// Stationary-boundary rate function U_s^theta (s >= 0, theta > 0): zero for
// x <= -s psi_0(theta), else x (theta - m) + s log(Gamma(theta)/Gamma(m)) with
// psi_0(m) = -x/s. At s = 0 it degenerates to theta x on x > 0.
double stationary_rate_u(double s, double theta, double x);

// Rate function of drifted Brownian motion B(t) - theta t at level x.
double brownian_rate_r(double t, double theta, double x);

// Convex conjugates of the two stationary pieces (closed forms).
double dual_u_star(double s, double theta, double xi);  // finite on [0, theta)
double dual_r_star(double t, double theta, double xi);  // finite on xi >= 0

// Right-tail rate of the scaled top GUE eigenvalue:
// 4 * integral_0^r sqrt(x (x + 2)) dx in closed form.
double j_gue(double r);

// Generic strictly convex variational problem
//   Lambda(x, y) = min over theta in (lo, hi) of x h(theta) + y g(theta)
// with h strictly increasing and g strictly decreasing (checked by finite
// differences at probe points). Derivatives are optional; finite differences
// are used when absent. hi may be +infinity.
struct VariationalSpec {
  std::function<double(double)> h;
  std::function<double(double)> g;
  std::function<double(double)> h_prime;  // optional
  std::function<double(double)> g_prime;  // optional
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  double x = 1.0;
  double y = 1.0;
};

struct VariationalResult {
  double minimizer;
  double value;
};

VariationalResult solve_variational(const VariationalSpec& spec);

// Grid resolution for the sampled-function pipeline behind rate_g / rate_h.
struct RateGridOptions {
  int conjugate_nodes = 1600;  // xi resolution of the right-tail conjugate table
  int table_nodes = 1600;      // x resolution of each sampled piece
  double pad = 0.5;            // window margin beyond the provably active region
};

// G_a = (Brownian piece over time a .. t) # (right-tail piece of shape
// (s, t-a)): infimal convolution of brownian_rate_r(t-a) with the right-tail
// rate of shape (s, t-a), evaluated at x through the sampled-function pipeline.
double rate_g(double a, Shape sh, double theta, double x,
              const RateGridOptions& opts = {});

// H_{u,v} = brownian_rate_r(t) # stationary_rate_u(u) # right-tail of
// (s - v, t); u in [0, s], v in [0, s).
double rate_h(double u, double v, Shape sh, double theta, double x,
              const RateGridOptions& opts = {});

// Checks the variational identity
//   U_s^theta(x) = min( inf_{0 <= a < t} G_a(x), inf_{0 <= a < s} H_{a,a}(x) )
// over the nodes of x_window, with a-grids of a_points nodes that stop short
// of the open endpoints by t/50 (respectively s/50).
VerificationReport verify_variational_identity(Shape sh, double theta,
                                               const convex::GridSpec& x_window,
                                               int a_points = 200,
                                               const RateGridOptions& opts = {});

}  // namespace oyldp::rates
