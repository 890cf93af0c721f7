#include "oyldp/rates.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "oyldp/solvers.hpp"
#include "oyldp/specfun.hpp"

namespace oyldp::rates {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Residuals of the grid-based rate_g / rate_h pipeline are grid-limited;
// closed-form identities elsewhere are held to 1e-9.
constexpr double kGridTolerance = 5e-3;

// Root of t xi + s (psi_0(mu) - psi_0(mu + xi)) = 0 over mu > 0; the function
// is strictly increasing from -inf to t xi, so the root is unique.
double solve_mu(const Shape& sh, double xi, double guess) {
  auto f = [&](double m) {
    return sh.t * xi + sh.s * (specfun::digamma(m) - specfun::digamma(m + xi));
  };
  auto fp = [&](double m) {
    return sh.s * (specfun::trigamma(m) - specfun::trigamma(m + xi));
  };
  double lo, hi;
  solvers::expand_bracket_positive(f, guess, /*increasing=*/true, lo, hi);
  return solvers::newton_root(f, fp, lo, hi);
}

// Lambda sampled on [0, Xi] with mu-continuation along the grid.
convex::SampledFunction lyapunov_table(Shape sh, double Xi, int n) {
  Eigen::ArrayXd v(n);
  v[0] = 0.0;
  double mu = free_energy_tilt(sh);
  for (int k = 1; k < n; ++k) {
    const double xi = Xi * k / (n - 1);
    mu = solve_mu(sh, xi, mu);
    v[k] = sh.t * (0.5 * xi * xi + xi * mu) -
           sh.s * (specfun::log_gamma(mu + xi) - specfun::log_gamma(mu));
  }
  return convex::SampledFunction(convex::GridSpec{0.0, Xi, n}, std::move(v));
}

// Smallest power-of-two multiple of 4 whose lyapunov slope reaches x_hi, so a
// conjugate over [0, Xi] has an interior maximizer for every x <= x_hi.
double required_xi_window(Shape sh, double x_hi) {
  double Xi = 4.0;
  for (int i = 0; i < 60; ++i) {
    if (lyapunov_derivative(sh, Xi) >= x_hi) return Xi;
    Xi *= 2.0;
  }
  throw std::runtime_error("rates: conjugate window would not close");
}

// Right-tail rate of shape sh tabulated on xg by conjugating a lyapunov table.
// Maxima attained at the xi = 0 end are the legitimate flat branch, so only
// the far end keeps its window flag.
convex::SampledFunction right_tail_table(Shape sh, const convex::GridSpec& xg,
                                         int conjugate_nodes) {
  const double Xi = required_xi_window(sh, xg.hi);
  const int n_xi = std::max(conjugate_nodes,
                            std::min(24000, static_cast<int>(std::ceil(Xi * 80.0))));
  auto table = convex::legendre_transform(lyapunov_table(sh, Xi, n_xi), xg);
  Eigen::ArrayXd vals = table.values();
  std::vector<std::uint8_t> flags = table.boundary_flags();
  for (int i = 0; i < xg.n; ++i) {
    if (vals[i] <= 0.0) flags[i] = 0;
  }
  return convex::SampledFunction(xg, std::move(vals), std::move(flags));
}

convex::SampledFunction closed_form_table(const convex::GridSpec& g,
                                          const std::function<double(double)>& fn) {
  Eigen::ArrayXd v(g.n);
  for (int i = 0; i < g.n; ++i) v[i] = fn(g.point(i));
  return convex::SampledFunction(g, std::move(v));
}

convex::SampledFunction g_profile(double a, Shape sh, double theta,
                                  const convex::GridSpec& out,
                                  const RateGridOptions& opts) {
  if (!(a >= 0.0 && a < sh.t)) {
    throw std::domain_error("rate_g: need 0 <= a < t");
  }
  const double tp = sh.t - a;
  const double rho_p = free_energy(Shape{sh.s, tp});
  const double pad = opts.pad;
  // The minimizer over y lives in [-theta tp, x - rho_p]: outside it both
  // pieces only grow.
  const double y_lo = -theta * tp - pad;
  const double y_hi = std::max(out.hi - rho_p, -theta * tp) + pad;
  const convex::GridSpec yg{y_lo, y_hi, opts.table_nodes};
  auto r_table = closed_form_table(
      yg, [&](double y) { return brownian_rate_r(tp, theta, y); });
  const convex::GridSpec fg{out.lo - y_hi - pad, out.hi - y_lo + pad, opts.table_nodes};
  auto j_table = right_tail_table(Shape{sh.s, tp}, fg, opts.conjugate_nodes);
  return convex::inf_convolution(j_table, r_table, out);
}

convex::SampledFunction h_profile(double u, double v, Shape sh, double theta,
                                  const convex::GridSpec& out,
                                  const RateGridOptions& opts) {
  if (!(u >= 0.0 && u <= sh.s)) throw std::domain_error("rate_h: need 0 <= u <= s");
  if (!(v >= 0.0 && v < sh.s)) throw std::domain_error("rate_h: need 0 <= v < s");
  const double pad = opts.pad;
  const double rho_j = free_energy(Shape{sh.s - v, sh.t});
  const double c_u = (u > 0.0) ? -u * specfun::digamma(theta) : 0.0;
  const double z0 = rho_j + c_u;  // where the inner convolution starts rising
  const double y1_lo = -theta * sh.t - pad;
  const double y1_hi = std::max(out.hi - z0, -theta * sh.t) + pad;
  const convex::GridSpec y1g{y1_lo, y1_hi, opts.table_nodes};
  auto r_table = closed_form_table(
      y1g, [&](double y) { return brownian_rate_r(sh.t, theta, y); });
  const convex::GridSpec mid{out.lo - y1_hi - pad, out.hi - y1_lo + pad,
                             opts.table_nodes};
  const double y2_lo = std::min(c_u, mid.lo - rho_j) - pad;
  const double y2_hi = std::max(c_u, mid.hi - rho_j) + pad;
  const convex::GridSpec y2g{y2_lo, y2_hi, opts.table_nodes};
  auto u_table = closed_form_table(
      y2g, [&](double y) { return stationary_rate_u(u, theta, y); });
  const convex::GridSpec fg{mid.lo - y2_hi - pad, mid.hi - y2_lo + pad,
                            opts.table_nodes};
  auto j_table = right_tail_table(Shape{sh.s - v, sh.t}, fg, opts.conjugate_nodes);
  auto inner = convex::inf_convolution(j_table, u_table, mid);
  return convex::inf_convolution(inner, r_table, out);
}

// A 5-node window whose center is exactly x, for single-point queries through
// the profile machinery.
convex::GridSpec point_window(double x) {
  return convex::GridSpec{x - 1e-3, x + 1e-3, 5};
}

}  // namespace

void validate(const Shape& sh) {
  if (!(sh.s > 0.0) || !(sh.t > 0.0)) {
    throw std::domain_error("Shape: s and t must be > 0");
  }
}

double free_energy_tilt(Shape sh) {
  validate(sh);
  return specfun::inv_trigamma(sh.t / sh.s);
}

double free_energy(Shape sh) {
  const double theta = free_energy_tilt(sh);
  return sh.t * theta - sh.s * specfun::digamma(theta);
}

double lyapunov(Shape sh, double xi) {
  validate(sh);
  if (xi == 0.0) return 0.0;
  if (xi < 0.0) return xi * free_energy(sh);
  const double mu = solve_mu(sh, xi, free_energy_tilt(sh));
  return sh.t * (0.5 * xi * xi + xi * mu) -
         sh.s * (specfun::log_gamma(mu + xi) - specfun::log_gamma(mu));
}

double lyapunov_derivative(Shape sh, double xi) {
  validate(sh);
  if (xi <= 0.0) return free_energy(sh);
  const double mu = solve_mu(sh, xi, free_energy_tilt(sh));
  return sh.t * (xi + mu) - sh.s * specfun::digamma(mu + xi);
}

double lyapunov_dual_form(Shape sh, double xi) {
  validate(sh);
  if (!(xi > 0.0)) throw std::domain_error("lyapunov_dual_form: need xi > 0");
  VariationalSpec spec;
  spec.h = [xi](double th) { return th * xi - 0.5 * xi * xi; };
  spec.g = [xi](double th) {
    return specfun::log_gamma(th - xi) - specfun::log_gamma(th);
  };
  spec.h_prime = [xi](double) { return xi; };
  spec.g_prime = [xi](double th) {
    return specfun::digamma(th - xi) - specfun::digamma(th);
  };
  spec.lo = xi;
  spec.hi = kInf;
  spec.x = sh.t;
  spec.y = sh.s;
  return solve_variational(spec).value;
}

double rate_function(Shape sh, double x) {
  validate(sh);
  const double rho = free_energy(sh);
  if (x < rho) return kInf;
  double Xi = required_xi_window(sh, x);
  for (int attempt = 0; attempt < 10; ++attempt) {
    auto m = solvers::golden_min(
        [&](double xi) { return lyapunov(sh, xi) - xi * x; }, 0.0, Xi,
        1e-12 * std::max(1.0, Xi));
    if (m.x < 0.9 * Xi) return std::max(0.0, -m.value);
    Xi *= 2.0;
  }
  throw std::runtime_error("rate_function: conjugate maximizer kept escaping");
}

double right_tail_rate(Shape sh, double x) {
  validate(sh);
  if (x <= free_energy(sh)) return 0.0;
  return rate_function(sh, x);
}

double stationary_rate_u(double s, double theta, double x) {
  if (!(s >= 0.0)) throw std::domain_error("stationary_rate_u: need s >= 0");
  if (!(theta > 0.0)) throw std::domain_error("stationary_rate_u: need theta > 0");
  if (s == 0.0) return (x > 0.0) ? theta * x : 0.0;
  if (x <= -s * specfun::digamma(theta)) return 0.0;
  const double m = specfun::inv_digamma(-x / s);
  return x * (theta - m) + s * (specfun::log_gamma(theta) - specfun::log_gamma(m));
}

double brownian_rate_r(double t, double theta, double x) {
  if (!(t > 0.0)) throw std::domain_error("brownian_rate_r: need t > 0");
  if (!(theta > 0.0)) throw std::domain_error("brownian_rate_r: need theta > 0");
  if (x <= -theta * t) return 0.0;
  const double z = x + theta * t;
  return 0.5 * z * z / t;
}

double dual_u_star(double s, double theta, double xi) {
  if (!(s >= 0.0)) throw std::domain_error("dual_u_star: need s >= 0");
  if (!(theta > 0.0)) throw std::domain_error("dual_u_star: need theta > 0");
  if (xi < 0.0 || xi >= theta) return kInf;
  if (s == 0.0 || xi == 0.0) return 0.0;
  return s * (specfun::log_gamma(theta - xi) - specfun::log_gamma(theta));
}

double dual_r_star(double t, double theta, double xi) {
  if (!(t > 0.0)) throw std::domain_error("dual_r_star: need t > 0");
  if (!(theta > 0.0)) throw std::domain_error("dual_r_star: need theta > 0");
  if (xi < 0.0) return kInf;
  return t * (0.5 * xi * xi - theta * xi);
}

double j_gue(double r) {
  if (!(r >= 0.0)) throw std::domain_error("j_gue: need r >= 0");
  if (r == 0.0) return 0.0;
  const double q = std::sqrt(r * (r + 2.0));
  return 2.0 * ((r + 1.0) * q - std::log(r + 1.0 + q));
}

VariationalResult solve_variational(const VariationalSpec& spec) {
  if (!(spec.x > 0.0) || !(spec.y > 0.0)) {
    throw std::invalid_argument("solve_variational: weights must be > 0");
  }
  if (!(spec.lo < spec.hi)) {
    throw std::invalid_argument("solve_variational: empty interval");
  }
  if (!spec.h || !spec.g) {
    throw std::invalid_argument("solve_variational: h and g are required");
  }
  const bool unbounded = !std::isfinite(spec.hi);

  auto fd_slope = [&](const std::function<double(double)>& fn, double th) {
    double e = 1e-6 * (1.0 + std::abs(th));
    e = std::min(e, 0.25 * (th - spec.lo));
    if (!unbounded) e = std::min(e, 0.25 * (spec.hi - th));
    return (fn(th + e) - fn(th - e)) / (2.0 * e);
  };

  // Monotonicity probes: h must rise, g must fall.
  const double probes[3] = {
      unbounded ? spec.lo + 0.5 : spec.lo + 0.25 * (spec.hi - spec.lo),
      unbounded ? spec.lo + 1.5 : spec.lo + 0.50 * (spec.hi - spec.lo),
      unbounded ? spec.lo + 4.5 : spec.lo + 0.75 * (spec.hi - spec.lo)};
  for (double p : probes) {
    if (!(fd_slope(spec.h, p) > 0.0)) {
      throw std::invalid_argument("solve_variational: h is not strictly increasing");
    }
    if (!(fd_slope(spec.g, p) < 0.0)) {
      throw std::invalid_argument("solve_variational: g is not strictly decreasing");
    }
  }

  // Unconstrained coordinate: theta(u) covers the open interval.
  auto theta_of = [&](double u) {
    return unbounded ? spec.lo + std::exp(u)
                     : spec.lo + (spec.hi - spec.lo) / (1.0 + std::exp(-u));
  };
  auto F = [&](double u) {
    const double th = theta_of(u);
    return spec.x * spec.h(th) + spec.y * spec.g(th);
  };

  // Downhill bracket in u.
  double a_u, b_u;
  {
    const double f_m = F(-1.0), f_0 = F(0.0), f_p = F(1.0);
    if (f_0 <= f_m && f_0 <= f_p) {
      a_u = -1.0;
      b_u = 1.0;
    } else {
      const double dir = (f_p < f_m) ? 1.0 : -1.0;
      double cur_u = dir;
      double cur_f = (dir > 0.0) ? f_p : f_m;
      double last_u = 0.0;
      double st = 1.0;
      bool found = false;
      for (int i = 0; i < solvers::kIterationBudget; ++i) {
        st *= 2.0;
        const double next_u = cur_u + dir * st;
        const double next_f = F(next_u);
        if (next_f >= cur_f) {
          a_u = std::min(last_u, next_u);
          b_u = std::max(last_u, next_u);
          found = true;
          break;
        }
        last_u = cur_u;
        cur_u = next_u;
        cur_f = next_f;
      }
      if (!found) {
        throw std::runtime_error("solve_variational: bracket failure, no interior minimum");
      }
    }
  }

  auto gm = solvers::golden_min(F, a_u, b_u, 1e-10);
  double th = theta_of(gm.x);
  double value = spec.x * spec.h(th) + spec.y * spec.g(th);

  // Newton polish on the first-order condition x h' + y g' = 0.
  auto hp = spec.h_prime ? spec.h_prime
                         : [&](double z) { return fd_slope(spec.h, z); };
  auto gp = spec.g_prime ? spec.g_prime
                         : [&](double z) { return fd_slope(spec.g, z); };
  auto phi = [&](double z) { return spec.x * hp(z) + spec.y * gp(z); };
  for (int i = 0; i < 8; ++i) {
    double e = 1e-7 * (1.0 + std::abs(th));
    e = std::min(e, 0.25 * (th - spec.lo));
    if (!unbounded) e = std::min(e, 0.25 * (spec.hi - th));
    if (!(e > 0.0)) break;
    const double p0 = phi(th);
    const double dp = (phi(th + e) - phi(th - e)) / (2.0 * e);
    if (!(dp > 0.0) || !std::isfinite(p0)) break;
    const double next = th - p0 / dp;
    if (!(next > spec.lo) || (!unbounded && !(next < spec.hi))) break;
    if (std::abs(next - th) <= 1e-14 * (1.0 + std::abs(th))) {
      th = next;
      break;
    }
    th = next;
  }
  const double polished = spec.x * spec.h(th) + spec.y * spec.g(th);
  if (std::isfinite(polished) && polished <= value) {
    value = polished;
  } else {
    th = theta_of(gm.x);
    value = spec.x * spec.h(th) + spec.y * spec.g(th);
  }
  return VariationalResult{th, value};
}

double rate_g(double a, Shape sh, double theta, double x, const RateGridOptions& opts) {
  validate(sh);
  if (!(theta > 0.0)) throw std::domain_error("rate_g: need theta > 0");
  return g_profile(a, sh, theta, point_window(x), opts).values()[2];
}

double rate_h(double u, double v, Shape sh, double theta, double x,
              const RateGridOptions& opts) {
  validate(sh);
  if (!(theta > 0.0)) throw std::domain_error("rate_h: need theta > 0");
  return h_profile(u, v, sh, theta, point_window(x), opts).values()[2];
}

VerificationReport verify_variational_identity(Shape sh, double theta,
                                               const convex::GridSpec& x_window,
                                               int a_points,
                                               const RateGridOptions& opts) {
  validate(sh);
  if (!(theta > 0.0)) {
    throw std::domain_error("verify_variational_identity: need theta > 0");
  }
  x_window.validate();
  if (a_points < 2) {
    throw std::invalid_argument("verify_variational_identity: need >= 2 a-points");
  }

  Eigen::ArrayXd closed(x_window.n);
  for (int i = 0; i < x_window.n; ++i) {
    closed[i] = stationary_rate_u(sh.s, theta, x_window.point(i));
  }

  Eigen::ArrayXd best = Eigen::ArrayXd::Constant(x_window.n, kInf);
  int tainted = 0;
  auto absorb = [&](const convex::SampledFunction& row) {
    for (int i = 0; i < x_window.n; ++i) {
      const double v = row.values()[i];
      if (v < best[i]) {
        best[i] = v;
        if (row.boundary_flags()[i] && v > 1e-9) ++tainted;
      }
    }
  };

  // The a-grids stop short of the open endpoints by t/50 and s/50.
  const double a_hi_g = sh.t * (1.0 - 1.0 / 50.0);
  for (int k = 0; k < a_points; ++k) {
    absorb(g_profile(a_hi_g * k / (a_points - 1), sh, theta, x_window, opts));
  }
  const double a_hi_h = sh.s * (1.0 - 1.0 / 50.0);
  for (int k = 0; k < a_points; ++k) {
    const double a = a_hi_h * k / (a_points - 1);
    absorb(h_profile(a, a, sh, theta, x_window, opts));
  }

  const double residual = (best - closed).abs().maxCoeff();

  VerificationReport rep;
  rep.title = "stationary variational identity";
  rep.provenance = {{"s", sh.s},
                    {"t", sh.t},
                    {"theta", theta},
                    {"a_points", a_points},
                    {"x_window", {{"lo", x_window.lo}, {"hi", x_window.hi}, {"n", x_window.n}}},
                    {"table_nodes", opts.table_nodes},
                    {"conjugate_nodes", opts.conjugate_nodes}};
  rep.provenance["x"] = std::vector<double>(x_window.n);
  rep.provenance["u_closed_form"] = std::vector<double>(x_window.n);
  rep.provenance["variational_min"] = std::vector<double>(x_window.n);
  for (int i = 0; i < x_window.n; ++i) {
    rep.provenance["x"][i] = x_window.point(i);
    rep.provenance["u_closed_form"][i] = closed[i];
    rep.provenance["variational_min"][i] = best[i];
  }
  rep.add("max_residual", residual, kGridTolerance, residual <= kGridTolerance);
  rep.add("window_limited_minima", tainted, 0.0, tainted == 0,
          "count of winning cells cut by a table window");
  return rep;
}

}  // namespace oyldp::rates
