#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <vector>

#include "oyldp/convex.hpp"

using namespace oyldp::convex;
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

SampledFunction sample(const GridSpec& g, const std::function<double(double)>& fn) {
  Eigen::ArrayXd v(g.n);
  for (int i = 0; i < g.n; ++i) v[i] = fn(g.point(i));
  return SampledFunction(g, std::move(v));
}

// Test-side lower convex envelope of the sampled points (monotone chain),
// evaluated by interpolation between hull vertices.
double hull_value(const SampledFunction& f, double x) {
  std::vector<std::pair<double, double>> hull;
  for (int i = 0; i < f.grid().n; ++i) {
    const double xi = f.grid().point(i), yi = f.values()[i];
    if (yi == kInf) continue;
    while (hull.size() >= 2) {
      const auto& [x1, y1] = hull[hull.size() - 2];
      const auto& [x2, y2] = hull[hull.size() - 1];
      if ((x2 - x1) * (yi - y1) - (y2 - y1) * (xi - x1) <= 0.0) {
        hull.pop_back();
      } else {
        break;
      }
    }
    hull.emplace_back(xi, yi);
  }
  for (size_t i = 0; i + 1 < hull.size(); ++i) {
    if (x >= hull[i].first && x <= hull[i + 1].first) {
      const double t = (x - hull[i].first) / (hull[i + 1].first - hull[i].first);
      return hull[i].second + t * (hull[i + 1].second - hull[i].second);
    }
  }
  return kInf;
}

}  // namespace

TEST_CASE("construction enforces the grid and sentinel invariants") {
  GridSpec g{0.0, 1.0, 5};
  Eigen::ArrayXd v(5);
  v << kInf, 1.0, 2.0, kInf, 3.0;  // finite region not contiguous
  CHECK_THROWS_AS(SampledFunction(g, v), std::invalid_argument);
  v << 1.0, std::nan(""), 2.0, 3.0, 4.0;
  CHECK_THROWS_AS(SampledFunction(g, v), std::invalid_argument);
  v << 1.0, -kInf, 2.0, 3.0, 4.0;
  CHECK_THROWS_AS(SampledFunction(g, v), std::invalid_argument);
  CHECK_THROWS_AS(GridSpec({1.0, 0.0, 5}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(GridSpec({0.0, 1.0, 1}).validate(), std::invalid_argument);
  v << kInf, 1.0, 2.0, 3.0, kInf;
  SampledFunction f(g, v);
  CHECK(f.first_finite() == 1);
  CHECK(f.last_finite() == 3);
}

TEST_CASE("interpolation saturates next to the sentinel") {
  GridSpec g{0.0, 4.0, 5};
  Eigen::ArrayXd v(5);
  v << kInf, 1.0, 3.0, 7.0, kInf;
  SampledFunction f(g, v);
  CHECK(f(1.0) == 1.0);
  CHECK(f(1.5) == doctest::Approx(2.0));
  CHECK(f(0.5) == kInf);   // cell with an infinite endpoint
  CHECK(f(3.5) == kInf);
  CHECK(f(-1.0) == kInf);  // outside the grid
  CHECK(f(5.0) == kInf);
  CHECK(f(4.0) == kInf);   // on an infinite node
}

TEST_CASE("conjugate of quadratics is the dual quadratic, exact over nodes") {
  for (double a : {0.5, 1.0, 2.7}) {
    GridSpec g{-30.0, 30.0, 6001};
    auto f = sample(g, [a](double x) { return 0.5 * a * x * x; });
    GridSpec dual{-3.0, 3.0, 601};
    auto fstar = legendre_transform(f, dual);
    for (int k = 0; k < dual.n; ++k) {
      const double p = dual.point(k);
      CHECK(std::abs(fstar.values()[k] - 0.5 * p * p / a) < 1e-4);
      CHECK(fstar.values()[k] <= 0.5 * p * p / a + 1e-15);  // grid max underestimates
      CHECK(!fstar.boundary_flags()[k]);
    }
    CHECK(fstar.convexity_defect() <= 1e-12);
  }
}

TEST_CASE("conjugate of an interval indicator is the support function") {
  GridSpec g{-2.0, 2.0, 401};
  auto f = sample(g, [](double x) { return (std::abs(x) <= 1.0) ? 0.0 : kInf; });
  GridSpec dual{-5.0, 5.0, 201};
  auto fstar = legendre_transform(f, dual);
  for (int k = 0; k < dual.n; ++k) {
    CHECK(std::abs(fstar.values()[k] - std::abs(dual.point(k))) < 1e-12);
  }
}

TEST_CASE("legendre transform flags window-limited values") {
  // Slopes of x^2/2 on [-1,1] live in [-1,1]; beyond that the grid endpoint wins.
  GridSpec g{-1.0, 1.0, 201};
  auto f = sample(g, [](double x) { return 0.5 * x * x; });
  auto fstar = legendre_transform(f, GridSpec{-3.0, 3.0, 61});
  for (int k = 0; k < 61; ++k) {
    const double p = fstar.grid().point(k);
    if (std::abs(p) > 1.05) CHECK(fstar.boundary_flags()[k]);
    if (std::abs(p) < 0.95) CHECK(!fstar.boundary_flags()[k]);
  }
}

TEST_CASE("empty domain throws") {
  GridSpec g{0.0, 1.0, 4};
  Eigen::ArrayXd v = Eigen::ArrayXd::Constant(4, kInf);
  SampledFunction f(g, v);
  CHECK(f.empty_domain());
  CHECK_THROWS_AS(legendre_transform(f, GridSpec{-1.0, 1.0, 11}), std::domain_error);
  auto ok = sample(g, [](double x) { return x; });
  CHECK_THROWS_AS(inf_convolution(f, ok, GridSpec{0.0, 1.0, 5}), std::domain_error);
  CHECK_THROWS_AS(inf_convolution(ok, f, GridSpec{0.0, 1.0, 5}), std::domain_error);
}

TEST_CASE("inf-convolution of quadratics adds the curvature reciprocals") {
  const double a = 1.3, b = 0.6;
  GridSpec gf{-12.0, 12.0, 2401}, gg{-12.0, 12.0, 2401};
  auto f = sample(gf, [a](double x) { return 0.5 * x * x / a; });
  auto g = sample(gg, [b](double x) { return 0.5 * x * x / b; });
  auto h = inf_convolution(f, g, GridSpec{-3.0, 3.0, 121});
  for (int k = 0; k < h.grid().n; ++k) {
    const double x = h.grid().point(k);
    CHECK(std::abs(h.values()[k] - 0.5 * x * x / (a + b)) < 5e-4);
  }
  CHECK(h.convexity_defect() <= 1e-10);
}

TEST_CASE("point indicator is the identity for inf-convolution") {
  GridSpec gf{-2.0, 2.0, 401};
  auto f = sample(gf, [](double x) { return std::cos(3.0 * x) + x * x; });
  GridSpec gg{-0.01, 0.01, 3};
  Eigen::ArrayXd gv(3);
  gv << kInf, 0.0, kInf;
  SampledFunction delta(gg, gv);
  auto h = inf_convolution(f, delta, GridSpec{-1.0, 1.0, 201});
  for (int k = 0; k < h.grid().n; ++k) {
    const double x = h.grid().point(k);
    CHECK(std::abs(h.values()[k] - f(x)) < 1e-12);
  }
}

TEST_CASE("inf-convolution against a brute-force fine-grid oracle") {
  GridSpec gf{-1.0, 2.0, 301}, gg{-2.0, 1.0, 301};
  auto ffn = [](double x) { return (x - 0.3) * (x - 0.3); };
  auto gfn = [](double y) { return std::exp(y); };
  auto f = sample(gf, ffn);
  auto g = sample(gg, gfn);
  GridSpec out{-2.5, 2.5, 101};
  auto h = inf_convolution(f, g, out);
  for (int k = 0; k < out.n; ++k) {
    const double x = out.point(k);
    double best = kInf;
    for (int j = 0; j <= 3000; ++j) {  // 10x finer scan of the closed forms
      const double y = -2.0 + 3.0 * j / 3000.0;
      const double arg = x - y;
      if (arg < -1.0 || arg > 2.0) continue;
      best = std::min(best, ffn(arg) + gfn(y));
    }
    if (best == kInf) {
      CHECK(h.values()[k] == kInf);
    } else {
      CHECK(std::abs(h.values()[k] - best) < 5e-3);
    }
  }
}

TEST_CASE("inf-convolution window compatibility") {
  GridSpec gf{0.0, 1.0, 51}, gg{0.0, 1.0, 51};
  auto f = sample(gf, [](double x) { return x; });
  auto g = sample(gg, [](double x) { return x * x; });
  CHECK_THROWS_AS(inf_convolution(f, g, GridSpec{5.0, 6.0, 11}), std::invalid_argument);
  CHECK_THROWS_AS(inf_convolution(f, g, GridSpec{-4.0, -3.0, 11}), std::invalid_argument);
  auto h = inf_convolution(f, g, GridSpec{-1.0, 3.0, 41});  // partial overlap is fine
  CHECK(h.values()[0] == kInf);
  CHECK(std::isfinite(h.values()[20]));
}

TEST_CASE("Fenchel-Young inequality and order reversal") {
  GridSpec g{-6.0, 6.0, 1201};
  auto f = sample(g, [](double x) { return std::abs(x) + 0.1 * x * x; });
  GridSpec dual{-2.0, 2.0, 401};
  auto fstar = legendre_transform(f, dual);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ux(-6.0, 6.0), up(-2.0, 2.0);
  for (int i = 0; i < 500; ++i) {
    const double x = ux(rng), p = up(rng);
    CHECK(f(x) + fstar(p) >= x * p - 1e-9);
  }
  auto f2 = sample(g, [](double x) { return std::abs(x) + 0.1 * x * x + 0.5; });
  auto f2star = legendre_transform(f2, dual);
  for (int k = 0; k < dual.n; ++k) {
    CHECK(f2star.values()[k] <= fstar.values()[k] + 1e-12);  // f2 >= f pointwise
  }
}

TEST_CASE("conjugate of an inf-convolution is the sum of conjugates") {
  GridSpec gf{-10.0, 10.0, 2001}, gg{-10.0, 10.0, 2001};
  auto f = sample(gf, [](double x) { return 0.5 * x * x; });
  auto g = sample(gg, [](double x) { return std::abs(x); });
  auto h = inf_convolution(f, g, GridSpec{-8.0, 8.0, 1601});
  GridSpec dual{-0.9, 0.9, 181};
  auto hstar = legendre_transform(h, dual);
  auto fstar = legendre_transform(f, dual);
  auto gstar = legendre_transform(g, dual);
  for (int k = 0; k < dual.n; ++k) {
    CHECK(std::abs(hstar.values()[k] - (fstar.values()[k] + gstar.values()[k])) < 2e-3);
  }
}

TEST_CASE("biconjugate restores convex functions and builds hulls") {
  GridSpec g{-5.0, 5.0, 1001};
  auto f = sample(g, [](double x) { return std::abs(x); });
  auto fbi = biconjugate(f);
  for (int i = 0; i < g.n; ++i) {
    CHECK(std::abs(fbi.values()[i] - std::abs(g.point(i))) < 1e-6);
  }
  // Double well: the biconjugate is the lower convex envelope.
  GridSpec gw{-2.0, 4.0, 1201};
  auto w = sample(gw, [](double x) {
    return std::min(x * x, (x - 2.0) * (x - 2.0) + 1.0);
  });
  auto wbi = biconjugate(w);
  CHECK(wbi.convexity_defect() <= 1e-10);
  for (int i = 0; i < gw.n; ++i) {
    const double xv = gw.point(i);
    CHECK(std::abs(wbi.values()[i] - hull_value(w, xv)) < 5e-3);
    CHECK(wbi.values()[i] <= w.values()[i] + 1e-9);
  }
}

TEST_CASE("csv serialization with the inf sentinel") {
  GridSpec g{-1.0, 1.0, 5};
  Eigen::ArrayXd v(5);
  v << kInf, 0.25, 1.0 / 3.0, 0.125, kInf;
  SampledFunction f(g, v);
  std::stringstream ss;
  f.write_csv(ss);
  CHECK(ss.str().find("inf") != std::string::npos);
  auto back = SampledFunction::read_csv(ss);
  CHECK(back.grid().n == 5);
  for (int i = 0; i < 5; ++i) {
    if (v[i] == kInf) {
      CHECK(back.values()[i] == kInf);
    } else {
      CHECK(back.values()[i] == v[i]);  // 17 digits: bit-exact round trip
    }
  }
  std::stringstream bad("no header\n0,1\n");
  CHECK_THROWS_AS(SampledFunction::read_csv(bad), std::invalid_argument);
}
