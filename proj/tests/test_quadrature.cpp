// Core numerics: adaptive quadrature, finite differences, jets, and the
// smooth test-function families.  Derived reference values are frozen here
// and cross-checked against independent elementary routes (closed forms or
// high-resolution trapezoid sums) rather than against the code under test.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <random>

#include "qhydro/errors.hpp"
#include "qhydro/numerics/finite_diff.hpp"
#include "qhydro/numerics/grid.hpp"
#include "qhydro/numerics/jet.hpp"
#include "qhydro/numerics/quadrature.hpp"
#include "qhydro/numerics/test_function.hpp"

using namespace qhydro;

namespace {
// Frozen: Gamma(1.5) = sqrt(pi)/2, 17 significant digits.
constexpr double kGammaThreeHalves = 0.88622692545275801;
}  // namespace

TEST_CASE("half-line integral of exp(-x) is 1") {
  auto r = integrate_half_line([](double x) { return std::exp(-x); });
  CHECK(r.converged);
  CHECK(std::fabs(r.value - 1.0) < 1e-10);
}

TEST_CASE("normalized planar Gaussian integrates to 1") {
  auto g = [](const Vec3& p) {
    return std::exp(-0.5 * (p.x() * p.x() + p.y() * p.y())) / (2.0 * kPi);
  };
  auto r = integrate_box(g, 2, Vec3(-8.5, -8.5, 0), Vec3(8.5, 8.5, 0));
  CHECK(r.converged);
  CHECK(std::fabs(r.value - 1.0) < 1e-8);
}

TEST_CASE("sqrt-weight exponential moment matches Gamma(3/2)") {
  auto r = integrate_half_line([](double x) { return std::sqrt(x) * std::exp(-x); });
  CHECK(std::fabs(r.value - kGammaThreeHalves) < 1e-10);
  CHECK(std::fabs(r.value - std::tgamma(1.5)) < 1e-10);

  // Independent trapezoid oracle on a truncated window (error ~ h^2 plus an
  // O(sqrt(h)) endpoint term from the sqrt kink, both far below 1e-6).
  const double L = 40.0;
  const int N = 2'000'000;
  const double h = L / N;
  double trap = 0.0;
  for (int i = 1; i < N; ++i) {
    const double x = i * h;
    trap += std::sqrt(x) * std::exp(-x);
  }
  trap *= h;
  CHECK(std::fabs(r.value - trap) < 1e-6);
}

TEST_CASE("real-line Gaussian and complex phase integrals") {
  auto g = integrate_real_line([](double x) { return std::exp(-x * x); });
  CHECK(std::fabs(g.value - std::sqrt(kPi)) < 1e-10);

  auto c = integrate_1d(
      [](double x) { return std::exp(std::complex<double>(0.0, x)); }, 0.0, 2.0 * kPi);
  CHECK(std::abs(c.value) < 1e-10);
}

TEST_CASE("quadrature is linear in the integrand") {
  std::mt19937 gen(12345);
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  for (int trial = 0; trial < 5; ++trial) {
    const double a = coef(gen), b = coef(gen), w1 = coef(gen), w2 = coef(gen);
    auto f = [a](double x) { return std::sin(a * x) + x * x; };
    auto g = [b](double x) { return std::cos(b * x) * std::exp(-0.1 * x * x); };
    auto combo = [&](double x) { return w1 * f(x) + w2 * g(x); };
    const double lhs = integrate_1d(combo, -3.0, 5.0).value;
    const double rhs =
        w1 * integrate_1d(f, -3.0, 5.0).value + w2 * integrate_1d(g, -3.0, 5.0).value;
    CHECK(std::fabs(lhs - rhs) < 1e-9);
  }
}

TEST_CASE("non-finite samples raise and tight budgets report non-convergence") {
  try {
    integrate_1d([](double) { return std::numeric_limits<double>::quiet_NaN(); }, 0.0,
                 1.0);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == "NonFinite");
  }

  QuadratureConfig tight;
  tight.max_subdivisions = 1;
  tight.abs_tol = 1e-15;
  tight.rel_tol = 1e-15;
  auto r = integrate_1d([](double x) { return std::sin(50.0 * x * x); }, 0.0, 6.0, tight);
  CHECK_FALSE(r.converged);
  CHECK(std::isfinite(r.value));
}

TEST_CASE("excluded regions are removed exactly") {
  auto one = [](const Vec3&) { return 1.0; };

  GridSpec d2 = make_grid_2d(-1.0, 1.0, 16);
  d2.excluded.push_back(ball_region(Vec3::Zero(), 0.5));
  auto r2 = integrate_region(one, d2);
  CHECK(std::fabs(r2.value - (4.0 - kPi * 0.25)) < 1e-6);

  GridSpec d3 = make_grid_3d(-1.0, 1.0, 8);
  d3.excluded.push_back(ball_region(Vec3::Zero(), 0.5));
  auto r3 = integrate_region(one, d3);
  CHECK(std::fabs(r3.value - (8.0 - 4.0 / 3.0 * kPi * 0.125)) < 1e-5);

  GridSpec d3c = make_grid_3d(-1.0, 1.0, 8);
  d3c.excluded.push_back(cylinder_region(0.5));
  auto r3c = integrate_region(one, d3c);
  CHECK(std::fabs(r3c.value - (8.0 - kPi * 0.25 * 2.0)) < 1e-6);
}

TEST_CASE("finite differences: gradient, order, and singular-set guard") {
  auto f = [](const Vec3& p) { return p.x() * p.x() + p.y() * p.y(); };
  FdConfig c;
  c.step = 1e-4;
  const Vec3 g = fd_gradient(f, Vec3(1.0, 2.0, 0.0), c);
  CHECK(std::fabs(g.x() - 2.0) < 1e-6);
  CHECK(std::fabs(g.y() - 4.0) < 1e-6);
  CHECK(std::fabs(g.z()) < 1e-6);

  auto k = [](const Vec3&) { return 3.7; };
  CHECK(fd_gradient(k, Vec3(0.2, -1.0, 4.0), c).norm() < 1e-10);

  // Convergence order >= 1.9 on a smooth field (log-log slope).
  auto s = [](const Vec3& p) { return std::sin(p.x() + 2.0 * p.y()); };
  const Vec3 p0(0.3, -0.2, 0.0);
  const Vec3 exact(std::cos(p0.x() + 2.0 * p0.y()),
                   2.0 * std::cos(p0.x() + 2.0 * p0.y()), 0.0);
  double err[2];
  const double steps[2] = {1e-2, 1e-3};
  for (int i = 0; i < 2; ++i) {
    FdConfig cc;
    cc.step = steps[i];
    err[i] = (fd_gradient(s, p0, cc) - exact).norm();
  }
  const double slope = std::log(err[0] / err[1]) / std::log(steps[0] / steps[1]);
  CHECK(slope > 1.9);

  try {
    ensure_stencil_clear(Vec3(0.01, 0.0, 1.0), 0.02, SingularSet::AxisZ, 1e-3);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == "StencilTouchesSingularSet");
  }
  CHECK_NOTHROW(ensure_stencil_clear(Vec3(1.0, 0.0, 1.0), 0.02, SingularSet::AxisZ, 1e-3));
}

TEST_CASE("order-3 jets reproduce calculus") {
  const Jet3 x = Jet3::variable(0.7);
  const Jet3 e = jet_exp(x * x);  // exp(x^2)
  const double v = std::exp(0.49);
  CHECK(std::fabs(e.f - v) < 1e-12);
  CHECK(std::fabs(e.f1 - 2.0 * 0.7 * v) < 1e-12);
  CHECK(std::fabs(e.f2 - (2.0 + 4.0 * 0.49) * v) < 1e-12);
  CHECK(std::fabs(e.f3 - (12.0 * 0.7 + 8.0 * 0.7 * 0.49) * v) < 1e-11);

  const Jet3 q = jet_sin(x) / jet_cos(x);  // tan
  const double t = std::tan(0.7), sec2 = 1.0 + t * t;
  CHECK(std::fabs(q.f - t) < 1e-12);
  CHECK(std::fabs(q.f1 - sec2) < 1e-12);
  CHECK(std::fabs(q.f2 - 2.0 * t * sec2) < 1e-11);
  CHECK(std::fabs(q.f3 - (2.0 * sec2 * sec2 + 4.0 * t * t * sec2)) < 1e-10);

  const Jet3 p = jet_pow(x, 2.5);
  CHECK(std::fabs(p.f1 - 2.5 * std::pow(0.7, 1.5)) < 1e-12);
  CHECK(std::fabs(p.f3 - 2.5 * 1.5 * 0.5 * std::pow(0.7, -0.5)) < 1e-12);
}

TEST_CASE("mollifiers: unit integral, compact support, delta-like pairing") {
  for (double eps : {1.0, 0.1, 0.01}) {
    auto m1 = make_mollifier(Vec3::Zero(), eps, 1);
    auto r1 = integrate_1d([&m1](double x) { return m1.value(Vec3(x, 0, 0)); },
                           -eps, eps);
    CHECK(std::fabs(r1.value - 1.0) < 1e-8);
  }
  for (double eps : {1.0, 0.1}) {
    auto m2 = make_mollifier(Vec3::Zero(), eps, 2);
    auto r2 = integrate_box([&m2](const Vec3& p) { return m2.value(p); }, 2,
                            Vec3(-eps, -eps, 0), Vec3(eps, eps, 0));
    CHECK(std::fabs(r2.value - 1.0) < 1e-8);
    auto m3 = make_mollifier(Vec3::Zero(), eps, 3);
    auto r3 = integrate_box([&m3](const Vec3& p) { return m3.value(p); }, 3,
                            Vec3(-eps, -eps, -eps), Vec3(eps, eps, eps));
    CHECK(std::fabs(r3.value - 1.0) < 1e-7);
  }

  auto m = make_mollifier(Vec3(0.5, 0, 0), 0.25, 1);
  CHECK(m.value(Vec3(0.76, 0, 0)) == 0.0);
  CHECK(m.value(Vec3(-1.0, 0, 0)) == 0.0);

  // Pairing against cos concentrates to cos(0) = 1.
  auto fine = make_mollifier(Vec3::Zero(), 1e-2, 1);
  auto pair = integrate_1d(
      [&fine](double x) { return fine.value(Vec3(x, 0, 0)) * std::cos(x); }, -1e-2, 1e-2);
  CHECK(std::fabs(pair.value - 1.0) < 1e-3);
}

TEST_CASE("decreasing bump family shrinks monotonically") {
  for (int k : {1, 5, 20})
    CHECK(make_decreasing_bump_sequence(k).value(Vec3::Zero()) == doctest::Approx(1.0));

  auto z1 = make_decreasing_bump_sequence(1);
  auto z5 = make_decreasing_bump_sequence(5);
  std::mt19937 gen(12345);
  std::uniform_real_distribution<double> xs(-1.2, 1.2);
  for (int i = 0; i < 100; ++i) {
    const Vec3 p(xs(gen), 0, 0);
    CHECK(z5.value(p) <= z1.value(p) + 1e-15);
    CHECK(z5.value(p) >= 0.0);
  }

  auto mass = [](const TestFunction& z) {
    return integrate_1d([&z](double x) { return z.value(Vec3(x, 0, 0)); }, -1.0, 1.0)
        .value;
  };
  CHECK(mass(make_decreasing_bump_sequence(50)) < 0.1 * mass(z1));
}

TEST_CASE("test-function derivatives match finite differences") {
  std::mt19937 gen(12345);
  std::uniform_real_distribution<double> un(-0.8, 0.8);

  auto check_tf = [&](const TestFunction& tf, auto sample_point, int count) {
    FdConfig c;
    c.step = 1e-4;
    c.order = 4;
    for (int i = 0; i < count; ++i) {
      const Vec3 p = sample_point();
      const Vec3 g = fd_gradient(tf.value, p, c);
      CHECK((g - tf.gradient(p)).norm() < 1e-6);
      const double lap = fd_laplacian_dim(tf.value, p, tf.dimension, c);
      CHECK(std::fabs(lap - tf.hessian_trace(p)) < 1e-6);
    }
  };

  auto bump2 = make_bump(Vec3(0.2, -0.1, 0), 1.5, 2);
  check_tf(bump2, [&] { return Vec3(0.2 + un(gen), -0.1 + un(gen), 0); }, 10);

  auto moll3 = make_mollifier(Vec3::Zero(), 2.0, 3);
  check_tf(moll3, [&] { return Vec3(un(gen), un(gen), un(gen)); }, 10);

  auto ring = make_ring_bump_2d(2.0, 0.8);
  check_tf(ring, [&] { return Vec3(2.0 + 0.6 * un(gen), 0.6 * un(gen), 0); }, 10);

  auto tube = make_tube_bump_3d(2.0, 0.8, 1.0);
  check_tf(tube, [&] { return Vec3(2.0 + 0.6 * un(gen), 0.5 * un(gen), 0.7 * un(gen)); },
           10);

  auto gauss = make_gaussian_test(Vec3(0.5, 0, 0), 1.2, 3);
  check_tf(gauss, [&] { return Vec3(0.5 + un(gen), un(gen), un(gen)); }, 10);

  // Vector assembly: divergence and curl agree with stencils.
  auto vt = make_vector_test(bump2, make_bump(Vec3(0, 0.3, 0), 1.2, 2),
                             TestFunction::zero(2));
  FdConfig c;
  c.step = 1e-4;
  c.order = 4;
  for (int i = 0; i < 10; ++i) {
    const Vec3 p(0.3 * un(gen), 0.3 * un(gen), 0);
    CHECK(std::fabs(fd_divergence(vt.value, p, c) - vt.divergence(p)) < 1e-6);
    CHECK((fd_curl(vt.value, p, c) - vt.curl(p)).norm() < 1e-6);
  }
}
