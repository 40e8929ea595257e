#include <doctest.h>

#include <cmath>

#include "rmest/errors.hpp"
#include "rmest/weights.hpp"
#include "support.hpp"

using namespace rmest;
using testing::Generator;

namespace {

double tyler_u(double k, double t, double x) { return k * (1 + t) / (t + x); }
double huber_u(double k, double t, double x) { return k * std::min(1.0, (1 + t) / (t + x)); }

WeightFunction random_weight(Generator& g) {
  const double k = g.log_uniform(0.05, 5.0);
  const double t = g.log_uniform(0.01, 2.0);
  return g.uniform(0, 1) < 0.5 ? WeightFunction::tyler(k, t) : WeightFunction::huber(k, t);
}

// An admissible (rho, c) for w.
RegularizedContext random_context(Generator& g, const WeightFunction& w) {
  const double c = g.log_uniform(0.05, 4.0);
  const double lo = minimal_rho(w, c);
  const double rho = lo + (1.0 - lo) * g.uniform(0.02, 1.0);
  return {w, rho, c};
}

}  // namespace

TEST_CASE("weights: closed forms") {
  const auto ty = WeightFunction::tyler(0.7, 0.1);
  const auto hu = WeightFunction::huber(0.7, 0.1);
  for (double x : {0.0, 0.3, 1.0, 2.5, 40.0}) {
    CHECK(ty.u(x) == doctest::Approx(tyler_u(0.7, 0.1, x)).epsilon(1e-15));
    CHECK(hu.u(x) == doctest::Approx(huber_u(0.7, 0.1, x)).epsilon(1e-15));
    CHECK(ty.phi(x) == doctest::Approx(x * tyler_u(0.7, 0.1, x)).epsilon(1e-15));
  }
  CHECK(ty.phi_infinity() == doctest::Approx(0.77));
  CHECK(hu.u(0.5) == doctest::Approx(0.7));
  CHECK(minimal_rho(ty, 1.5) == doctest::Approx(1.0 - 1.0 / (1.5 * 0.77)));
  CHECK(minimal_rho(ty, 0.5) == 0.0);
}

TEST_CASE("weights: invalid parameters") {
  CHECK_THROWS_AS(WeightFunction::tyler(0.0, 0.1), DomainError);
  CHECK_THROWS_AS(WeightFunction::tyler(1.0, -0.1), DomainError);
  CHECK_THROWS_AS(WeightFunction::tyler(1.0, 0.1).phi_inverse(1.1), DomainError);
  const auto w = WeightFunction::tyler(1.0, 0.1);
  CHECK_THROWS_AS(RegularizedContext(w, 1.5, 1.0), DomainError);
  CHECK_THROWS_AS(RegularizedContext(w, 0.5, 0.0), DomainError);
  CHECK_THROWS_AS(RegularizedContext(w, 0.0, 1.0), AdmissibilityError);
  CHECK_NOTHROW(RegularizedContext(w, 0.0, 0.5));
}

TEST_CASE("weights: phi round trip and monotonicity on random grids") {
  Generator g(11);
  for (int i = 0; i < 1000; ++i) {
    const WeightFunction w = random_weight(g);
    const double x = g.log_uniform(1e-4, 1e3);
    const double y = w.phi(x);
    CHECK(w.phi_inverse(y) == doctest::Approx(x).epsilon(1e-10));
    const double x2 = x * (1.0 + g.uniform(1e-3, 1.0));
    CHECK(w.phi(x2) > y);
    CHECK(w.u(x2) <= w.u(x));
    CHECK(y < w.phi_infinity());
  }
}

TEST_CASE("weights: g round trip, g(x) >= x, v nonincreasing") {
  Generator g(12);
  for (int i = 0; i < 1000; ++i) {
    const WeightFunction w = random_weight(g);
    const RegularizedContext ctx = random_context(g, w);
    const double x = g.log_uniform(1e-3, 1e2);
    const double gx = ctx.g(x);
    CHECK(gx >= x);
    CHECK(ctx.g_inverse(gx) == doctest::Approx(x).epsilon(1e-10));
    const double x2 = x * (1.0 + g.uniform(1e-3, 1.0));
    CHECK(ctx.g(x2) > gx);
    CHECK(ctx.v(x2) <= ctx.v(x) * (1 + 1e-14));
    CHECK(ctx.v(gx) == doctest::Approx(w.u(x)).epsilon(1e-10));
  }
}

TEST_CASE("weights: rho = 1 degenerates to g = id, v = u") {
  Generator g(13);
  for (int i = 0; i < 1000; ++i) {
    const WeightFunction w = random_weight(g);
    const RegularizedContext ctx(w, 1.0, g.log_uniform(0.05, 10.0));
    const double x = g.log_uniform(1e-3, 1e2);
    CHECK(ctx.g(x) == x);
    CHECK(ctx.g_inverse(x) == doctest::Approx(x).epsilon(1e-14));
    CHECK(ctx.v(x) == doctest::Approx(w.u(x)).epsilon(1e-13));
    CHECK(ctx.v_approximate(x) == doctest::Approx(w.u(x)).epsilon(1e-14));
  }
}

TEST_CASE("weights: v derivative against central differences") {
  Generator g(14);
  int checked = 0;
  for (int i = 0; i < 1000; ++i) {
    const WeightFunction w = random_weight(g);
    const RegularizedContext ctx = random_context(g, w);
    const double x = g.log_uniform(1e-2, 50.0);
    const double h = 1e-5 * x;
    if (w.has_kink()) {
      const double kink_exact = ctx.v_kink(DerivativeMode::Exact);
      const double kink_approx = ctx.v_kink(DerivativeMode::Approximate);
      if (std::abs(x - kink_exact) < 1e3 * h || std::abs(x - kink_approx) < 1e3 * h) continue;
    }
    const double fd_exact = testing::central_difference([&](double s) { return ctx.v(s); }, x, h);
    const double fd_approx =
        testing::central_difference([&](double s) { return ctx.v_approximate(s); }, x, h);
    const double d_exact = ctx.v_derivative(x, DerivativeMode::Exact);
    const double d_approx = ctx.v_derivative(x, DerivativeMode::Approximate);
    const double scale = std::max(std::abs(fd_exact), 1e-8 * ctx.v(x) / x);
    CHECK(std::abs(d_exact - fd_exact) <= 1e-5 * scale);
    CHECK(std::abs(d_approx - fd_approx) <= 1e-5 * std::max(std::abs(fd_approx), 1e-8));
    ++checked;
  }
  CHECK(checked > 900);
}

TEST_CASE("weights: Huber kink") {
  const auto w = WeightFunction::huber(0.8, 0.1);
  const RegularizedContext ctx(w, 0.3, 0.9);
  CHECK_THROWS_AS(w.u_derivative(1.0), KinkError);
  CHECK(w.u_derivative(1.0, Side::Left) == 0.0);
  CHECK(w.u_derivative(1.0, Side::Right) == doctest::Approx(-0.8 / 1.1));
  const double kink = ctx.v_kink(DerivativeMode::Exact);
  CHECK(kink == doctest::Approx(ctx.g(1.0)));
  CHECK_THROWS_AS(ctx.v_derivative(kink, DerivativeMode::Exact), KinkError);
  CHECK(ctx.v_derivative(kink, DerivativeMode::Exact, Side::Left) == 0.0);
  CHECK(ctx.v_derivative(kink, DerivativeMode::Exact, Side::Right) < 0.0);
  // Below the kink v is flat at K.
  CHECK(ctx.v(0.5 * kink) == doctest::Approx(0.8));
}

TEST_CASE("weights: small-t v tracks the exact v") {
  const auto w = WeightFunction::tyler(1.0 / 1.5, 1e-4);
  const RegularizedContext ctx(w, 0.4, 1.5);
  for (double x : {0.5, 1.0, 2.0, 5.0}) {
    CHECK(ctx.v_approximate(x) == doctest::Approx(ctx.v(x)).epsilon(1e-3));
  }
}
