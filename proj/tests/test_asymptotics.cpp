#include <doctest.h>

#include "rmest/asymptotics.hpp"
#include "rmest/errors.hpp"
#include "rmest/estimators.hpp"
#include "support.hpp"

using namespace rmest;

namespace {

Matrix regularized_b(const RegularizedContext& ctx, double eps, const Matrix& c, const Matrix& d,
                     double gamma, double alpha) {
  const double rho = ctx.rho();
  const auto k = [&](double x) {
    return ctx.v(x) / (1.0 + (1.0 - rho) * ctx.c() * x * ctx.v(x));
  };
  Matrix b = (1.0 - rho) * (1.0 - eps) * k(gamma) * c + (1.0 - rho) * eps * k(alpha) * d;
  b.diagonal().array() += rho;
  return b;
}

// Independent gamma: bisection on gamma - (1/N) tr C (b C + rho I)^{-1} with explicit inverses.
double oracle_gamma(const RegularizedContext& ctx, const Matrix& c) {
  const auto f = [&](double g) {
    const Matrix b = regularized_b(ctx, 0.0, c, c, g, g);
    return g - testing::ntrace(c * b.inverse());
  };
  return testing::bisect(f, 1e-8, 1e3);
}

}  // namespace

TEST_CASE("asymptotics: solve_gamma against an explicit-inverse bisection") {
  testing::Generator g(21);
  for (int i = 0; i < 12; ++i) {
    const Matrix c = testing::unit_trace(testing::random_hpd(16, g.seed(), g.uniform(0.05, 1.0)));
    const CovarianceModel cov(c);
    const WeightFunction w = i % 2 ? WeightFunction::tyler(g.uniform(0.3, 1.5), 0.1)
                                   : WeightFunction::huber(g.uniform(0.3, 1.5), 0.1);
    const double cc = g.log_uniform(0.1, 3.0);
    const double lo = minimal_rho(w, cc);
    const RegularizedContext ctx(w, lo + (1 - lo) * g.uniform(0.05, 0.95), cc);
    const AsymptoticState s = solve_gamma(ctx, cov);
    CHECK(s.gamma == doctest::Approx(oracle_gamma(ctx, c)).epsilon(1e-9));
    CHECK(s.max_residual() <= 1e-10);
    CHECK(std::abs(gamma_residual(ctx, cov, s.gamma)) <= 1e-10);
    CHECK(s.v_gamma == doctest::Approx(ctx.v(s.gamma)).epsilon(1e-14));
  }
}

TEST_CASE("asymptotics: solve_gamma boundary cases") {
  const CovarianceModel cov = CovarianceModel::toeplitz(20, 0.6);
  const auto w = WeightFunction::tyler(1.2, 0.1);
  // rho = 1: gamma = M1.
  CHECK(solve_gamma(RegularizedContext(w, 1.0, 1.5), cov).gamma == doctest::Approx(1.0).epsilon(1e-12));
  // rho = 0: phi^{-1}(1) / (1 - c).
  const AsymptoticState s0 = solve_gamma(RegularizedContext(w, 0.0, 0.5), cov);
  CHECK(s0.gamma == doctest::Approx(w.phi_inverse(1.0) / 0.5).epsilon(1e-12));
  CHECK_THROWS_AS(solve_gamma(RegularizedContext(WeightFunction::tyler(0.8, 0.1), 0.0, 0.5), cov),
                  PreconditionViolation);
}

TEST_CASE("asymptotics: coupled system plug-back with explicit inverses") {
  testing::Generator g(22);
  for (int i = 0; i < 10; ++i) {
    const Matrix c = testing::unit_trace(testing::random_hpd(14, g.seed(), 0.2));
    const Matrix d = testing::unit_trace(testing::random_hpd(14, g.seed(), 0.2));
    const CovarianceModel cov(c), out(d);
    const WeightFunction w = i % 2 ? WeightFunction::tyler(1.1, 0.1) : WeightFunction::huber(1.1, 0.1);
    const double eps = g.uniform(0.01, 0.3);
    const double cc = i < 5 ? g.uniform(0.2, 2.0) : g.uniform(0.1, 0.8);
    const double lo = minimal_rho(w, cc);
    const double rho = i < 5 ? lo + (1 - lo) * g.uniform(0.05, 0.9) : 0.0;
    const RegularizedContext ctx(w, rho, cc);
    const AsymptoticState s = solve_gamma_alpha_reg(ctx, eps, cov, out);
    REQUIRE(s.alpha);
    const Matrix b_inv = regularized_b(ctx, eps, c, d, s.gamma, *s.alpha).inverse();
    CHECK(s.gamma == doctest::Approx(testing::ntrace(c * b_inv)).epsilon(1e-10));
    CHECK(*s.alpha == doctest::Approx(testing::ntrace(d * b_inv)).epsilon(1e-10));
    CHECK(s.max_residual() <= 1e-10);
  }
}

TEST_CASE("asymptotics: consistency web") {
  const CovarianceModel c = CovarianceModel::toeplitz(25, 0.9);
  const CovarianceModel d = CovarianceModel::toeplitz(25, 0.2);
  const auto w = WeightFunction::huber(1.0, 0.1);

  SUBCASE("eps = 0 collapses to solve_gamma and the alpha limit") {
    const RegularizedContext ctx(w, 0.3, 1.2);
    const AsymptoticState s = solve_gamma_alpha_reg(ctx, 0.0, c, d);
    const EpsZeroLimits lim = limits_eps_zero_reg(ctx, c, d);
    CHECK(s.gamma == doctest::Approx(solve_gamma(ctx, c).gamma).epsilon(1e-9));
    CHECK(*s.alpha == doctest::Approx(lim.alpha0).epsilon(1e-9));
    // The limit alpha is (1/N) tr D (b C + rho I)^{-1}, and small eps approaches it.
    const Matrix b_inv = regularized_b(ctx, 0.0, c.matrix(), d.matrix(), lim.gamma0, lim.gamma0).inverse();
    CHECK(lim.alpha0 == doctest::Approx(testing::ntrace(d.matrix() * b_inv)).epsilon(1e-10));
    const AsymptoticState tiny = solve_gamma_alpha_reg(ctx, 1e-9, c, d);
    CHECK(*tiny.alpha == doctest::Approx(lim.alpha0).epsilon(1e-6));
  }
  SUBCASE("D = C collapses alpha onto gamma") {
    const RegularizedContext ctx(w, 0.3, 1.2);
    const AsymptoticState s = solve_gamma_alpha_reg(ctx, 0.1, c, c);
    CHECK(*s.alpha == doctest::Approx(s.gamma).epsilon(1e-9));
    CHECK(s.gamma == doctest::Approx(solve_gamma(ctx, c).gamma).epsilon(1e-9));
  }
  SUBCASE("rho = 0 regularized system equals the unregularized one") {
    const RegularizedContext ctx(w, 0.0, 0.5);
    const AsymptoticState a = solve_gamma_alpha_reg(ctx, 0.1, c, d);
    const AsymptoticState b = solve_gamma_alpha_noreg(w, 0.5, 0.1, c, d);
    CHECK(a.gamma == doctest::Approx(b.gamma).epsilon(1e-9));
    CHECK(*a.alpha == doctest::Approx(*b.alpha).epsilon(1e-9));
    // Small rho approaches the unregularized solution.
    const AsymptoticState near = solve_gamma_alpha_reg(RegularizedContext(w, 1e-7, 0.5), 0.1, c, d);
    CHECK(near.gamma == doctest::Approx(b.gamma).epsilon(1e-5));
  }
  SUBCASE("unregularized limits") {
    const EpsZeroLimits lim = limits_eps_zero_noreg(w, 0.5, c, d);
    CHECK(lim.gamma0 == doctest::Approx(w.phi_inverse(1.0) / 0.5).epsilon(1e-12));
    const double ratio = testing::ntrace(c.matrix().inverse() * d.matrix());
    CHECK(trace_ratio(c, d) == doctest::Approx(ratio).epsilon(1e-10));
    CHECK(lim.alpha0 == doctest::Approx(lim.gamma0 * ratio).epsilon(1e-10));
    const AsymptoticState s = solve_gamma_alpha_noreg(w, 0.5, 0.0, c, d);
    CHECK(s.gamma == doctest::Approx(lim.gamma0).epsilon(1e-9));
  }
}

TEST_CASE("asymptotics: coupled solver update history is monotone at the end") {
  const CovarianceModel c = CovarianceModel::toeplitz(25, 0.9);
  const CovarianceModel d = CovarianceModel::toeplitz(25, 0.2);
  const AsymptoticState s =
      solve_gamma_alpha_reg(RegularizedContext(WeightFunction::tyler(1.0, 0.1), 0.5, 1.5), 0.1, c, d);
  REQUIRE(s.update_history.size() >= 2);
  CHECK(s.update_history.back() <= 1e-12);
  CHECK(s.iterations == static_cast<int>(s.update_history.size()));
}

TEST_CASE("asymptotics: deterministic equivalents") {
  const CovarianceModel c = CovarianceModel::toeplitz(12, 0.7);
  const CovarianceModel d = CovarianceModel::identity(12);
  const Dataset data = sample_contaminated(c, d, 8, 0.25, 3);
  const RegularizedContext ctx(WeightFunction::tyler(1.0, 0.1), 0.4, 1.5);
  const AsymptoticState clean = solve_gamma(ctx, c);
  const Matrix s = equivalent_clean(data, clean);
  Matrix expected = 0.6 * ctx.v(clean.gamma) * scm(data);
  expected.diagonal().array() += 0.4;
  CHECK((s - expected).norm() < 1e-12);

  const AsymptoticState cont = solve_gamma_alpha_reg(ctx, 0.25, c, d);
  const Matrix sc = equivalent_contaminated(data, cont);
  Matrix e2 = 0.6 * ctx.v(cont.gamma) * data.legit() * data.legit().adjoint() / 8.0 +
              0.6 * ctx.v(*cont.alpha) * data.outliers() * data.outliers().adjoint() / 8.0;
  e2.diagonal().array() += 0.4;
  CHECK((sc - e2).norm() < 1e-12);

  const Dataset wrong = sample_clean(c, 10, 3);
  CHECK_THROWS_AS(equivalent_clean(wrong, clean), DomainError);
  const AsymptoticState other = solve_gamma_alpha_reg(ctx, 0.1, c, d);
  CHECK_THROWS_AS(equivalent_contaminated(data, other), DomainError);
}
