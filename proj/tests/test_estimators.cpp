#include <doctest.h>

#include "rmest/errors.hpp"
#include "rmest/estimators.hpp"
#include "rmest/kernels.hpp"
#include "rmest/sampling.hpp"
#include "support.hpp"

using namespace rmest;

namespace {

// d_i = (1/N) y_i^H Z^{-1} y_i through an explicit inverse.
RealVector explicit_quadratic_forms(const Matrix& z, const Matrix& y) {
  const Matrix inv = z.inverse();
  RealVector d(y.cols());
  for (Index i = 0; i < y.cols(); ++i) {
    d(i) = (y.col(i).adjoint() * inv * y.col(i))(0, 0).real() / static_cast<double>(z.rows());
  }
  return d;
}

// (1 - rho)(1/n) sum u(d_i) y_i y_i^H + rho I, built from the explicit inverse.
Matrix explicit_map(const Matrix& y, const WeightFunction& w, double rho, const Matrix& z) {
  const RealVector d = explicit_quadratic_forms(z, y);
  Matrix out = Matrix::Zero(z.rows(), z.cols());
  for (Index i = 0; i < y.cols(); ++i) out += w.u(d(i)) * y.col(i) * y.col(i).adjoint();
  out *= (1.0 - rho) / static_cast<double>(y.cols());
  out.diagonal().array() += rho;
  return out;
}

}  // namespace

TEST_CASE("kernels: serial and parallel agree with the explicit forms") {
  for (Index dim : {1, 7, 33}) {
    const Matrix z = testing::random_hpd(dim, 5 + dim);
    const Matrix y = testing::random_gaussian(dim, 2 * dim + 3, 6 + dim);
    const Matrix lower = z.llt().matrixL();
    RealVector ds, dp;
    kernels::quadratic_forms_serial(lower, y, ds);
    kernels::quadratic_forms_parallel(lower, y, dp);
    const RealVector de = explicit_quadratic_forms(z, y);
    CHECK((ds - de).norm() <= 1e-11 * de.norm());
    CHECK((dp - de).norm() <= 1e-11 * de.norm());

    testing::Generator g(dim);
    RealVector w(y.cols());
    for (Index i = 0; i < w.size(); ++i) w(i) = g.uniform(0.1, 2.0);
    Matrix gs, gp;
    kernels::weighted_gram_serial(y, w, 0.3, gs);
    kernels::weighted_gram_parallel(y, w, 0.3, gp);
    Matrix ge = Matrix::Zero(dim, dim);
    for (Index i = 0; i < y.cols(); ++i) ge += 0.3 * w(i) * y.col(i) * y.col(i).adjoint();
    CHECK((gs - ge).norm() <= 1e-12 * ge.norm());
    CHECK((gp - ge).norm() <= 1e-12 * ge.norm());
  }
}

TEST_CASE("estimators: SCM and RSCM") {
  const Dataset data = sample_clean(CovarianceModel::toeplitz(6, 0.4), 9, 1);
  Matrix expected = Matrix::Zero(6, 6);
  for (Index i = 0; i < 9; ++i) expected += data.samples.col(i) * data.samples.col(i).adjoint();
  expected /= 9.0;
  CHECK((scm(data) - expected).norm() < 1e-13);
  CHECK(hermitian_defect(scm(data)) == 0.0);
  const Matrix r = rscm(data, 0.25);
  CHECK((r - (0.75 * expected + 0.25 * Matrix::Identity(6, 6))).norm() < 1e-13);
  CHECK(rscm(data, 1.0) == Matrix::Identity(6, 6));
  CHECK_THROWS_AS(rscm(data, 1.5), DomainError);
}

TEST_CASE("estimators: fixed-point map matches the explicit construction") {
  const Dataset data = sample_clean(CovarianceModel::toeplitz(10, 0.7), 25, 2);
  const auto w = WeightFunction::huber(0.9, 0.1);
  const Matrix z = testing::random_hpd(10, 3);
  const Matrix e = explicit_map(data.samples, w, 0.3, z);
  CHECK((fixed_point_map(data, w, 0.3, z) - e).norm() < 1e-11 * e.norm());
  CHECK((fixed_point_map(data, w, 0.3, z, kernels::Policy::Serial) - e).norm() < 1e-11 * e.norm());
}

TEST_CASE("estimators: Maronna fixed point") {
  const CovarianceModel c = CovarianceModel::toeplitz(20, 0.8);
  const Dataset data = sample_clean(c, 60, 4);
  for (const auto& w : {WeightFunction::tyler(1.2, 0.1), WeightFunction::huber(1.2, 0.1)}) {
    SolverOptions opts;
    opts.max_iterations = 2000;
    const EstimatorResult r = maronna(data, w, opts);
    CHECK(r.converged);
    CHECK(r.residual <= 1e-9);
    const Matrix rhs = explicit_map(data.samples, w, 0.0, r.estimate);
    CHECK((r.estimate - rhs).norm() / r.estimate.norm() <= 1e-9);
    CHECK((r.quadratic_forms - explicit_quadratic_forms(r.estimate, data.samples)).norm() <
          1e-9 * r.quadratic_forms.norm());
    for (Index i = 0; i < r.weights.size(); ++i) {
      CHECK(r.weights(i) == doctest::Approx(w.u(r.quadratic_forms(i))).epsilon(1e-12));
    }
    // SCM initializer reaches the same fixed point.
    opts.initializer = Initializer::SCM;
    const EstimatorResult r2 = maronna(data, w, opts);
    CHECK((r2.estimate - r.estimate).norm() < 1e-7 * r.estimate.norm());
  }
}

TEST_CASE("estimators: regime checks") {
  const Dataset data = sample_clean(CovarianceModel::toeplitz(20, 0.5), 15, 5);
  CHECK_THROWS_AS(maronna(data, WeightFunction::tyler(0.5, 0.1), {}), PreconditionViolation);
  const Dataset tall = sample_clean(CovarianceModel::toeplitz(20, 0.5), 40, 5);
  CHECK_THROWS_AS(maronna(tall, WeightFunction::tyler(0.8, 0.1), {}), PreconditionViolation);
  CHECK_THROWS_AS(maronna(tall, WeightFunction::tyler(2.0, 0.1), {}), PreconditionViolation);
  CHECK_THROWS_AS(regularized_maronna(data, WeightFunction::tyler(1.0, 0.1), 0.0), DomainError);
  CHECK_THROWS_AS(regularized_maronna(data, WeightFunction::tyler(1.0, 0.1), 0.05),
                  AdmissibilityError);
}

TEST_CASE("estimators: regularized fixed point, warm start and policies agree") {
  const CovarianceModel c = CovarianceModel::toeplitz(30, 0.9);
  const Dataset data = sample_clean(c, 20, 6);
  const auto w = WeightFunction::tyler(1.0 / 1.5, 0.1);
  const EstimatorResult r = regularized_maronna(data, w, 0.4);
  CHECK(r.converged);
  CHECK(r.residual <= 1e-9);
  const Matrix rhs = explicit_map(data.samples, w, 0.4, r.estimate);
  CHECK((r.estimate - rhs).norm() / r.estimate.norm() <= 1e-9);

  SolverOptions serial;
  serial.policy = kernels::Policy::Serial;
  const EstimatorResult rs = regularized_maronna(data, w, 0.4, serial);
  CHECK(rs.iterations == r.iterations);
  CHECK((rs.estimate - r.estimate).norm() < 1e-12 * r.estimate.norm());

  const EstimatorResult warm = regularized_maronna(data, w, 0.35, {}, &r.estimate);
  const EstimatorResult cold = regularized_maronna(data, w, 0.35);
  CHECK(warm.iterations < cold.iterations);
  CHECK((warm.estimate - cold.estimate).norm() < 1e-8 * cold.estimate.norm());
}

TEST_CASE("estimators: rho = 1 returns the identity in one iteration") {
  const Dataset data = sample_clean(CovarianceModel::toeplitz(15, 0.9), 10, 7);
  const EstimatorResult r = regularized_maronna(data, WeightFunction::huber(0.6, 0.1), 1.0);
  CHECK(r.iterations == 1);
  CHECK(r.residual == 0.0);
  CHECK(r.estimate == Matrix::Identity(15, 15));
}

TEST_CASE("estimators: iteration cap") {
  const Dataset data = sample_clean(CovarianceModel::toeplitz(15, 0.9), 10, 7);
  SolverOptions opts;
  opts.max_iterations = 2;
  const auto w = WeightFunction::tyler(0.6, 0.1);
  CHECK_THROWS_AS(regularized_maronna(data, w, 0.3, opts), NonConvergence);
  opts.throw_on_failure = false;
  const EstimatorResult r = regularized_maronna(data, w, 0.3, opts);
  CHECK_FALSE(r.converged);
  CHECK(r.iterations == 2);
  const Matrix rhs = explicit_map(data.samples, w, 0.3, r.estimate);
  CHECK(r.residual == doctest::Approx((r.estimate - rhs).norm() / r.estimate.norm()).epsilon(1e-8));
}
