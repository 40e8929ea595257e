#include "rmest/estimators.hpp"

#include <sstream>

#include "rmest/errors.hpp"

namespace rmest {

namespace {

struct MapEvaluation {
  Matrix rhs;
  RealVector quadratic_forms;
  RealVector weights;
};

MapEvaluation evaluate_map(const Matrix& samples, const WeightFunction& weight, double rho,
                           const Matrix& z, kernels::Policy policy) {
  Eigen::LLT<Matrix> llt(z);
  if (llt.info() != Eigen::Success) {
    throw SingularIterate("fixed-point iterate is not positive definite");
  }
  MapEvaluation out;
  kernels::quadratic_forms(policy, llt.matrixL(), samples, out.quadratic_forms);
  out.weights.resize(out.quadratic_forms.size());
  for (Index i = 0; i < out.weights.size(); ++i) {
    out.weights(i) = weight.u(out.quadratic_forms(i));
  }
  const double scale = (1.0 - rho) / static_cast<double>(samples.cols());
  kernels::weighted_gram(policy, samples, out.weights, scale, out.rhs);
  out.rhs.diagonal().array() += rho;
  symmetrize(out.rhs);
  return out;
}

EstimatorResult picard(const Dataset& data, const WeightFunction& weight, double rho,
                       const SolverOptions& options, Matrix z, const char* name) {
  if (!(options.tolerance > 0.0) || options.max_iterations < 1) {
    throw DomainError(std::string(name) + ": tolerance must be > 0 and max_iterations >= 1");
  }
  EstimatorResult result;
  for (int it = 1; it <= options.max_iterations; ++it) {
    MapEvaluation step = evaluate_map(data.samples, weight, rho, z, options.policy);
    const double residual = (z - step.rhs).norm() / z.norm();
    result.iterations = it;
    result.residual = residual;
    if (residual <= options.tolerance) {
      result.estimate = std::move(z);
      result.quadratic_forms = std::move(step.quadratic_forms);
      result.weights = std::move(step.weights);
      result.converged = true;
      return result;
    }
    z = std::move(step.rhs);
    result.quadratic_forms = std::move(step.quadratic_forms);
    result.weights = std::move(step.weights);
  }
  if (options.throw_on_failure) {
    throw NonConvergence(std::string(name) + ": fixed-point iteration did not converge",
                         result.iterations, result.residual);
  }
  // Report the weights that belong to the returned matrix.
  MapEvaluation last = evaluate_map(data.samples, weight, rho, z, options.policy);
  result.residual = (z - last.rhs).norm() / z.norm();
  result.quadratic_forms = std::move(last.quadratic_forms);
  result.weights = std::move(last.weights);
  result.estimate = std::move(z);
  return result;
}

void require_samples(const Dataset& data, const char* name) {
  if (data.size() < 1 || data.dimension() < 1) {
    throw DomainError(std::string(name) + ": empty dataset");
  }
}

}  // namespace

Matrix scm(const Matrix& samples) {
  if (samples.cols() < 1) throw DomainError("scm: empty dataset");
  Matrix s = samples * samples.adjoint() / static_cast<double>(samples.cols());
  symmetrize(s);
  return s;
}

Matrix scm(const Dataset& data) { return scm(data.samples); }

Matrix rscm(const Dataset& data, double beta) {
  if (!(beta >= 0.0 && beta <= 1.0)) throw DomainError("rscm: beta must lie in [0, 1]");
  Matrix r = (1.0 - beta) * scm(data);
  r.diagonal().array() += beta;
  return r;
}

EstimatorResult maronna(const Dataset& data, const WeightFunction& weight,
                        const SolverOptions& options) {
  require_samples(data, "maronna");
  const double c = data.aspect_ratio();
  const double phi_inf = weight.phi_infinity();
  if (!(c < 1.0) || !(phi_inf > 1.0) || !(phi_inf < 1.0 / c)) {
    std::ostringstream os;
    os << "maronna: requires c_N < 1 and 1 < phi_inf < 1/c_N (c_N=" << c
       << ", phi_inf=" << phi_inf << ")";
    throw PreconditionViolation(os.str());
  }
  const Index dim = data.dimension();
  Matrix start = options.initializer == Initializer::SCM ? scm(data)
                                                         : Matrix(Matrix::Identity(dim, dim));
  return picard(data, weight, 0.0, options, std::move(start), "maronna");
}

EstimatorResult regularized_maronna(const Dataset& data, const WeightFunction& weight,
                                    double rho, const SolverOptions& options,
                                    const Matrix* start) {
  require_samples(data, "regularized_maronna");
  if (!(rho > 0.0 && rho <= 1.0)) {
    throw DomainError("regularized_maronna: rho must lie in (0, 1]");
  }
  RegularizedContext(weight, rho, data.aspect_ratio());  // admissibility

  const Index dim = data.dimension();
  Matrix z;
  if (rho == 1.0) {
    z = Matrix::Identity(dim, dim);
  } else if (start != nullptr) {
    if (start->rows() != dim || start->cols() != dim) {
      throw DomainError("regularized_maronna: warm start has the wrong dimension");
    }
    z = *start;
  } else if (options.initializer == Initializer::SCM) {
    z = rscm(data, rho);
  } else {
    z = Matrix::Identity(dim, dim);
  }
  return picard(data, weight, rho, options, std::move(z), "regularized_maronna");
}

Matrix fixed_point_map(const Dataset& data, const WeightFunction& weight, double rho,
                       const Matrix& z, kernels::Policy policy) {
  return evaluate_map(data.samples, weight, rho, z, policy).rhs;
}

}  // namespace rmest
