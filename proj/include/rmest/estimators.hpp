#pragma once

#include "rmest/kernels.hpp"
#include "rmest/linalg.hpp"
#include "rmest/sampling.hpp"
#include "rmest/weights.hpp"

namespace rmest {

enum class Initializer { Identity, SCM };

struct SolverOptions {
  /// Relative Frobenius residual ||Z - RHS(Z)||_F / ||Z||_F required for convergence.
  double tolerance = 1e-9;
  int max_iterations = 200;
  Initializer initializer = Initializer::Identity;
  /// When false a non-converged solve is returned with `converged == false`
  /// instead of raising NonConvergence.
  bool throw_on_failure = true;
  kernels::Policy policy = kernels::Policy::Parallel;
};

struct EstimatorResult {
  Matrix estimate;
  int iterations = 0;
  /// ||Z - RHS(Z)||_F / ||Z||_F at the returned Z.
  double residual = 0.0;
  bool converged = false;
  /// d_i = (1/N) y_i^H Z^{-1} y_i at the returned Z.
  RealVector quadratic_forms;
  /// u(d_i).
  RealVector weights;
};

/// (1/n) Y Y^H.
Matrix scm(const Matrix& samples);
Matrix scm(const Dataset& data);

/// (1 - beta) SCM + beta I, beta in [0, 1].
Matrix rscm(const Dataset& data, double beta);

/// Maronna's M-estimator: Z = (1/n) sum_i u(d_i) y_i y_i^H by Picard iteration.
/// Requires c_N < 1 and 1 < phi_inf < 1 / c_N.
EstimatorResult maronna(const Dataset& data, const WeightFunction& weight,
                        const SolverOptions& options = {});

/// Regularized M-estimator: Z = (1 - rho)(1/n) sum_i u(d_i) y_i y_i^H + rho I.
/// Requires rho in (0, 1] and (1 - rho) phi_inf c_N < 1. `start`, when given,
/// replaces the initializer (warm start from a nearby fixed point).
EstimatorResult regularized_maronna(const Dataset& data, const WeightFunction& weight,
                                    double rho, const SolverOptions& options = {},
                                    const Matrix* start = nullptr);

/// One application of the fixed-point map, RHS(Z). `rho = 0` gives the
/// unregularized map.
Matrix fixed_point_map(const Dataset& data, const WeightFunction& weight, double rho,
                       const Matrix& z, kernels::Policy policy = kernels::Policy::Parallel);

}  // namespace rmest
