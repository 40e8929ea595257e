#pragma once

#include <optional>
#include <string>

#include "rmest/estimators.hpp"
#include "rmest/linalg.hpp"
#include "rmest/sampling.hpp"
#include "rmest/weights.hpp"

namespace rmest {

/// (1/N) || A / ((1/N) tr A) - C / ((1/N) tr C) ||_F^2.
double quadratic_loss(const Matrix& a, const Matrix& c);
double quadratic_loss(const Matrix& a, const CovarianceModel& c);

/// rho_bar = rho / ((1 - rho) v(gamma(rho)) + rho), with gamma from solve_gamma.
/// Requires ctx.rho() > 0.
double rho_to_rho_bar(const RegularizedContext& ctx, const CovarianceModel& cov);

/// Smallest rho in (max(rho_0, 0) + 1e-8, 1] with rho_to_rho_bar(rho) = rho_bar, where
/// rho_0 is the admissibility bound. A grid scan locates the first sign change,
/// bisection refines it.
double rho_bar_to_rho(double rho_bar, const WeightFunction& weight, double c,
                      const CovarianceModel& cov);

struct CalibrationReport {
  double rho_star = 1.0;
  double loss_star = 0.0;
  /// Raw spectral moments of C.
  double m1 = 0.0;
  double m2 = 0.0;
  std::optional<double> rho_hat;
  std::optional<double> rho_bar_of_rho_hat;
};

/// rho* = c / (c + M2 - 1), L* = c (M2 - 1) / (c + M2 - 1), evaluated on the
/// trace-normalized spectrum (the loss is scale invariant). M2 = 1 gives rho* = 1, L* = 0.
CalibrationReport oracle_optimum(double c, const CovarianceModel& cov);

struct RhoHatOptions {
  SolverOptions solver;
  int max_evaluations = 40;
  /// Bracket width at which the root search stops.
  double rho_tolerance = 1e-6;
  double lower_floor = 1e-3;
  /// Records that the clean-data formula is being applied to data believed to
  /// carry outliers; the estimate itself is unchanged.
  bool suspected_contaminated = false;
};

struct RhoHatResult {
  double rho_hat = 1.0;
  /// c_N / ((1/N) tr[(normalized SCM)^2] - 1), the rho-independent right side.
  double target = 0.0;
  int evaluations = 0;
  /// The root was not bracketed and a boundary of the search interval was returned.
  bool boundary = false;
  bool contaminated_flag = false;
  std::string diagnostic;
  /// Regularized estimator at rho_hat.
  EstimatorResult estimate;
};

/// rho / ((1/N) tr C_hat(rho)) for one regularized solve; exposed for tests.
double rho_hat_left_side(const EstimatorResult& fixed_point, double rho);

/// c_N / ((1/N) tr[((1/n) sum y y^H / ((1/N)|y|^2))^2] - 1).
double rho_hat_target(const Dataset& data);

/// Solves rho / ((1/N) tr C_hat(rho)) = rho_hat_target(data) on (max(rho_0, lower_floor), 1].
/// The search walks down from rho = 1 halving the distance to the lower end until
/// the root is bracketed, then refines with an Illinois false-position step. Every
/// solve warm-starts from the nearest previous fixed point.
RhoHatResult estimate_rho_hat(const Dataset& data, const WeightFunction& weight,
                              const RhoHatOptions& options = {});

}  // namespace rmest
