#pragma once

#include <optional>
#include <vector>

#include "rmest/linalg.hpp"
#include "rmest/sampling.hpp"
#include "rmest/weights.hpp"

namespace rmest {

/// Solution of one of the scalar deterministic-equivalent systems.
///
/// Clean case: gamma solves gamma = (1/N) tr C (b C + rho I)^{-1} with
/// b = (1 - rho) v(gamma) / (1 + (1 - rho) c gamma v(gamma)).
///
/// Contaminated case: (gamma, alpha) solve
///   gamma = (1/N) tr C B^{-1},  alpha = (1/N) tr D B^{-1},
///   B = (1 - rho)(1 - eps) k(gamma) C + (1 - rho) eps k(alpha) D + rho I,
/// with k(x) = v(x) / (1 + (1 - rho) c x v(x)). rho = 0 is the unregularized system.
struct AsymptoticState {
  double gamma = 0.0;
  std::optional<double> alpha;
  double v_gamma = 0.0;
  std::optional<double> v_alpha;
  double rho = 0.0;
  double c = 0.0;
  double eps = 0.0;
  /// Absolute plug-back residual of each equation, gamma first.
  std::vector<double> residuals;
  int iterations = 0;
  /// max-norm update size per iteration of the coupled solver (empty for scalar solves).
  std::vector<double> update_history;

  double max_residual() const;
};

/// k(x) = v(x) / (1 + (1 - rho) c x v(x)), the weight multiplying C or D in B.
double interference_weight(const RegularizedContext& ctx, double x);

/// Bisection on (1/N) sum_i l_i / ((1 - rho) phi(g^{-1}(gamma)) l_i + rho gamma) = 1
/// over the eigenvalues l_i of C. rho = 0 is solved in closed form (requires c < 1).
AsymptoticState solve_gamma(const RegularizedContext& ctx, const CovarianceModel& c);

/// gamma - (1/N) tr C (b C + rho I)^{-1} at the given gamma.
double gamma_residual(const RegularizedContext& ctx, const CovarianceModel& c, double gamma);

/// Unregularized contaminated system. Requires c < 1, 1 < phi_inf < 1/c and C
/// positive definite.
AsymptoticState solve_gamma_alpha_noreg(const WeightFunction& weight, double c, double eps,
                                        const CovarianceModel& cov, const CovarianceModel& outlier);

/// Regularized contaminated system; ctx.rho() = 0 falls through to the unregularized
/// solver, eps = 0 to solve_gamma plus the eps -> 0 limit of alpha.
AsymptoticState solve_gamma_alpha_reg(const RegularizedContext& ctx, double eps,
                                      const CovarianceModel& cov, const CovarianceModel& outlier);

struct EpsZeroLimits {
  double gamma0 = 0.0;
  double alpha0 = 0.0;
};

/// gamma0 = phi^{-1}(1) / (1 - c), alpha0 = gamma0 (1/N) tr C^{-1} D.
EpsZeroLimits limits_eps_zero_noreg(const WeightFunction& weight, double c,
                                    const CovarianceModel& cov, const CovarianceModel& outlier);

/// gamma0 from solve_gamma; alpha0 = (1/N) tr D (b C + rho I)^{-1}.
/// ctx.rho() = 0 uses the unregularized formulas.
EpsZeroLimits limits_eps_zero_reg(const RegularizedContext& ctx, const CovarianceModel& cov,
                                  const CovarianceModel& outlier);

/// (1/N) tr C^{-1} D. Throws DomainError when C is singular.
double trace_ratio(const CovarianceModel& cov, const CovarianceModel& outlier);

/// (1 - rho) v(gamma) SCM + rho I. Throws DomainError when the dataset's aspect
/// ratio does not match state.c.
Matrix equivalent_clean(const Dataset& data, const AsymptoticState& state);

/// (1 - rho) v(gamma) (1/n) sum_legit y y^H + (1 - rho) v(alpha) (1/n) sum_out a a^H + rho I.
/// Throws DomainError when the outlier count or aspect ratio does not match the state.
Matrix equivalent_contaminated(const Dataset& data, const AsymptoticState& state);

}  // namespace rmest
