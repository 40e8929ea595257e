#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rmest/estimators.hpp"
#include "rmest/linalg.hpp"
#include "rmest/sampling.hpp"
#include "rmest/weights.hpp"

namespace rmest {

enum class EstimatorKind { SCM, RSCM, MTyler, MHuber };

/// An estimator together with its parameters. `rho` is the RSCM shrinkage or
/// the M-estimator regularization (0 selects the unregularized M-estimator);
/// it is ignored for the SCM.
struct EstimatorSpec {
  EstimatorKind kind = EstimatorKind::SCM;
  double scale = 1.0;
  double shape = 0.1;
  double rho = 0.0;

  bool is_m_estimator() const noexcept {
    return kind == EstimatorKind::MTyler || kind == EstimatorKind::MHuber;
  }
  /// Throws DomainError for SCM/RSCM.
  WeightFunction weight() const;
  std::string name() const;
};

/// Runs the estimator on a dataset. M-estimators honour `options`.
EstimatorResult run_estimator(const EstimatorSpec& spec, const Dataset& data,
                              const SolverOptions& options = {});

struct MonteCarloOptions {
  Index samples = 200;
  int trials = 200;
  std::uint64_t seed = 0;
  /// Trace-normalize C and D instead of rejecting them.
  bool auto_normalize = false;
  /// Number of batches for the batch-means standard error.
  int batches = 10;
  SamplingOptions sampling;
  SolverOptions solver;
};

struct MonteCarloInfluence {
  double value = 0.0;
  double standard_error = 0.0;
  int trials = 0;
  /// Trials dropped because a solve on either dataset failed.
  int failures = 0;
};

/// Seed of trial `index` derived from a base seed.
std::uint64_t trial_seed(std::uint64_t base, std::uint64_t index);

/// || mean(C0 / tr) - mean(Ceps / tr) ||_2 over paired clean and contaminated
/// datasets (the contaminated dataset reuses the clean legitimate stream).
/// Trials run in parallel; the reduction order is fixed.
MonteCarloInfluence mi_empirical(const EstimatorSpec& spec, const CovarianceModel& cov,
                                 const CovarianceModel& outlier, double eps,
                                 const MonteCarloOptions& options);

/// eps ||C - D|| and ||C - D||. C, D must be trace-normalized.
double mi_scm(double eps, const CovarianceModel& cov, const CovarianceModel& outlier);
double imi_scm(const CovarianceModel& cov, const CovarianceModel& outlier);

/// (1 - rho) eps ||C - D|| and (1 - rho) ||C - D|| for the RSCM (v = 1).
double mi_rscm(double rho, double eps, const CovarianceModel& cov,
               const CovarianceModel& outlier);
double imi_rscm(double rho, const CovarianceModel& cov, const CovarianceModel& outlier);

/// eps v(alpha) / ((1 - eps) v(gamma) + eps v(alpha)) ||C - D||.
double mi_asymptotic_noreg(const WeightFunction& weight, double c, double eps,
                           const CovarianceModel& cov, const CovarianceModel& outlier);

/// ||U|| / V with
///   U = (1-rho) rho [(1-eps) v_g (C - I) + eps v_a (D - I) - v_0 (C - I)]
///       + (1-rho)^2 eps v_0 v_a (D - C)
///   V = ((1-rho)(1-eps) v_g + (1-rho) eps v_a + rho) ((1-rho) v_0 + rho).
/// ctx.rho() = 0 reduces to mi_asymptotic_noreg.
double mi_asymptotic_reg(const RegularizedContext& ctx, double eps, const CovarianceModel& cov,
                         const CovarianceModel& outlier);

enum class ImiMode {
  /// Exact v and its chain-rule derivative.
  Exact,
  /// Small-t closed form of v.
  SmallT,
};

struct ImiResult {
  double value = 0.0;
  double gamma0 = 0.0;
  double alpha0 = 0.0;
  /// d gamma / d eps at eps = 0 (zero for the unregularized estimator).
  double dgamma_deps = 0.0;
  /// The Huber kink sits at gamma0; a right derivative was used.
  bool one_sided = false;
  std::vector<std::string> warnings;
};

/// v(alpha0) / v(gamma0) ||C - D||; SmallT evaluates both weights with the
/// small-t closed form of v.
ImiResult imi_noreg(const WeightFunction& weight, double c, const CovarianceModel& cov,
                    const CovarianceModel& outlier, ImiMode mode = ImiMode::Exact);

/// ||G|| / ((1 - rho) v0 + rho)^2 with
///   G = (1-rho) rho [(v0' - v0)(C - I) + v(alpha0)(D - I)] + (1-rho)^2 v0 v(alpha0)(D - C),
/// v0' = v'(gamma0) d gamma/d eps. SmallT uses the small-t derivative of v there.
/// ctx.rho() = 0 reduces to imi_noreg.
ImiResult imi_reg(const RegularizedContext& ctx, const CovarianceModel& cov,
                  const CovarianceModel& outlier, ImiMode mode = ImiMode::Exact);

/// d gamma / d eps at eps = 0 for the regularized system.
double dgamma_deps(const RegularizedContext& ctx, const CovarianceModel& cov,
                   const CovarianceModel& outlier, double gamma0, double alpha0,
                   DerivativeMode mode, Side side = Side::Both);

/// True when 0 < c < 1 and 1 < phi_inf < 1/c (the unregularized regime).
bool noreg_in_regime(const WeightFunction& weight, double c);

}  // namespace rmest
