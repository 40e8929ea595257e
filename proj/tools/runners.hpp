#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "config.hpp"
#include "rmest/linalg.hpp"
#include "rmest/sampling.hpp"
#include "table.hpp"

namespace rmest::tools {

/// Row status values.
inline constexpr const char* kOk = "ok";
inline constexpr const char* kOutOfRegime = "out_of_regime";
inline constexpr const char* kNonConverged = "non_converged";

/// The loss-minimizing regularization of an estimator at aspect ratio c: rho*
/// for the RSCM, the preimage of rho* under rho -> rho_bar for an M-estimator,
/// 0 for the SCM. Empty when no admissible solution exists.
std::optional<double> optimal_rho(const EstimatorEntry& entry, double c,
                                  const CovarianceModel& cov);

/// Expected quadratic loss over a rho grid, rho_hat arrows and the L* line.
/// Columns: kind, estimator, rho, rho_bar, mean_loss, stderr, loss_of_equivalent,
/// trials, status; kind in {curve, rho_hat, L_star}.
Table run_loss_curve(const ExperimentConfig& cfg);

/// MI over an eps grid. Columns: estimator, eps, rho, mi_asymptotic, mi_empirical,
/// stderr, linear, imi, failures, status.
Table run_mi_curve(const ExperimentConfig& cfg);

/// IMI at the estimator's optimal rho over a c grid, with K re-evaluated per c.
/// Columns: kind, estimator, c, K, rho, imi, imi_small_t, one_sided, status;
/// kind in {regularized, noreg}.
Table run_imi_vs_aspect(const ExperimentConfig& cfg);

/// IMI over a rho grid at c = N/n. Columns: kind, estimator, rho, imi, imi_small_t,
/// one_sided, status; kind in {curve, optimum}.
Table run_imi_vs_rho(const ExperimentConfig& cfg);

struct EstimateOutput {
  Matrix estimate;
  nlohmann::json report;
  bool converged = false;
};

/// Runs the configured estimator on `data`. An unset rho is estimated (rho_hat).
EstimateOutput run_estimate(const ExperimentConfig& cfg, const Dataset& data);

struct CalibrateOutput {
  /// Columns: estimator, K, rho_hat, rho_hat_target, evaluations, boundary,
  /// rho_star, L_star, rho_star_estimator, rho_bar_of_rho_hat, loss_at_rho_hat, status.
  Table table;
  nlohmann::json report;
};

/// rho_hat for each estimator on `data`; when `cov` is given the oracle columns
/// (rho*, L*, the estimator's optimum, rho_bar of rho_hat and the loss) are filled.
CalibrateOutput run_calibrate(const ExperimentConfig& cfg, const Dataset& data,
                              const CovarianceModel* cov);

/// Standalone gnuplot script plotting the CSV at `csv_path`.
std::string gnuplot_script(Experiment e, const std::string& csv_path);

}  // namespace rmest::tools
