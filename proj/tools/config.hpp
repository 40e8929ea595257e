#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rmest/estimators.hpp"
#include "rmest/robustness.hpp"
#include "rmest/sampling.hpp"

namespace rmest::tools {

enum class Experiment { LossCurve, MiCurve, ImiVsAspect, ImiVsRho, Estimate, Calibrate };

/// Subcommand spelling ("loss-curve", ...).
std::string experiment_name(Experiment e);
Experiment parse_experiment(const std::string& name);

/// Toeplitz coefficient or a matrix file.
struct CovarianceSource {
  std::optional<double> toeplitz;
  std::string file;

  CovarianceModel load(Index dimension) const;
  std::string describe() const;
};

/// How the scale K of a weight function is chosen.
enum class ScaleRule { Fixed, InverseAspect, InverseAspectCapped };

struct EstimatorEntry {
  EstimatorKind kind = EstimatorKind::MTyler;
  ScaleRule scale_rule = ScaleRule::InverseAspect;
  double scale = 1.0;
  double shape = 0.1;
  /// Regularization: a number, or unset for "star" (the estimator's own optimum).
  std::optional<double> rho;

  /// K at aspect ratio c: fixed, 1/c ("auto") or min{1, 1/c} ("auto-min").
  double scale_at(double c) const;
  EstimatorSpec spec(double c, double rho_value) const;
  std::string name() const;
};

struct ExperimentConfig {
  Experiment experiment = Experiment::LossCurve;
  Index N = 150;
  Index n = 100;
  CovarianceSource cov_legit{0.9, {}};
  CovarianceSource cov_outlier{0.2, {}};
  ScalarField field = ScalarField::Complex;
  std::vector<EstimatorEntry> estimators;
  std::vector<double> rho_grid;
  std::vector<double> eps_grid;
  std::vector<double> c_grid;
  int trials = 100;
  std::uint64_t seed = 1;
  std::string output;
  SolverOptions solver;
  /// Trace-normalize C and D before robustness computations.
  bool normalize = false;
  int batches = 10;

  double aspect_ratio() const { return static_cast<double>(N) / static_cast<double>(n); }
};

/// Defaults mirroring the figure captions for each experiment.
ExperimentConfig default_config(Experiment e);

/// Parses a YAML document over the defaults of `e`. Unknown keys, wrong types and
/// invalid grids raise ParseError carrying the 1-based line of the offending node.
ExperimentConfig parse_config(const std::string& yaml_text, Experiment e);
ExperimentConfig load_config(const std::string& path, Experiment e);

/// Checks grids (nonempty, strictly increasing, in range) and sizes.
void validate(const ExperimentConfig& cfg);

}  // namespace rmest::tools
