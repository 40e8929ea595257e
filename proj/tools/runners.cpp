#include "runners.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "rmest/asymptotics.hpp"
#include "rmest/calibration.hpp"
#include "rmest/errors.hpp"
#include "rmest/robustness.hpp"

namespace rmest::tools {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// NaN marks a missing value (no trials, single-trial stderr) and is written blank.
Cell num(double x) { return std::isnan(x) ? Cell() : Cell(x); }
Cell num(const std::optional<double>& x) { return x ? Cell(*x) : Cell(); }
Cell str(const std::string& s) { return s; }
Cell count(long long x) { return x; }

struct Summary {
  double mean = kNaN;
  double stderr = kNaN;
  long long n = 0;
};

Summary summarize(const std::vector<double>& xs) {
  Summary s;
  s.n = static_cast<long long>(xs.size());
  if (xs.empty()) return s;
  double sum = 0.0;
  for (double x : xs) sum += x;
  s.mean = sum / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double var = 0.0;
    for (double x : xs) var += (x - s.mean) * (x - s.mean);
    var /= static_cast<double>(xs.size() - 1);
    s.stderr = std::sqrt(var / static_cast<double>(xs.size()));
  }
  return s;
}

bool admissible(const WeightFunction& w, double rho, double c) {
  return (1.0 - rho) * c * w.phi_infinity() < 1.0;
}

/// rho_hat for the RSCM: the right side of the rho_hat equation is itself an
/// estimate of rho*.
double rscm_rho_hat(const Dataset& data) { return std::min(1.0, rho_hat_target(data)); }

SolverOptions trial_solver(const ExperimentConfig& cfg) {
  SolverOptions s = cfg.solver;
  s.throw_on_failure = false;
  return s;
}

std::pair<CovarianceModel, CovarianceModel> load_pair(const ExperimentConfig& cfg) {
  CovarianceModel cov = cfg.cov_legit.load(cfg.N);
  CovarianceModel outlier = cfg.cov_outlier.load(cfg.N);
  if (cfg.normalize) return {cov.normalized(), outlier.normalized()};
  return {std::move(cov), std::move(outlier)};
}

// Per-trial results of the loss curve for one estimator.
struct TrialLosses {
  std::vector<double> loss;
  std::vector<double> loss_equivalent;
  std::vector<char> ok;
  double rho_hat = kNaN;
  double rho_hat_loss = kNaN;
  bool rho_hat_ok = false;
};

}  // namespace

std::optional<double> optimal_rho(const EstimatorEntry& entry, double c,
                                  const CovarianceModel& cov) {
  switch (entry.kind) {
    case EstimatorKind::SCM:
      return 0.0;
    case EstimatorKind::RSCM:
      return oracle_optimum(c, cov).rho_star;
    default:
      break;
  }
  try {
    const double rho_star = oracle_optimum(c, cov).rho_star;
    return rho_bar_to_rho(rho_star, entry.spec(c, 0.0).weight(), c, cov);
  } catch (const Error&) {
    return std::nullopt;
  }
}

Table run_loss_curve(const ExperimentConfig& cfg) {
  const CovarianceModel cov = cfg.cov_legit.load(cfg.N);
  const double c = cfg.aspect_ratio();
  const CalibrationReport oracle = oracle_optimum(c, cov);
  const std::vector<double>& grid = cfg.rho_grid;
  const std::size_t n_rho = grid.size();
  const std::size_t n_est = cfg.estimators.size();

  // Deterministic equivalents per (estimator, rho); empty when inadmissible.
  std::vector<std::vector<std::optional<AsymptoticState>>> states(n_est);
  for (std::size_t e = 0; e < n_est; ++e) {
    states[e].resize(n_rho);
    const EstimatorEntry& entry = cfg.estimators[e];
    if (entry.kind != EstimatorKind::MTyler && entry.kind != EstimatorKind::MHuber) continue;
    const WeightFunction w = entry.spec(c, 0.0).weight();
    for (std::size_t j = 0; j < n_rho; ++j) {
      if (!admissible(w, grid[j], c)) continue;
      try {
        states[e][j] = solve_gamma(RegularizedContext(w, grid[j], c), cov);
      } catch (const Error&) {
      }
    }
  }

  const int trials = cfg.trials;
  std::vector<std::vector<TrialLosses>> results(static_cast<std::size_t>(trials),
                                                std::vector<TrialLosses>(n_est));
  const SolverOptions solver = trial_solver(cfg);

#pragma omp parallel for schedule(dynamic)
  for (int k = 0; k < trials; ++k) {
    SamplingOptions sampling;
    sampling.field = cfg.field;
    const Dataset data =
        sample_clean(cov, cfg.n, trial_seed(cfg.seed, static_cast<std::uint64_t>(k)), sampling);
    for (std::size_t e = 0; e < n_est; ++e) {
      const EstimatorEntry& entry = cfg.estimators[e];
      TrialLosses& out = results[k][e];
      out.loss.assign(n_rho, kNaN);
      out.loss_equivalent.assign(n_rho, kNaN);
      out.ok.assign(n_rho, 0);
      if (entry.kind == EstimatorKind::SCM) {
        out.loss[0] = quadratic_loss(scm(data), cov);
        out.ok[0] = 1;
        continue;
      }
      if (entry.kind == EstimatorKind::RSCM) {
        for (std::size_t j = 0; j < n_rho; ++j) {
          out.loss[j] = quadratic_loss(rscm(data, grid[j]), cov);
          out.ok[j] = 1;
        }
        out.rho_hat = rscm_rho_hat(data);
        out.rho_hat_loss = quadratic_loss(rscm(data, out.rho_hat), cov);
        out.rho_hat_ok = true;
        continue;
      }
      const WeightFunction w = entry.spec(c, 0.0).weight();
      // Walk rho downwards so each solve starts from its neighbour's fixed point.
      std::optional<Matrix> warm;
      for (std::size_t jj = n_rho; jj-- > 0;) {
        if (!states[e][jj]) continue;
        try {
          const EstimatorResult r =
              regularized_maronna(data, w, grid[jj], solver, warm ? &*warm : nullptr);
          if (!r.converged) continue;
          out.loss[jj] = quadratic_loss(r.estimate, cov);
          out.loss_equivalent[jj] = quadratic_loss(equivalent_clean(data, *states[e][jj]), cov);
          out.ok[jj] = 1;
          warm = r.estimate;
        } catch (const Error&) {
        }
      }
      try {
        RhoHatOptions opts;
        opts.solver = cfg.solver;
        const RhoHatResult rh = estimate_rho_hat(data, w, opts);
        out.rho_hat = rh.rho_hat;
        out.rho_hat_loss = quadratic_loss(rh.estimate.estimate, cov);
        out.rho_hat_ok = true;
      } catch (const Error&) {
      }
    }
  }

  Table table({"kind", "estimator", "rho", "rho_bar", "mean_loss", "stderr",
               "loss_of_equivalent", "trials", "status"});
  for (std::size_t e = 0; e < n_est; ++e) {
    const EstimatorEntry& entry = cfg.estimators[e];
    const std::string name = entry.name();
    const bool m_est = entry.kind == EstimatorKind::MTyler || entry.kind == EstimatorKind::MHuber;
    const std::size_t rows = entry.kind == EstimatorKind::SCM ? 1 : n_rho;
    for (std::size_t j = 0; j < rows; ++j) {
      std::vector<double> loss, loss_eq;
      for (int k = 0; k < trials; ++k) {
        const TrialLosses& t = results[k][e];
        if (!t.ok[j]) continue;
        loss.push_back(t.loss[j]);
        if (!std::isnan(t.loss_equivalent[j])) loss_eq.push_back(t.loss_equivalent[j]);
      }
      const Summary s = summarize(loss);
      const double rho = entry.kind == EstimatorKind::SCM ? 0.0 : grid[j];
      std::optional<double> rho_bar;
      std::string status = kOk;
      if (m_est) {
        if (!states[e][j]) {
          status = kOutOfRegime;
        } else {
          rho_bar = rho / ((1.0 - rho) * states[e][j]->v_gamma + rho);
          if (s.n < trials) status = kNonConverged;
        }
      } else if (entry.kind == EstimatorKind::RSCM) {
        rho_bar = rho;
      }
      table.add({str("curve"), str(name), num(rho), num(rho_bar), num(s.mean), num(s.stderr),
                 loss_eq.empty() ? Cell() : num(summarize(loss_eq).mean), count(s.n),
                 str(status)});
    }
    if (entry.kind == EstimatorKind::SCM) continue;

    std::vector<double> rho_hats, losses;
    for (int k = 0; k < trials; ++k) {
      const TrialLosses& t = results[k][e];
      if (!t.rho_hat_ok) continue;
      rho_hats.push_back(t.rho_hat);
      losses.push_back(t.rho_hat_loss);
    }
    const Summary sr = summarize(rho_hats);
    const Summary sl = summarize(losses);
    std::optional<double> rho_bar;
    if (sr.n > 0) {
      if (m_est) {
        try {
          rho_bar = rho_to_rho_bar(RegularizedContext(entry.spec(c, 0.0).weight(), sr.mean, c), cov);
        } catch (const Error&) {
        }
      } else {
        rho_bar = sr.mean;
      }
    }
    table.add({str("rho_hat"), str(name), num(sr.mean), num(rho_bar), num(sl.mean),
               num(sl.stderr), Cell(), count(sr.n),
               str(sr.n == trials ? kOk : kNonConverged)});
  }
  table.add({str("L_star"), str("oracle"), num(oracle.rho_star), num(oracle.rho_star),
             num(oracle.loss_star), Cell(), Cell(), count(0), str(kOk)});
  table.sort({"kind", "estimator", "rho"});
  return table;
}

Table run_mi_curve(const ExperimentConfig& cfg) {
  const auto [cov, outlier] = load_pair(cfg);
  const double c = cfg.aspect_ratio();
  Table table({"estimator", "eps", "rho", "mi_asymptotic", "mi_empirical", "stderr", "linear",
               "imi", "failures", "status"});
  for (const EstimatorEntry& entry : cfg.estimators) {
    const std::optional<double> rho = entry.rho ? entry.rho : optimal_rho(entry, c, cov);
    bool in_regime = rho.has_value();
    std::optional<EstimatorSpec> spec;
    if (in_regime) {
      spec = entry.spec(c, *rho);
      if (spec->is_m_estimator()) {
        const WeightFunction w = spec->weight();
        in_regime = *rho == 0.0 ? noreg_in_regime(w, c) : admissible(w, *rho, c);
      }
    }
    if (!in_regime) {
      for (double eps : cfg.eps_grid) {
        table.add({str(entry.name()), num(eps), num(rho), Cell(), Cell(), Cell(), Cell(), Cell(),
                   count(0), str(kOutOfRegime)});
      }
      continue;
    }
    double imi = 0.0;
    switch (spec->kind) {
      case EstimatorKind::SCM:
        imi = imi_scm(cov, outlier);
        break;
      case EstimatorKind::RSCM:
        imi = imi_rscm(*rho, cov, outlier);
        break;
      default:
        imi = *rho == 0.0 ? imi_noreg(spec->weight(), c, cov, outlier).value
                          : imi_reg(RegularizedContext(spec->weight(), *rho, c), cov, outlier).value;
    }
    for (double eps : cfg.eps_grid) {
      double asym = 0.0;
      switch (spec->kind) {
        case EstimatorKind::SCM:
          asym = mi_scm(eps, cov, outlier);
          break;
        case EstimatorKind::RSCM:
          asym = mi_rscm(*rho, eps, cov, outlier);
          break;
        default:
          asym = *rho == 0.0
                     ? mi_asymptotic_noreg(spec->weight(), c, eps, cov, outlier)
                     : mi_asymptotic_reg(RegularizedContext(spec->weight(), *rho, c), eps, cov,
                                         outlier);
      }
      Cell empirical, err;
      long long failures = 0;
      std::string status = kOk;
      if (cfg.trials > 0) {
        MonteCarloOptions mc;
        mc.samples = cfg.n;
        mc.trials = cfg.trials;
        mc.seed = cfg.seed;
        mc.batches = cfg.batches;
        mc.sampling.field = cfg.field;
        mc.solver = cfg.solver;
        const MonteCarloInfluence mi = mi_empirical(*spec, cov, outlier, eps, mc);
        empirical = mi.value;
        err = mi.standard_error;
        failures = mi.failures;
        if (mi.failures > 0) status = kNonConverged;
      }
      table.add({str(entry.name()), num(eps), num(*rho), num(asym), empirical, err,
                 num(eps * imi), num(imi), count(failures), str(status)});
    }
  }
  table.sort({"estimator", "eps"});
  return table;
}

Table run_imi_vs_aspect(const ExperimentConfig& cfg) {
  const auto [cov, outlier] = load_pair(cfg);
  Table table({"kind", "estimator", "c", "K", "rho", "imi", "imi_small_t", "one_sided",
               "status"});
  for (double c : cfg.c_grid) {
    for (const EstimatorEntry& entry : cfg.estimators) {
      const bool m_est =
          entry.kind == EstimatorKind::MTyler || entry.kind == EstimatorKind::MHuber;
      const double k = entry.scale_at(c);
      const Cell k_cell = m_est ? num(k) : Cell();

      // Regularized estimator at its own optimum.
      const std::optional<double> rho = entry.rho ? entry.rho : optimal_rho(entry, c, cov);
      if (entry.kind == EstimatorKind::SCM) {
        // No regularized counterpart.
      } else if (!rho) {
        table.add({str("regularized"), str(entry.name()), num(c), k_cell, Cell(), Cell(), Cell(),
                   Cell(), str(kOutOfRegime)});
      } else if (entry.kind == EstimatorKind::RSCM) {
        const double v = imi_rscm(*rho, cov, outlier);
        table.add({str("regularized"), str(entry.name()), num(c), k_cell, num(*rho), num(v),
                   num(v), count(0), str(kOk)});
      } else {
        const WeightFunction w = entry.spec(c, *rho).weight();
        if (!(*rho > 0.0) || !admissible(w, *rho, c)) {
          table.add({str("regularized"), str(entry.name()), num(c), k_cell, num(*rho), Cell(),
                     Cell(), Cell(), str(kOutOfRegime)});
        } else {
          const RegularizedContext ctx(w, *rho, c);
          const ImiResult exact = imi_reg(ctx, cov, outlier, ImiMode::Exact);
          const ImiResult small = imi_reg(ctx, cov, outlier, ImiMode::SmallT);
          table.add({str("regularized"), str(entry.name()), num(c), k_cell, num(*rho),
                     num(exact.value), num(small.value),
                     count(exact.one_sided || small.one_sided), str(kOk)});
        }
      }

      // Unregularized reference (the SCM for SCM and RSCM).
      if (!m_est) {
        if (c < 1.0) {
          const double v = imi_scm(cov, outlier);
          table.add({str("noreg"), str(entry.name()), num(c), k_cell, num(0.0), num(v), num(v),
                     count(0), str(kOk)});
        } else {
          table.add({str("noreg"), str(entry.name()), num(c), k_cell, num(0.0), Cell(), Cell(),
                     Cell(), str(kOutOfRegime)});
        }
        continue;
      }
      const WeightFunction w = entry.spec(c, 0.0).weight();
      if (noreg_in_regime(w, c)) {
        const ImiResult exact = imi_noreg(w, c, cov, outlier, ImiMode::Exact);
        const ImiResult small = imi_noreg(w, c, cov, outlier, ImiMode::SmallT);
        table.add({str("noreg"), str(entry.name()), num(c), k_cell, num(0.0), num(exact.value),
                   num(small.value), count(0), str(kOk)});
      } else {
        table.add({str("noreg"), str(entry.name()), num(c), k_cell, num(0.0), Cell(), Cell(),
                   Cell(), str(kOutOfRegime)});
      }
    }
  }
  table.sort({"kind", "estimator", "c"});
  return table;
}

Table run_imi_vs_rho(const ExperimentConfig& cfg) {
  const auto [cov, outlier] = load_pair(cfg);
  const double c = cfg.aspect_ratio();
  Table table({"kind", "estimator", "rho", "imi", "imi_small_t", "one_sided", "status"});
  auto add_point = [&](const char* kind, const EstimatorEntry& entry, double rho) {
    if (entry.kind == EstimatorKind::SCM) return;
    if (entry.kind == EstimatorKind::RSCM) {
      const double v = imi_rscm(rho, cov, outlier);
      table.add({str(kind), str(entry.name()), num(rho), num(v), num(v), count(0), str(kOk)});
      return;
    }
    const WeightFunction w = entry.spec(c, rho).weight();
    if (!admissible(w, rho, c) || (rho == 0.0 && !noreg_in_regime(w, c))) {
      table.add({str(kind), str(entry.name()), num(rho), Cell(), Cell(), Cell(),
                 str(kOutOfRegime)});
      return;
    }
    const RegularizedContext ctx(w, rho, c);
    const ImiResult exact = imi_reg(ctx, cov, outlier, ImiMode::Exact);
    const ImiResult small = imi_reg(ctx, cov, outlier, ImiMode::SmallT);
    table.add({str(kind), str(entry.name()), num(rho), num(exact.value), num(small.value),
               count(exact.one_sided || small.one_sided), str(kOk)});
  };
  for (const EstimatorEntry& entry : cfg.estimators) {
    for (double rho : cfg.rho_grid) add_point("curve", entry, rho);
    if (const auto opt = optimal_rho(entry, c, cov)) add_point("optimum", entry, *opt);
  }
  table.sort({"kind", "estimator", "rho"});
  return table;
}

namespace {

nlohmann::json weight_summary(const EstimatorResult& r) {
  if (r.weights.size() == 0) return nullptr;
  std::vector<double> w(r.weights.data(), r.weights.data() + r.weights.size());
  std::sort(w.begin(), w.end());
  return {{"min", w.front()}, {"median", w[w.size() / 2]}, {"max", w.back()}};
}

}  // namespace

EstimateOutput run_estimate(const ExperimentConfig& cfg, const Dataset& data) {
  const EstimatorEntry& entry = cfg.estimators.at(0);
  const double c = data.aspect_ratio();
  EstimateOutput out;
  nlohmann::json& rep = out.report;
  rep["estimator"] = entry.name();
  rep["N"] = data.dimension();
  rep["n"] = data.size();
  rep["c"] = c;

  SolverOptions solver = cfg.solver;
  solver.throw_on_failure = false;
  EstimatorResult result;
  std::optional<double> rho = entry.rho;

  if (entry.kind == EstimatorKind::SCM) {
    result.estimate = scm(data);
    result.converged = true;
  } else if (entry.kind == EstimatorKind::RSCM) {
    if (!rho) {
      rep["rho_hat_target"] = rho_hat_target(data);
      rho = rscm_rho_hat(data);
      rep["rho_hat"] = *rho;
    }
    result.estimate = rscm(data, *rho);
    result.converged = true;
  } else {
    const EstimatorSpec spec = entry.spec(c, rho.value_or(0.0));
    rep["K"] = spec.scale;
    rep["t"] = spec.shape;
    if (rho) {
      result = *rho == 0.0 ? maronna(data, spec.weight(), solver)
                           : regularized_maronna(data, spec.weight(), *rho, solver);
    } else {
      RhoHatOptions opts;
      opts.solver = cfg.solver;
      const RhoHatResult rh = estimate_rho_hat(data, spec.weight(), opts);
      rho = rh.rho_hat;
      rep["rho_hat"] = rh.rho_hat;
      rep["rho_hat_target"] = rh.target;
      rep["rho_hat_evaluations"] = rh.evaluations;
      rep["rho_hat_boundary"] = rh.boundary;
      if (!rh.diagnostic.empty()) rep["rho_hat_diagnostic"] = rh.diagnostic;
      result = rh.estimate;
    }
  }
  if (rho) rep["rho"] = *rho;
  rep["iterations"] = result.iterations;
  rep["residual"] = result.residual;
  rep["converged"] = result.converged;
  rep["weights"] = weight_summary(result);
  out.converged = result.converged;
  out.estimate = std::move(result.estimate);
  return out;
}

CalibrateOutput run_calibrate(const ExperimentConfig& cfg, const Dataset& data,
                              const CovarianceModel* cov) {
  const double c = data.aspect_ratio();
  CalibrateOutput out{Table({"estimator", "K", "rho_hat", "rho_hat_target", "evaluations",
                             "boundary", "rho_star", "L_star", "rho_star_estimator",
                             "rho_bar_of_rho_hat", "loss_at_rho_hat", "status"}),
                      {}};
  std::optional<CalibrationReport> oracle;
  if (cov) {
    oracle = oracle_optimum(c, *cov);
    out.report["oracle"] = {{"rho_star", oracle->rho_star},
                            {"L_star", oracle->loss_star},
                            {"M1", oracle->m1},
                            {"M2", oracle->m2}};
  }
  const double target = rho_hat_target(data);
  out.report["N"] = data.dimension();
  out.report["n"] = data.size();
  out.report["c"] = c;
  out.report["rho_hat_target"] = target;
  out.report["estimators"] = nlohmann::json::array();

  for (const EstimatorEntry& entry : cfg.estimators) {
    if (entry.kind == EstimatorKind::SCM) continue;
    const bool m_est = entry.kind != EstimatorKind::RSCM;
    const double k = entry.scale_at(c);
    double rho_hat = 1.0;
    long long evaluations = 0;
    bool boundary = false;
    Matrix estimate;
    std::string status = kOk;
    std::string diagnostic;
    if (m_est) {
      RhoHatOptions opts;
      opts.solver = cfg.solver;
      try {
        const RhoHatResult rh = estimate_rho_hat(data, entry.spec(c, 0.0).weight(), opts);
        rho_hat = rh.rho_hat;
        evaluations = rh.evaluations;
        boundary = rh.boundary;
        diagnostic = rh.diagnostic;
        estimate = rh.estimate.estimate;
      } catch (const NonConvergence& ex) {
        status = kNonConverged;
        diagnostic = ex.what();
      }
    } else {
      rho_hat = rscm_rho_hat(data);
      boundary = rho_hat == 1.0;
      estimate = rscm(data, rho_hat);
    }
    std::optional<double> rho_opt, rho_bar, loss;
    if (oracle && status == kOk) {
      rho_opt = optimal_rho(entry, c, *cov);
      loss = quadratic_loss(estimate, *cov);
      if (m_est) {
        rho_bar = rho_to_rho_bar(RegularizedContext(entry.spec(c, 0.0).weight(), rho_hat, c), *cov);
      } else {
        rho_bar = rho_hat;
      }
    }
    out.table.add({str(entry.name()), m_est ? num(k) : Cell(),
                   status == kOk ? num(rho_hat) : Cell(), num(target), count(evaluations),
                   count(boundary), oracle ? num(oracle->rho_star) : Cell(),
                   oracle ? num(oracle->loss_star) : Cell(), num(rho_opt), num(rho_bar),
                   num(loss), str(status)});
    nlohmann::json e = {{"estimator", entry.name()}, {"status", status}};
    if (m_est) e["K"] = k;
    if (status == kOk) e["rho_hat"] = rho_hat;
    e["evaluations"] = evaluations;
    e["boundary"] = boundary;
    if (!diagnostic.empty()) e["diagnostic"] = diagnostic;
    if (rho_opt) e["rho_star_estimator"] = *rho_opt;
    if (rho_bar) e["rho_bar_of_rho_hat"] = *rho_bar;
    if (loss) e["loss_at_rho_hat"] = *loss;
    out.report["estimators"].push_back(e);
  }
  out.table.sort({"estimator"});
  return out;
}

std::string gnuplot_script(Experiment e, const std::string& csv_path) {
  std::ostringstream os;
  os << "# gnuplot script; run with: gnuplot -p <this file>\n"
     << "set datafile separator ','\n"
     << "set datafile columnheaders\n"
     << "set key top right\n"
     << "# status is the last column and may carry a trailing CR\n"
     << "ok(s) = s[1:2] eq 'ok'\n"
     << "file = '" << csv_path << "'\n";
  auto series = [&](const std::string& kind, const std::string& name, const std::string& x,
                    const std::string& y, const std::string& style) {
    std::ostringstream s;
    s << "file using (ok(strcol('status')) && strcol('kind') eq '" << kind
      << "' && strcol('estimator') eq '" << name << "' ? column('" << x << "') : NaN):'" << y
      << "' with " << style << " title '" << name << " " << kind << "'";
    return s.str();
  };
  switch (e) {
    case Experiment::LossCurve:
      os << "set xlabel 'rho'\nset ylabel 'expected quadratic loss'\nset logscale y\n"
         << "plot " << series("curve", "RSCM", "rho", "mean_loss", "linespoints") << ", \\\n  "
         << series("curve", "MTyler", "rho", "mean_loss", "linespoints") << ", \\\n  "
         << series("curve", "MHuber", "rho", "mean_loss", "linespoints") << ", \\\n  "
         << series("rho_hat", "MTyler", "rho", "mean_loss", "points pt 9") << ", \\\n  "
         << series("rho_hat", "MHuber", "rho", "mean_loss", "points pt 11") << ", \\\n  "
         << series("L_star", "oracle", "rho", "mean_loss", "points pt 7") << "\n";
      break;
    case Experiment::MiCurve:
      os << "set xlabel 'eps'\nset ylabel 'MI'\n"
         << "sel(n) = (ok(strcol('status')) && strcol('estimator') eq n)\n"
         << "plot for [n in 'SCM RSCM MTyler MHuber'] file using (sel(n) ? column('eps') : NaN):"
            "'mi_asymptotic' with lines title n.' asymptotic', \\\n"
         << "  for [n in 'SCM RSCM MTyler MHuber'] file using (sel(n) ? column('eps') : NaN):"
            "'mi_empirical' with points title n.' empirical', \\\n"
         << "  for [n in 'SCM RSCM MTyler MHuber'] file using (sel(n) ? column('eps') : NaN):"
            "'linear' with lines dt 2 title n.' eps*IMI'\n";
      break;
    case Experiment::ImiVsAspect:
      os << "set xlabel 'c'\nset ylabel 'IMI at the optimal rho'\nset logscale x\n"
         << "plot " << series("regularized", "RSCM", "c", "imi", "lines") << ", \\\n  "
         << series("regularized", "MTyler", "c", "imi", "lines") << ", \\\n  "
         << series("regularized", "MHuber", "c", "imi", "lines") << ", \\\n  "
         << series("noreg", "RSCM", "c", "imi", "points pt 9") << ", \\\n  "
         << series("noreg", "MTyler", "c", "imi", "points pt 11") << ", \\\n  "
         << series("noreg", "MHuber", "c", "imi", "points pt 13") << "\n";
      break;
    case Experiment::ImiVsRho:
      os << "set xlabel 'rho'\nset ylabel 'IMI'\n"
         << "plot " << series("curve", "RSCM", "rho", "imi", "lines") << ", \\\n  "
         << series("curve", "MTyler", "rho", "imi", "lines") << ", \\\n  "
         << series("curve", "MHuber", "rho", "imi", "lines") << ", \\\n  "
         << series("optimum", "RSCM", "rho", "imi", "points pt 9") << ", \\\n  "
         << series("optimum", "MTyler", "rho", "imi", "points pt 11") << ", \\\n  "
         << series("optimum", "MHuber", "rho", "imi", "points pt 13") << "\n";
      break;
    case Experiment::Estimate:
    case Experiment::Calibrate:
      os << "# nothing to plot for " << experiment_name(e) << "\n";
      break;
  }
  return os.str();
}

}  // namespace rmest::tools
