#include "cli.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "config.hpp"
#include "rmest/errors.hpp"
#include "rmest/matrix_io.hpp"
#include "runners.hpp"

namespace rmest::tools {

namespace {

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  bool quick = false;
  bool no_timestamp = false;
  std::string out;
  std::string input;
  bool oracle = false;
};

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

std::ofstream open_output(const std::string& path) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write '" + path + "'");
  return f;
}

void write_header(std::ostream& os, const std::string& command, const CommonFlags& flags) {
  if (!flags.no_timestamp) os << "# rmest " << command << " generated " << utc_timestamp() << "\r\n";
}

ExperimentConfig resolve_config(Experiment e, const CommonFlags& flags) {
  ExperimentConfig cfg = flags.config.empty() ? default_config(e) : load_config(flags.config, e);
  if (flags.seed) cfg.seed = *flags.seed;
  if (flags.quick && cfg.trials > 0) cfg.trials = std::max(1, cfg.trials / 10);
  if (!flags.out.empty()) cfg.output = flags.out;
  validate(cfg);
  return cfg;
}

Dataset load_input(const ExperimentConfig& cfg, const CommonFlags& flags) {
  if (flags.input.empty()) {
    SamplingOptions sampling;
    sampling.field = cfg.field;
    return sample_clean(cfg.cov_legit.load(cfg.N), cfg.n, cfg.seed, sampling);
  }
  Dataset data;
  try {
    data.samples = read_matrix_csv(flags.input);
  } catch (const ParseError& ex) {
    throw ParseError(flags.input + ": " + ex.what(), ex.line());
  }
  data.n_legit = data.samples.cols();
  return data;
}

void write_table(const Table& table, Experiment e, const std::string& command,
                 const ExperimentConfig& cfg, const CommonFlags& flags, std::ostream& out) {
  const std::string csv = cfg.output + ".csv";
  const std::string gp = cfg.output + ".gp";
  {
    std::ofstream f = open_output(csv);
    write_header(f, command, flags);
    table.write_csv(f);
  }
  {
    std::ofstream f = open_output(gp);
    f << gnuplot_script(e, std::filesystem::path(csv).filename().string());
  }
  out << "wrote " << csv << " (" << table.size() << " rows) and " << gp << "\n";
}

int dispatch(Experiment e, const std::string& command, const CommonFlags& flags,
             std::ostream& out) {
  const ExperimentConfig cfg = resolve_config(e, flags);
  switch (e) {
    case Experiment::LossCurve:
      write_table(run_loss_curve(cfg), e, command, cfg, flags, out);
      return kExitOk;
    case Experiment::MiCurve:
      write_table(run_mi_curve(cfg), e, command, cfg, flags, out);
      return kExitOk;
    case Experiment::ImiVsAspect:
      write_table(run_imi_vs_aspect(cfg), e, command, cfg, flags, out);
      return kExitOk;
    case Experiment::ImiVsRho:
      write_table(run_imi_vs_rho(cfg), e, command, cfg, flags, out);
      return kExitOk;
    case Experiment::Estimate: {
      const Dataset data = load_input(cfg, flags);
      EstimateOutput result;
      try {
        result = run_estimate(cfg, data);
      } catch (const NonConvergence& ex) {
        result.report = {{"converged", false},
                         {"error", ex.what()},
                         {"iterations", ex.iterations()},
                         {"residual", ex.residual()}};
        result.converged = false;
      }
      const std::string json_path = cfg.output + ".report.json";
      {
        std::ofstream f = open_output(json_path);
        f << result.report.dump(2) << "\n";
      }
      if (result.estimate.size() > 0) {
        const std::string mat_path = cfg.output + ".estimate.csv";
        std::ofstream f = open_output(mat_path);
        write_header(f, command, flags);
        write_matrix_csv(f, result.estimate);
        out << "wrote " << mat_path << "\n";
      }
      out << "wrote " << json_path << "\n";
      return result.converged ? kExitOk : kExitSolverFailure;
    }
    case Experiment::Calibrate: {
      const Dataset data = load_input(cfg, flags);
      // Synthetic data is drawn from cov_legit, so the oracle is known.
      std::optional<CovarianceModel> cov;
      if (flags.input.empty() || flags.oracle) cov = cfg.cov_legit.load(data.dimension());
      const CalibrateOutput result = run_calibrate(cfg, data, cov ? &*cov : nullptr);
      write_table(result.table, e, command, cfg, flags, out);
      const std::string json_path = cfg.output + ".report.json";
      std::ofstream f = open_output(json_path);
      f << result.report.dump(2) << "\n";
      out << "wrote " << json_path << "\n";
      for (std::size_t i = 0; i < result.table.size(); ++i) {
        if (result.table.text(i, "status") != kOk) return kExitSolverFailure;
      }
      return kExitOk;
    }
  }
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Regularized M-estimators of covariance: estimation, calibration and robustness sweeps"};
  app.require_subcommand(1);
  CommonFlags flags;

  const std::vector<std::pair<Experiment, std::string>> commands = {
      {Experiment::Estimate, "Run one estimator on a data matrix"},
      {Experiment::Calibrate, "Estimate the regularization parameter from data"},
      {Experiment::LossCurve, "Expected quadratic loss over a rho grid"},
      {Experiment::MiCurve, "Measure of influence over an eps grid"},
      {Experiment::ImiVsAspect, "IMI at the optimal rho over a grid of aspect ratios"},
      {Experiment::ImiVsRho, "IMI over a rho grid"},
  };
  std::vector<std::pair<Experiment, CLI::App*>> subs;
  for (const auto& [e, help] : commands) {
    CLI::App* sub = app.add_subcommand(experiment_name(e), help);
    sub->add_option("--config", flags.config, "YAML experiment configuration")->check(CLI::ExistingFile);
    sub->add_option("--seed", flags.seed, "Base seed (overrides the config)");
    sub->add_flag("--quick", flags.quick, "Divide the trial count by 10");
    sub->add_flag("--no-header-timestamp", flags.no_timestamp,
                  "Omit the timestamped first line of CSV outputs");
    sub->add_option("--out", flags.out, "Output path prefix (overrides the config)");
    if (e == Experiment::Estimate || e == Experiment::Calibrate) {
      sub->add_option("--input", flags.input,
                      "Data matrix CSV (rows = variables, columns = samples); "
                      "default: synthetic data drawn from cov_legit");
    }
    if (e == Experiment::Calibrate) {
      sub->add_flag("--oracle", flags.oracle,
                    "Treat cov_legit as the true covariance of --input and fill the oracle columns");
    }
    subs.emplace_back(e, sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& ex) {
    const int code = app.exit(ex, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }

  for (const auto& [e, sub] : subs) {
    if (!sub->parsed()) continue;
    try {
      return dispatch(e, sub->get_name(), flags, out);
    } catch (const ParseError& ex) {
      err << "error: " << ex.what() << "\n";
      return kExitInputError;
    } catch (const DomainError& ex) {
      err << "error: " << ex.what() << "\n";
      return kExitInputError;
    } catch (const AdmissibilityError& ex) {
      err << "error: " << ex.what() << "\n";
      return kExitInputError;
    } catch (const PreconditionViolation& ex) {
      err << "error: " << ex.what() << "\n";
      return kExitInputError;
    } catch (const Error& ex) {
      err << "error: " << ex.what() << "\n";
      return kExitSolverFailure;
    } catch (const std::exception& ex) {
      err << "error: " << ex.what() << "\n";
      return kExitSolverFailure;
    }
  }
  return kExitInputError;
}

}  // namespace rmest::tools
