#include "config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "rmest/errors.hpp"
#include "rmest/matrix_io.hpp"

namespace rmest::tools {

namespace {

std::size_t line_of(const YAML::Node& node) {
  const int line = node.Mark().line;
  return line >= 0 ? static_cast<std::size_t>(line) + 1 : 0;
}

[[noreturn]] void fail(const YAML::Node& node, const std::string& what) {
  throw ParseError("config: " + what, line_of(node));
}

void check_keys(const YAML::Node& map, const std::set<std::string>& allowed,
                const std::string& where) {
  if (!map.IsMap()) fail(map, where + " must be a mapping");
  for (const auto& kv : map) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) fail(kv.first, "unknown key '" + key + "' in " + where);
  }
}

template <class T>
T scalar(const YAML::Node& node, const std::string& key) {
  if (!node.IsScalar()) fail(node, "'" + key + "' must be a scalar");
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    fail(node, "'" + key + "' has the wrong type (got '" + node.Scalar() + "')");
  }
}

std::vector<double> linspace(double from, double to, int count) {
  std::vector<double> out;
  for (int k = 0; k < count; ++k) {
    out.push_back(count == 1 ? from : from + (to - from) * k / (count - 1));
  }
  if (count > 1) out.back() = to;
  return out;
}

std::vector<double> logspace(double from, double to, int count) {
  std::vector<double> out;
  for (int k = 0; k < count; ++k) {
    const double s = count == 1 ? 0.0 : static_cast<double>(k) / (count - 1);
    out.push_back(std::exp(std::log(from) + s * (std::log(to) - std::log(from))));
  }
  if (count > 1) {
    out.front() = from;
    out.back() = to;
  }
  return out;
}

std::vector<double> parse_grid(const YAML::Node& node, const std::string& key) {
  if (node.IsSequence()) {
    std::vector<double> out;
    for (const auto& x : node) out.push_back(scalar<double>(x, key));
    return out;
  }
  check_keys(node, {"from", "to", "count", "spacing"}, "grid '" + key + "'");
  if (!node["from"] || !node["to"] || !node["count"]) {
    fail(node, "grid '" + key + "' needs from, to and count");
  }
  const double from = scalar<double>(node["from"], "from");
  const double to = scalar<double>(node["to"], "to");
  const int count = scalar<int>(node["count"], "count");
  if (count < 1) fail(node["count"], "grid count must be >= 1");
  const std::string spacing = node["spacing"] ? scalar<std::string>(node["spacing"], "spacing")
                                              : std::string("linear");
  if (spacing == "linear") return linspace(from, to, count);
  if (spacing == "log") {
    if (!(from > 0.0 && to > 0.0)) fail(node, "log grid needs positive bounds");
    return logspace(from, to, count);
  }
  fail(node["spacing"], "spacing must be 'linear' or 'log'");
}

CovarianceSource parse_covariance(const YAML::Node& node, const std::string& key) {
  CovarianceSource src;
  if (node.IsScalar()) {
    src.toeplitz = scalar<double>(node, key);
    return src;
  }
  check_keys(node, {"toeplitz", "file"}, "'" + key + "'");
  if (node["toeplitz"] && node["file"]) fail(node, "'" + key + "' takes toeplitz or file, not both");
  if (node["toeplitz"]) {
    src.toeplitz = scalar<double>(node["toeplitz"], "toeplitz");
  } else if (node["file"]) {
    src.file = scalar<std::string>(node["file"], "file");
  } else {
    fail(node, "'" + key + "' needs toeplitz or file");
  }
  return src;
}

EstimatorKind parse_kind(const YAML::Node& node) {
  const auto name = scalar<std::string>(node, "type");
  if (name == "SCM") return EstimatorKind::SCM;
  if (name == "RSCM") return EstimatorKind::RSCM;
  if (name == "MTyler") return EstimatorKind::MTyler;
  if (name == "MHuber") return EstimatorKind::MHuber;
  fail(node, "unknown estimator type '" + name + "' (SCM, RSCM, MTyler, MHuber)");
}

EstimatorEntry parse_estimator(const YAML::Node& node) {
  check_keys(node, {"type", "K", "t", "rho"}, "estimator");
  if (!node["type"]) fail(node, "estimator needs a type");
  EstimatorEntry e;
  e.kind = parse_kind(node["type"]);
  if (const auto k = node["K"]) {
    const auto text = scalar<std::string>(k, "K");
    if (text == "auto") {
      e.scale_rule = ScaleRule::InverseAspect;
    } else if (text == "auto-min") {
      e.scale_rule = ScaleRule::InverseAspectCapped;
    } else {
      e.scale_rule = ScaleRule::Fixed;
      e.scale = scalar<double>(k, "K");
      if (!(e.scale > 0.0)) fail(k, "K must be positive");
    }
  }
  if (const auto t = node["t"]) {
    e.shape = scalar<double>(t, "t");
    if (!(e.shape > 0.0)) fail(t, "t must be positive");
  }
  if (const auto r = node["rho"]) {
    const auto text = scalar<std::string>(r, "rho");
    if (text == "star") {
      e.rho.reset();
    } else {
      e.rho = scalar<double>(r, "rho");
      if (!(*e.rho >= 0.0 && *e.rho <= 1.0)) fail(r, "rho must lie in [0, 1]");
    }
  }
  return e;
}

void check_grid(const std::vector<double>& grid, const std::string& name, double lo, double hi,
                bool lo_open, bool hi_open) {
  if (grid.empty()) throw ParseError("config: grid '" + name + "' is empty", 0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid[i];
    const bool below = lo_open ? !(x > lo) : !(x >= lo);
    const bool above = hi_open ? !(x < hi) : !(x <= hi);
    if (below || above) {
      std::ostringstream os;
      os << "config: grid '" << name << "' value " << x << " out of range";
      throw ParseError(os.str(), 0);
    }
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      throw ParseError("config: grid '" + name + "' must be strictly increasing", 0);
    }
  }
}

}  // namespace

std::string experiment_name(Experiment e) {
  switch (e) {
    case Experiment::LossCurve:
      return "loss-curve";
    case Experiment::MiCurve:
      return "mi-curve";
    case Experiment::ImiVsAspect:
      return "imi-aspect";
    case Experiment::ImiVsRho:
      return "imi-rho";
    case Experiment::Estimate:
      return "estimate";
    case Experiment::Calibrate:
      return "calibrate";
  }
  return "unknown";
}

Experiment parse_experiment(const std::string& name) {
  for (auto e : {Experiment::LossCurve, Experiment::MiCurve, Experiment::ImiVsAspect,
                 Experiment::ImiVsRho, Experiment::Estimate, Experiment::Calibrate}) {
    if (experiment_name(e) == name) return e;
  }
  throw ParseError("config: unknown experiment '" + name + "'", 0);
}

CovarianceModel CovarianceSource::load(Index dimension) const {
  if (toeplitz) return CovarianceModel::toeplitz(dimension, *toeplitz);
  CovarianceModel m(read_matrix_csv(file));
  if (m.dimension() != dimension) {
    throw ParseError("config: covariance file " + file + " has dimension " +
                         std::to_string(m.dimension()) + ", expected " +
                         std::to_string(dimension),
                     0);
  }
  return m;
}

std::string CovarianceSource::describe() const {
  if (toeplitz) {
    std::ostringstream os;
    os << "toeplitz(" << *toeplitz << ")";
    return os.str();
  }
  return "file(" + file + ")";
}

double EstimatorEntry::scale_at(double c) const {
  switch (scale_rule) {
    case ScaleRule::Fixed:
      return scale;
    case ScaleRule::InverseAspect:
      return 1.0 / c;
    case ScaleRule::InverseAspectCapped:
      return std::min(1.0, 1.0 / c);
  }
  return scale;
}

EstimatorSpec EstimatorEntry::spec(double c, double rho_value) const {
  EstimatorSpec s;
  s.kind = kind;
  s.scale = scale_at(c);
  s.shape = shape;
  s.rho = rho_value;
  return s;
}

std::string EstimatorEntry::name() const {
  EstimatorSpec s;
  s.kind = kind;
  return s.name();
}

ExperimentConfig default_config(Experiment e) {
  ExperimentConfig cfg;
  cfg.experiment = e;
  cfg.output = "out/" + experiment_name(e);
  cfg.solver.max_iterations = 1000;
  auto m_estimator = [](EstimatorKind kind, ScaleRule rule, double scale,
                        std::optional<double> rho) {
    EstimatorEntry x;
    x.kind = kind;
    x.scale_rule = rule;
    x.scale = scale;
    x.rho = rho;
    return x;
  };
  const EstimatorEntry rscm = m_estimator(EstimatorKind::RSCM, ScaleRule::Fixed, 1.0, {});
  switch (e) {
    case Experiment::LossCurve:
      cfg.estimators = {rscm,
                        m_estimator(EstimatorKind::MTyler, ScaleRule::InverseAspect, 1.0, {}),
                        m_estimator(EstimatorKind::MHuber, ScaleRule::InverseAspect, 1.0, {})};
      cfg.rho_grid = linspace(0.1, 1.0, 19);
      cfg.trials = 100;
      break;
    case Experiment::MiCurve:
      cfg.N = 50;
      cfg.n = 200;
      cfg.estimators = {m_estimator(EstimatorKind::SCM, ScaleRule::Fixed, 1.0, 0.0),
                        m_estimator(EstimatorKind::MTyler, ScaleRule::Fixed, 1.0, 0.0),
                        m_estimator(EstimatorKind::MHuber, ScaleRule::Fixed, 1.0, 0.0)};
      cfg.eps_grid = linspace(0.0, 0.15, 16);
      cfg.trials = 200;
      break;
    case Experiment::ImiVsAspect:
      cfg.estimators = {
          rscm, m_estimator(EstimatorKind::MTyler, ScaleRule::InverseAspectCapped, 1.0, {}),
          m_estimator(EstimatorKind::MHuber, ScaleRule::InverseAspectCapped, 1.0, {})};
      cfg.c_grid = logspace(0.05, 4.0, 30);
      cfg.trials = 0;
      break;
    case Experiment::ImiVsRho:
      cfg.estimators = {rscm,
                        m_estimator(EstimatorKind::MTyler, ScaleRule::InverseAspect, 1.0, {}),
                        m_estimator(EstimatorKind::MHuber, ScaleRule::InverseAspect, 1.0, {})};
      cfg.rho_grid = linspace(0.02, 1.0, 50);
      cfg.trials = 0;
      break;
    case Experiment::Estimate:
      cfg.estimators = {m_estimator(EstimatorKind::MTyler, ScaleRule::InverseAspect, 1.0, {})};
      cfg.trials = 0;
      break;
    case Experiment::Calibrate:
      cfg.estimators = {rscm,
                        m_estimator(EstimatorKind::MTyler, ScaleRule::InverseAspect, 1.0, {}),
                        m_estimator(EstimatorKind::MHuber, ScaleRule::InverseAspect, 1.0, {})};
      cfg.trials = 0;
      break;
  }
  return cfg;
}

ExperimentConfig parse_config(const std::string& yaml_text, Experiment e) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::ParserException& ex) {
    throw ParseError("config: " + ex.msg, static_cast<std::size_t>(ex.mark.line) + 1);
  }
  ExperimentConfig cfg = default_config(e);
  if (!root || root.IsNull()) {
    validate(cfg);
    return cfg;
  }
  check_keys(root,
             {"experiment", "N", "n", "cov_legit", "cov_outlier", "field", "estimators", "grids",
              "trials", "seed", "output", "solver", "normalize", "batches"},
             "the top level");

  if (const auto x = root["experiment"]) {
    const auto name = scalar<std::string>(x, "experiment");
    Experiment named;
    try {
      named = parse_experiment(name);
    } catch (const ParseError&) {
      fail(x, "unknown experiment '" + name + "'");
    }
    if (named != e) {
      fail(x, "config is for '" + name + "' but the subcommand is '" + experiment_name(e) + "'");
    }
  }
  if (const auto x = root["N"]) cfg.N = scalar<long long>(x, "N");
  if (const auto x = root["n"]) cfg.n = scalar<long long>(x, "n");
  if (const auto x = root["cov_legit"]) cfg.cov_legit = parse_covariance(x, "cov_legit");
  if (const auto x = root["cov_outlier"]) cfg.cov_outlier = parse_covariance(x, "cov_outlier");
  if (const auto x = root["field"]) {
    const auto f = scalar<std::string>(x, "field");
    if (f == "complex") {
      cfg.field = ScalarField::Complex;
    } else if (f == "real") {
      cfg.field = ScalarField::Real;
    } else {
      fail(x, "field must be 'complex' or 'real'");
    }
  }
  if (const auto x = root["estimators"]) {
    if (!x.IsSequence()) fail(x, "'estimators' must be a list");
    cfg.estimators.clear();
    for (const auto& item : x) cfg.estimators.push_back(parse_estimator(item));
    if (cfg.estimators.empty()) fail(x, "'estimators' is empty");
  }
  if (const auto x = root["grids"]) {
    check_keys(x, {"rho", "eps", "c"}, "'grids'");
    if (x["rho"]) cfg.rho_grid = parse_grid(x["rho"], "rho");
    if (x["eps"]) cfg.eps_grid = parse_grid(x["eps"], "eps");
    if (x["c"]) cfg.c_grid = parse_grid(x["c"], "c");
  }
  if (const auto x = root["trials"]) {
    cfg.trials = scalar<int>(x, "trials");
    if (cfg.trials < 0) fail(x, "trials must be >= 0");
  }
  if (const auto x = root["seed"]) cfg.seed = scalar<std::uint64_t>(x, "seed");
  if (const auto x = root["output"]) cfg.output = scalar<std::string>(x, "output");
  if (const auto x = root["normalize"]) cfg.normalize = scalar<bool>(x, "normalize");
  if (const auto x = root["batches"]) {
    cfg.batches = scalar<int>(x, "batches");
    if (cfg.batches < 2) fail(x, "batches must be >= 2");
  }
  if (const auto x = root["solver"]) {
    check_keys(x, {"tolerance", "max_iterations", "initializer"}, "'solver'");
    if (x["tolerance"]) {
      cfg.solver.tolerance = scalar<double>(x["tolerance"], "tolerance");
      if (!(cfg.solver.tolerance > 0.0)) fail(x["tolerance"], "tolerance must be positive");
    }
    if (x["max_iterations"]) {
      cfg.solver.max_iterations = scalar<int>(x["max_iterations"], "max_iterations");
      if (cfg.solver.max_iterations < 1) fail(x["max_iterations"], "max_iterations must be >= 1");
    }
    if (x["initializer"]) {
      const auto init = scalar<std::string>(x["initializer"], "initializer");
      if (init == "identity") {
        cfg.solver.initializer = Initializer::Identity;
      } else if (init == "scm") {
        cfg.solver.initializer = Initializer::SCM;
      } else {
        fail(x["initializer"], "initializer must be 'identity' or 'scm'");
      }
    }
  }
  validate(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::string& path, Experiment e) {
  std::ifstream in(path);
  if (!in) throw ParseError("config: cannot open " + path, 0);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), e);
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.N < 1 || cfg.n < 1) throw ParseError("config: N and n must be >= 1", 0);
  if (cfg.estimators.empty()) throw ParseError("config: 'estimators' is empty", 0);
  if (cfg.cov_legit.toeplitz && !(*cfg.cov_legit.toeplitz >= 0.0 && *cfg.cov_legit.toeplitz < 1.0)) {
    throw ParseError("config: cov_legit toeplitz coefficient must lie in [0, 1)", 0);
  }
  if (cfg.cov_outlier.toeplitz &&
      !(*cfg.cov_outlier.toeplitz >= 0.0 && *cfg.cov_outlier.toeplitz < 1.0)) {
    throw ParseError("config: cov_outlier toeplitz coefficient must lie in [0, 1)", 0);
  }
  switch (cfg.experiment) {
    case Experiment::LossCurve:
    case Experiment::ImiVsRho:
      check_grid(cfg.rho_grid, "rho", 0.0, 1.0, true, false);
      break;
    case Experiment::MiCurve:
      check_grid(cfg.eps_grid, "eps", 0.0, 1.0, false, true);
      break;
    case Experiment::ImiVsAspect:
      check_grid(cfg.c_grid, "c", 0.0, HUGE_VAL, true, true);
      break;
    case Experiment::Estimate:
      if (cfg.estimators.size() != 1) {
        throw ParseError("config: estimate takes exactly one estimator", 0);
      }
      break;
    case Experiment::Calibrate:
      break;
  }
  if ((cfg.experiment == Experiment::LossCurve || cfg.experiment == Experiment::MiCurve) &&
      cfg.trials < 1) {
    throw ParseError("config: trials must be >= 1 for " + experiment_name(cfg.experiment), 0);
  }
}

}  // namespace rmest::tools
