#include "rmest/robustness.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <sstream>

#include "rmest/asymptotics.hpp"
#include "rmest/errors.hpp"

namespace rmest {

namespace {

void require_normalized(const CovarianceModel& m, const char* name) {
  if (!m.trace_normalized()) {
    throw DomainError(std::string(name) + ": covariance must satisfy (1/N) tr = 1");
  }
}

double difference_norm(const CovarianceModel& cov, const CovarianceModel& outlier,
                       const char* name) {
  if (cov.dimension() != outlier.dimension()) {
    throw DomainError(std::string(name) + ": C and D dimensions differ");
  }
  require_normalized(cov, name);
  require_normalized(outlier, name);
  return spectral_norm(cov.matrix() - outlier.matrix());
}

Matrix shifted(const CovarianceModel& m) {
  Matrix x = m.matrix();
  x.diagonal().array() -= 1.0;
  return x;
}

}  // namespace

WeightFunction EstimatorSpec::weight() const {
  switch (kind) {
    case EstimatorKind::MTyler:
      return WeightFunction::tyler(scale, shape);
    case EstimatorKind::MHuber:
      return WeightFunction::huber(scale, shape);
    default:
      throw DomainError("EstimatorSpec: " + name() + " has no weight function");
  }
}

std::string EstimatorSpec::name() const {
  switch (kind) {
    case EstimatorKind::SCM:
      return "SCM";
    case EstimatorKind::RSCM:
      return "RSCM";
    case EstimatorKind::MTyler:
      return "MTyler";
    case EstimatorKind::MHuber:
      return "MHuber";
  }
  return "unknown";
}

EstimatorResult run_estimator(const EstimatorSpec& spec, const Dataset& data,
                              const SolverOptions& options) {
  if (spec.is_m_estimator()) {
    return spec.rho == 0.0 ? maronna(data, spec.weight(), options)
                           : regularized_maronna(data, spec.weight(), spec.rho, options);
  }
  EstimatorResult r;
  r.estimate = spec.kind == EstimatorKind::RSCM ? rscm(data, spec.rho) : scm(data);
  r.converged = true;
  return r;
}

std::uint64_t trial_seed(std::uint64_t base, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(base), static_cast<std::uint32_t>(base >> 32),
                    static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

MonteCarloInfluence mi_empirical(const EstimatorSpec& spec, const CovarianceModel& cov_in,
                                 const CovarianceModel& outlier_in, double eps,
                                 const MonteCarloOptions& options) {
  if (!(eps >= 0.0 && eps < 1.0)) throw DomainError("mi_empirical: eps must lie in [0, 1)");
  if (options.trials < 1) throw DomainError("mi_empirical: trials must be >= 1");
  if (cov_in.dimension() != outlier_in.dimension()) {
    throw DomainError("mi_empirical: C and D dimensions differ");
  }
  const CovarianceModel cov = options.auto_normalize ? cov_in.normalized() : cov_in;
  const CovarianceModel outlier = options.auto_normalize ? outlier_in.normalized() : outlier_in;
  require_normalized(cov, "mi_empirical");
  require_normalized(outlier, "mi_empirical");

  SolverOptions solver = options.solver;
  solver.throw_on_failure = false;

  const int trials = options.trials;
  std::vector<Matrix> diffs(static_cast<std::size_t>(trials));
  std::vector<char> ok(static_cast<std::size_t>(trials), 0);

#pragma omp parallel for schedule(dynamic)
  for (int k = 0; k < trials; ++k) {
    const std::uint64_t s = trial_seed(options.seed, static_cast<std::uint64_t>(k));
    try {
      const Dataset clean = sample_clean(cov, options.samples, s, options.sampling);
      const Dataset dirty =
          sample_contaminated(cov, outlier, options.samples, eps, s, options.sampling);
      const EstimatorResult a = run_estimator(spec, clean, solver);
      const EstimatorResult b = run_estimator(spec, dirty, solver);
      if (a.converged && b.converged) {
        diffs[k] = trace_normalize(a.estimate) - trace_normalize(b.estimate);
        ok[k] = 1;
      }
    } catch (const Error&) {
      // Counted as a failure below.
    }
  }

  MonteCarloInfluence out;
  std::vector<int> good;
  for (int k = 0; k < trials; ++k) {
    if (ok[k]) good.push_back(k);
  }
  out.trials = static_cast<int>(good.size());
  out.failures = trials - out.trials;
  if (good.empty()) {
    out.value = std::numeric_limits<double>::quiet_NaN();
    out.standard_error = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  const Index dim = cov.dimension();
  Matrix total = Matrix::Zero(dim, dim);
  for (int k : good) total += diffs[k];
  total /= static_cast<double>(good.size());
  symmetrize(total);
  out.value = spectral_norm(total);

  const int batches = std::min<int>(options.batches, static_cast<int>(good.size()));
  if (batches < 2) {
    out.standard_error = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  std::vector<double> values;
  const std::size_t per = good.size() / static_cast<std::size_t>(batches);
  for (int b = 0; b < batches; ++b) {
    const std::size_t first = static_cast<std::size_t>(b) * per;
    const std::size_t last = b + 1 == batches ? good.size() : first + per;
    Matrix m = Matrix::Zero(dim, dim);
    for (std::size_t i = first; i < last; ++i) m += diffs[good[i]];
    m /= static_cast<double>(last - first);
    symmetrize(m);
    values.push_back(spectral_norm(m));
  }
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= batches;
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= batches - 1;
  out.standard_error = std::sqrt(var / batches);
  return out;
}

double mi_scm(double eps, const CovarianceModel& cov, const CovarianceModel& outlier) {
  return eps * difference_norm(cov, outlier, "mi_scm");
}

double imi_scm(const CovarianceModel& cov, const CovarianceModel& outlier) {
  return difference_norm(cov, outlier, "imi_scm");
}

double mi_rscm(double rho, double eps, const CovarianceModel& cov,
               const CovarianceModel& outlier) {
  return (1.0 - rho) * eps * difference_norm(cov, outlier, "mi_rscm");
}

double imi_rscm(double rho, const CovarianceModel& cov, const CovarianceModel& outlier) {
  return (1.0 - rho) * difference_norm(cov, outlier, "imi_rscm");
}

bool noreg_in_regime(const WeightFunction& weight, double c) {
  const double phi_inf = weight.phi_infinity();
  return c > 0.0 && c < 1.0 && phi_inf > 1.0 && phi_inf < 1.0 / c;
}

double mi_asymptotic_noreg(const WeightFunction& weight, double c, double eps,
                           const CovarianceModel& cov, const CovarianceModel& outlier) {
  const double norm = difference_norm(cov, outlier, "mi_asymptotic_noreg");
  if (eps == 0.0 || norm == 0.0) {
    if (!noreg_in_regime(weight, c)) {
      throw PreconditionViolation("mi_asymptotic_noreg: outside the unregularized regime");
    }
    return 0.0;
  }
  const AsymptoticState st = solve_gamma_alpha_noreg(weight, c, eps, cov, outlier);
  const double va = *st.v_alpha;
  return eps * va / ((1.0 - eps) * st.v_gamma + eps * va) * norm;
}

double mi_asymptotic_reg(const RegularizedContext& ctx, double eps, const CovarianceModel& cov,
                         const CovarianceModel& outlier) {
  const double rho = ctx.rho();
  if (rho == 0.0) return mi_asymptotic_noreg(ctx.weight(), ctx.c(), eps, cov, outlier);
  const double norm = difference_norm(cov, outlier, "mi_asymptotic_reg");
  if (rho == 1.0 || eps == 0.0 || norm == 0.0) return 0.0;

  const AsymptoticState st = solve_gamma_alpha_reg(ctx, eps, cov, outlier);
  const double v0 = solve_gamma(ctx, cov).v_gamma;
  const double vg = st.v_gamma;
  const double va = *st.v_alpha;
  const double p = 1.0 - rho;
  const Matrix c_shift = shifted(cov);
  const Matrix d_shift = shifted(outlier);
  Matrix u = (p * rho) * (((1.0 - eps) * vg - v0) * c_shift + (eps * va) * d_shift) +
             (p * p * eps * v0 * va) * (outlier.matrix() - cov.matrix());
  symmetrize(u);
  const double v = (p * (1.0 - eps) * vg + p * eps * va + rho) * (p * v0 + rho);
  return spectral_norm(u) / v;
}

ImiResult imi_noreg(const WeightFunction& weight, double c, const CovarianceModel& cov,
                    const CovarianceModel& outlier, ImiMode mode) {
  const double norm = difference_norm(cov, outlier, "imi_noreg");
  const EpsZeroLimits lim = limits_eps_zero_noreg(weight, c, cov, outlier);
  const RegularizedContext ctx(weight, 0.0, c);
  ImiResult r;
  r.gamma0 = lim.gamma0;
  r.alpha0 = lim.alpha0;
  if (mode == ImiMode::SmallT) {
    r.value = ctx.v_approximate(lim.alpha0) / ctx.v_approximate(lim.gamma0) * norm;
  } else {
    r.value = ctx.v(lim.alpha0) / ctx.v(lim.gamma0) * norm;
  }
  return r;
}

double dgamma_deps(const RegularizedContext& ctx, const CovarianceModel& cov,
                   const CovarianceModel& outlier, double gamma0, double alpha0,
                   DerivativeMode mode, Side side) {
  const double rho = ctx.rho();
  const double p = 1.0 - rho;
  const double c = ctx.c();
  const double v0 = ctx.v(gamma0);
  const double k0 = interference_weight(ctx, gamma0);
  const double ka = interference_weight(ctx, alpha0);
  const double dv = ctx.v_derivative(gamma0, mode, side);
  const double denom = 1.0 + p * c * gamma0 * v0;
  const double dk = (dv - p * c * v0 * v0) / (denom * denom);

  // Traces of A^{-1} C A^{-1} C and A^{-1} C A^{-1} D, A = p k0 C + rho I, in C's eigenbasis.
  const double b = p * k0;
  const Eigen::ArrayXd l = cov.eigenvalues().array();
  const Eigen::ArrayXd dd =
      (cov.eigenvectors().adjoint() * outlier.matrix() * cov.eigenvectors()).diagonal().real();
  const Eigen::ArrayXd a2 = (b * l + rho).square();
  const double t_cc = (l.square() / a2).mean();
  const double t_cd = (l * dd / a2).mean();
  return p * (k0 * t_cc - ka * t_cd) / (1.0 + p * dk * t_cc);
}

ImiResult imi_reg(const RegularizedContext& ctx, const CovarianceModel& cov,
                  const CovarianceModel& outlier, ImiMode mode) {
  const double rho = ctx.rho();
  if (rho == 0.0) return imi_noreg(ctx.weight(), ctx.c(), cov, outlier, mode);
  const double norm = difference_norm(cov, outlier, "imi_reg");
  ImiResult r;
  if (rho == 1.0) return r;

  const EpsZeroLimits lim = limits_eps_zero_reg(ctx, cov, outlier);
  r.gamma0 = lim.gamma0;
  r.alpha0 = lim.alpha0;
  if (norm == 0.0) return r;

  const DerivativeMode dmode =
      mode == ImiMode::Exact ? DerivativeMode::Exact : DerivativeMode::Approximate;
  Side side = Side::Both;
  if (ctx.weight().has_kink()) {
    const double kink = ctx.v_kink(dmode);
    if (std::abs(lim.gamma0 - kink) <= 1e-9 * kink) {
      side = Side::Right;
      r.one_sided = true;
      std::ostringstream os;
      os << "gamma0 = " << lim.gamma0 << " sits on the MHuber kink; using the right derivative";
      r.warnings.push_back(os.str());
    }
  }
  r.dgamma_deps = dgamma_deps(ctx, cov, outlier, lim.gamma0, lim.alpha0, dmode, side);

  const double p = 1.0 - rho;
  const double v0 = ctx.v(lim.gamma0);
  const double va = ctx.v(lim.alpha0);
  const double dv0 = ctx.v_derivative(lim.gamma0, dmode, side) * r.dgamma_deps;
  Matrix g = (p * rho) * ((dv0 - v0) * shifted(cov) + va * shifted(outlier)) +
             (p * p * v0 * va) * (outlier.matrix() - cov.matrix());
  symmetrize(g);
  const double scale = p * v0 + rho;
  r.value = spectral_norm(g) / (scale * scale);
  return r;
}

}  // namespace rmest
