#include "rmest/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rmest/errors.hpp"

namespace rmest {

namespace {

constexpr int kMaxIterations = 10000;
constexpr double kUpdateTolerance = 1e-12;

bool same_matrix(const CovarianceModel& a, const CovarianceModel& b) {
  return a.dimension() == b.dimension() && a.matrix() == b.matrix();
}

void require_nondegenerate(const CovarianceModel& cov, const char* name) {
  if (!(cov.max_eigenvalue() > 0.0)) {
    throw DomainError(std::string(name) + ": covariance spectrum is degenerate (all zero)");
  }
}

void require_noreg_regime(const WeightFunction& weight, double c, const char* name) {
  const double phi_inf = weight.phi_infinity();
  if (!(c > 0.0 && c < 1.0) || !(phi_inf > 1.0) || !(phi_inf < 1.0 / c)) {
    std::ostringstream os;
    os << name << ": requires 0 < c < 1 and 1 < phi_inf < 1/c (c=" << c
       << ", phi_inf=" << phi_inf << ")";
    throw PreconditionViolation(os.str());
  }
}

/// Lower Cholesky factor of C; DomainError when C is not positive definite.
Matrix cholesky_factor(const CovarianceModel& cov, const char* name) {
  Eigen::LLT<Matrix> llt(cov.matrix());
  if (llt.info() != Eigen::Success || !(cov.min_eigenvalue() > 0.0)) {
    throw DomainError(std::string(name) + ": C must be positive definite");
  }
  return llt.matrixL();
}

/// Eigenvalues of C^{-1/2} D C^{-1/2} (ascending).
RealVector relative_eigenvalues(const CovarianceModel& cov, const CovarianceModel& outlier,
                                const char* name) {
  const Matrix lower = cholesky_factor(cov, name);
  const auto tri = lower.triangularView<Eigen::Lower>();
  Matrix x = tri.solve(outlier.matrix());
  x = tri.solve(x.adjoint().eval()).eval();
  symmetrize(x);
  return hermitian_eigenvalues(x).cwiseMax(0.0);
}

/// diag(U^H D U) for the eigenvectors U of C.
RealVector outlier_diagonal(const CovarianceModel& cov, const CovarianceModel& outlier) {
  const Matrix& u = cov.eigenvectors();
  return (u.adjoint() * outlier.matrix() * u).diagonal().real();
}

/// Both equation residuals with B assembled and factorized explicitly. Used as
/// the final plug-back check of every coupled solve, independently of the
/// representation the iteration ran in.
std::vector<double> coupled_plug_back(const RegularizedContext& ctx, double eps,
                                      const CovarianceModel& cov,
                                      const CovarianceModel& outlier, double gamma,
                                      double alpha) {
  const double p = 1.0 - ctx.rho();
  Matrix b = (p * (1.0 - eps) * interference_weight(ctx, gamma)) * cov.matrix() +
             (p * eps * interference_weight(ctx, alpha)) * outlier.matrix();
  b.diagonal().array() += ctx.rho();
  Eigen::LLT<Matrix> llt(b);
  if (llt.info() != Eigen::Success) {
    throw SingularIterate("coupled system: B is not positive definite");
  }
  const double n = static_cast<double>(cov.dimension());
  const double h0 = llt.solve(cov.matrix()).trace().real() / n;
  const double h1 = llt.solve(outlier.matrix()).trace().real() / n;
  return {std::abs(gamma - h0), std::abs(alpha - h1)};
}

/// (h0, h1)(q) for the regularized system, B = a C + b D + rho I.
class MatrixInterference {
 public:
  MatrixInterference(const CovarianceModel& cov, const CovarianceModel& outlier, double rho)
      : real_(cov.real() && outlier.real()), rho_(rho),
        n_(static_cast<double>(cov.dimension())) {
    if (real_) {
      c_real_ = cov.matrix().real();
      d_real_ = outlier.matrix().real();
    } else {
      c_ = cov.matrix();
      d_ = outlier.matrix();
    }
  }

  std::pair<double, double> operator()(double a, double b) const {
    return real_ ? evaluate(c_real_, d_real_, a, b) : evaluate(c_, d_, a, b);
  }

 private:
  template <class M>
  std::pair<double, double> evaluate(const M& c, const M& d, double a, double b) const {
    M mat = a * c + b * d;
    mat.diagonal().array() += rho_;
    Eigen::LLT<M> llt(mat);
    if (llt.info() != Eigen::Success) {
      throw SingularIterate("coupled system: B is not positive definite");
    }
    const M inv = llt.solve(M::Identity(c.rows(), c.cols()));
    // tr(B^{-1} X) = sum_ij (B^{-1})_ij X_ji, X Hermitian.
    const double h0 = std::real(inv.cwiseProduct(c.transpose()).sum()) / n_;
    const double h1 = std::real(inv.cwiseProduct(d.transpose()).sum()) / n_;
    return {h0, h1};
  }

  bool real_;
  double rho_;
  double n_;
  Matrix c_, d_;
  RealMatrix c_real_, d_real_;
};

/// (h0, h1)(q) for rho = 0 through the eigenvalues a_i of C^{-1/2} D C^{-1/2}:
/// h0 = (1/N) sum 1/(A + B a_i), h1 = (1/N) sum a_i/(A + B a_i).
class SpectralInterference {
 public:
  explicit SpectralInterference(RealVector relative) : a_(std::move(relative)) {}

  std::pair<double, double> operator()(double a, double b) const {
    const Eigen::ArrayXd denom = a + b * a_.array();
    return {(1.0 / denom).mean(), (a_.array() / denom).mean()};
  }

 private:
  RealVector a_;
};

template <class H>
AsymptoticState iterate_coupled(const RegularizedContext& ctx, double eps, const H& h,
                                double gamma, double alpha) {
  const double p = 1.0 - ctx.rho();
  AsymptoticState st;
  double previous = HUGE_VAL;
  for (int it = 1; it <= kMaxIterations; ++it) {
    const auto [h0, h1] = h(p * (1.0 - eps) * interference_weight(ctx, gamma),
                            p * eps * interference_weight(ctx, alpha));
    const double update = std::max(std::abs(h0 - gamma), std::abs(h1 - alpha));
    st.update_history.push_back(update);
    st.iterations = it;
    if (update > previous) {
      // Oscillation: fall back to a half step.
      gamma = 0.5 * (gamma + h0);
      alpha = 0.5 * (alpha + h1);
    } else {
      gamma = h0;
      alpha = h1;
    }
    previous = update;
    if (update <= kUpdateTolerance) {
      st.gamma = gamma;
      st.alpha = alpha;
      return st;
    }
  }
  throw NonConvergence("coupled system: interference iteration did not converge",
                       st.iterations, st.update_history.back());
}

void finish_state(AsymptoticState& st, const RegularizedContext& ctx, double eps) {
  st.rho = ctx.rho();
  st.c = ctx.c();
  st.eps = eps;
  st.v_gamma = ctx.v(st.gamma);
  if (st.alpha) st.v_alpha = ctx.v(*st.alpha);
}

/// Smallest alpha with (1/N) sum_i 1/(1 - eps + eps a_i/alpha) = 1. The left side
/// increases in alpha and crosses 1 between min a_i and max a_i.
double balance_ratio(const RealVector& relative, double eps) {
  auto f = [&](double alpha) {
    return (1.0 / ((1.0 - eps) + eps * relative.array() / alpha)).mean() - 1.0;
  };
  double lo = relative.minCoeff();
  double hi = relative.maxCoeff();
  if (!(lo > 0.0)) throw DomainError("coupled system: D must be positive definite when rho = 0");
  if (hi - lo <= 1e-15 * hi) return lo;
  for (int k = 0; k < 300; ++k) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

AsymptoticState solve_noreg_impl(const RegularizedContext& ctx, double eps,
                                 const CovarianceModel& cov, const CovarianceModel& outlier) {
  if (eps == 0.0 || same_matrix(cov, outlier)) {
    const EpsZeroLimits lim = limits_eps_zero_noreg(ctx.weight(), ctx.c(), cov, outlier);
    AsymptoticState st;
    st.gamma = lim.gamma0;
    st.alpha = same_matrix(cov, outlier) ? lim.gamma0 : lim.alpha0;
    st.residuals = coupled_plug_back(ctx, eps, cov, outlier, st.gamma, *st.alpha);
    finish_state(st, ctx, eps);
    return st;
  }
  const RealVector relative = relative_eigenvalues(cov, outlier, "solve_gamma_alpha_noreg");
  // Feasible start q = Q (1, alpha0): with f(Q), f(Q alpha0) >= 1 every component
  // of h(q) is bounded by the matching component of q.
  const double alpha0 = balance_ratio(relative, eps);
  const double gamma_unit = ctx.weight().phi_inverse(1.0) / (1.0 - ctx.c());
  const double scale = gamma_unit / std::min(1.0, alpha0) * (1.0 + 1e-9);
  AsymptoticState st = iterate_coupled(ctx, eps, SpectralInterference(relative), scale,
                                       scale * alpha0);
  st.residuals = coupled_plug_back(ctx, eps, cov, outlier, st.gamma, *st.alpha);
  finish_state(st, ctx, eps);
  return st;
}

}  // namespace

double AsymptoticState::max_residual() const {
  double r = 0.0;
  for (double x : residuals) r = std::max(r, x);
  return r;
}

double interference_weight(const RegularizedContext& ctx, double x) {
  const double v = ctx.v(x);
  return v / (1.0 + (1.0 - ctx.rho()) * ctx.c() * x * v);
}

double gamma_residual(const RegularizedContext& ctx, const CovarianceModel& cov, double gamma) {
  const double b = (1.0 - ctx.rho()) * interference_weight(ctx, gamma);
  const RealVector& l = cov.eigenvalues();
  return gamma - (l.array() / (b * l.array() + ctx.rho())).mean();
}

AsymptoticState solve_gamma(const RegularizedContext& ctx, const CovarianceModel& cov) {
  require_nondegenerate(cov, "solve_gamma");
  const double rho = ctx.rho();
  const RealVector& l = cov.eigenvalues();
  AsymptoticState st;
  if (rho == 1.0) {
    st.gamma = l.mean();
  } else if (rho == 0.0) {
    require_noreg_regime(ctx.weight(), ctx.c(), "solve_gamma");
    if (!(cov.min_eigenvalue() > 0.0)) {
      throw DomainError("solve_gamma: C must be positive definite when rho = 0");
    }
    st.gamma = ctx.weight().phi_inverse(1.0) / (1.0 - ctx.c());
  } else {
    const WeightFunction& w = ctx.weight();
    auto f = [&](double gamma) {
      const double a = (1.0 - rho) * w.phi(ctx.g_inverse(gamma));
      return (l.array() / (a * l.array() + rho * gamma)).mean() - 1.0;
    };
    double lo = 1e-12;
    double hi = cov.max_eigenvalue() / rho + 1.0;
    const double f_lo = f(lo);
    const double f_hi = f(hi);
    if (!(f_lo > 0.0 && f_hi < 0.0)) {
      std::ostringstream os;
      os << "solve_gamma: no sign change on [" << lo << ", " << hi << "] (" << f_lo << ", "
         << f_hi << ")";
      throw Error(os.str());
    }
    int it = 0;
    for (; it < 400; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      (f(mid) > 0.0 ? lo : hi) = mid;
    }
    st.iterations = it;
    st.gamma = std::abs(gamma_residual(ctx, cov, lo)) <= std::abs(gamma_residual(ctx, cov, hi))
                   ? lo
                   : hi;
  }
  st.residuals = {std::abs(gamma_residual(ctx, cov, st.gamma))};
  finish_state(st, ctx, 0.0);
  return st;
}

AsymptoticState solve_gamma_alpha_noreg(const WeightFunction& weight, double c, double eps,
                                        const CovarianceModel& cov,
                                        const CovarianceModel& outlier) {
  require_noreg_regime(weight, c, "solve_gamma_alpha_noreg");
  if (!(eps >= 0.0 && eps < 1.0)) {
    throw DomainError("solve_gamma_alpha_noreg: eps must lie in [0, 1)");
  }
  if (cov.dimension() != outlier.dimension()) {
    throw DomainError("solve_gamma_alpha_noreg: C and D dimensions differ");
  }
  return solve_noreg_impl(RegularizedContext(weight, 0.0, c), eps, cov, outlier);
}

AsymptoticState solve_gamma_alpha_reg(const RegularizedContext& ctx, double eps,
                                      const CovarianceModel& cov,
                                      const CovarianceModel& outlier) {
  if (!(eps >= 0.0 && eps < 1.0)) {
    throw DomainError("solve_gamma_alpha_reg: eps must lie in [0, 1)");
  }
  if (cov.dimension() != outlier.dimension()) {
    throw DomainError("solve_gamma_alpha_reg: C and D dimensions differ");
  }
  if (ctx.rho() == 0.0) {
    require_noreg_regime(ctx.weight(), ctx.c(), "solve_gamma_alpha_reg");
    return solve_noreg_impl(ctx, eps, cov, outlier);
  }
  require_nondegenerate(cov, "solve_gamma_alpha_reg");

  AsymptoticState st;
  if (eps == 0.0 || same_matrix(cov, outlier)) {
    st = solve_gamma(ctx, cov);
    st.alpha = same_matrix(cov, outlier) ? st.gamma : limits_eps_zero_reg(ctx, cov, outlier).alpha0;
  } else {
    const double rho = ctx.rho();
    // q0 = ((1/N) tr C, (1/N) tr D) / rho is feasible since B >= rho I.
    st = iterate_coupled(ctx, eps, MatrixInterference(cov, outlier, rho),
                         normalized_trace(cov.matrix()) / rho,
                         normalized_trace(outlier.matrix()) / rho);
  }
  st.residuals = coupled_plug_back(ctx, eps, cov, outlier, st.gamma, *st.alpha);
  finish_state(st, ctx, eps);
  return st;
}

double trace_ratio(const CovarianceModel& cov, const CovarianceModel& outlier) {
  if (cov.dimension() != outlier.dimension()) {
    throw DomainError("trace_ratio: C and D dimensions differ");
  }
  const Matrix lower = cholesky_factor(cov, "trace_ratio");
  const auto tri = lower.triangularView<Eigen::Lower>();
  const Matrix x = tri.solve(outlier.matrix());
  const Matrix y = tri.adjoint().solve(x);
  return y.trace().real() / static_cast<double>(cov.dimension());
}

EpsZeroLimits limits_eps_zero_noreg(const WeightFunction& weight, double c,
                                    const CovarianceModel& cov,
                                    const CovarianceModel& outlier) {
  require_noreg_regime(weight, c, "limits_eps_zero_noreg");
  EpsZeroLimits lim;
  lim.gamma0 = weight.phi_inverse(1.0) / (1.0 - c);
  lim.alpha0 = same_matrix(cov, outlier) ? lim.gamma0 : lim.gamma0 * trace_ratio(cov, outlier);
  return lim;
}

EpsZeroLimits limits_eps_zero_reg(const RegularizedContext& ctx, const CovarianceModel& cov,
                                  const CovarianceModel& outlier) {
  if (ctx.rho() == 0.0) return limits_eps_zero_noreg(ctx.weight(), ctx.c(), cov, outlier);
  if (cov.dimension() != outlier.dimension()) {
    throw DomainError("limits_eps_zero_reg: C and D dimensions differ");
  }
  EpsZeroLimits lim;
  lim.gamma0 = solve_gamma(ctx, cov).gamma;
  if (same_matrix(cov, outlier)) {
    lim.alpha0 = lim.gamma0;
    return lim;
  }
  const double b = (1.0 - ctx.rho()) * interference_weight(ctx, lim.gamma0);
  const RealVector diag = outlier_diagonal(cov, outlier);
  lim.alpha0 = (diag.array() / (b * cov.eigenvalues().array() + ctx.rho())).mean();
  return lim;
}

namespace {

void check_state_matches(const Dataset& data, const AsymptoticState& state, const char* name) {
  const double c = data.aspect_ratio();
  if (std::abs(c - state.c) > 1e-12 * std::max(1.0, c)) {
    std::ostringstream os;
    os << name << ": dataset aspect ratio " << c << " does not match state c = " << state.c;
    throw DomainError(os.str());
  }
}

}  // namespace

Matrix equivalent_clean(const Dataset& data, const AsymptoticState& state) {
  check_state_matches(data, state, "equivalent_clean");
  const double n = static_cast<double>(data.size());
  Matrix s = ((1.0 - state.rho) * state.v_gamma / n) * (data.samples * data.samples.adjoint());
  s.diagonal().array() += state.rho;
  symmetrize(s);
  return s;
}

Matrix equivalent_contaminated(const Dataset& data, const AsymptoticState& state) {
  check_state_matches(data, state, "equivalent_contaminated");
  if (data.n_outlier != outlier_count(data.size(), state.eps)) {
    throw DomainError("equivalent_contaminated: dataset partition does not match state eps");
  }
  if (data.n_outlier > 0 && !state.v_alpha) {
    throw DomainError("equivalent_contaminated: state carries no alpha");
  }
  const double n = static_cast<double>(data.size());
  const auto legit = data.legit();
  Matrix s = ((1.0 - state.rho) * state.v_gamma / n) * (legit * legit.adjoint());
  if (data.n_outlier > 0) {
    const auto out = data.outliers();
    s += ((1.0 - state.rho) * *state.v_alpha / n) * (out * out.adjoint());
  }
  s.diagonal().array() += state.rho;
  symmetrize(s);
  return s;
}

}  // namespace rmest
