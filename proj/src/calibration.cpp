#include "rmest/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "rmest/asymptotics.hpp"
#include "rmest/errors.hpp"

namespace rmest {

double quadratic_loss(const Matrix& a, const Matrix& c) {
  if (a.rows() != c.rows() || a.cols() != c.cols()) {
    throw DomainError("quadratic_loss: dimension mismatch");
  }
  const double ta = normalized_trace(a);
  const double tc = normalized_trace(c);
  if (!(ta > 0.0) || !(tc > 0.0)) throw DomainError("quadratic_loss: traces must be positive");
  return (a / ta - c / tc).squaredNorm() / static_cast<double>(a.rows());
}

double quadratic_loss(const Matrix& a, const CovarianceModel& c) {
  return quadratic_loss(a, c.matrix());
}

double rho_to_rho_bar(const RegularizedContext& ctx, const CovarianceModel& cov) {
  const double rho = ctx.rho();
  if (!(rho > 0.0)) throw DomainError("rho_to_rho_bar: rho must lie in (0, 1]");
  if (rho == 1.0) return 1.0;
  const double v = solve_gamma(ctx, cov).v_gamma;
  return rho / ((1.0 - rho) * v + rho);
}

double rho_bar_to_rho(double rho_bar, const WeightFunction& weight, double c,
                      const CovarianceModel& cov) {
  if (!(rho_bar > 0.0 && rho_bar <= 1.0)) {
    throw DomainError("rho_bar_to_rho: rho_bar must lie in (0, 1]");
  }
  if (rho_bar == 1.0) return 1.0;
  const double lo = std::max(minimal_rho(weight, c), 0.0) + 1e-8;
  auto f = [&](double rho) {
    return rho_to_rho_bar(RegularizedContext(weight, rho, c), cov) - rho_bar;
  };

  constexpr int kGrid = 200;
  double a = lo;
  double fa = f(a);
  if (fa == 0.0) return a;
  for (int k = 1; k <= kGrid; ++k) {
    const double s = static_cast<double>(k) / kGrid;
    double b = lo + (1.0 - lo) * s * s;
    const double fb = f(b);
    if (fb == 0.0) return b;
    if ((fa < 0.0) != (fb < 0.0)) {
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (a + b);
        if (mid <= a || mid >= b) break;
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm < 0.0) == (fa < 0.0)) {
          a = mid;
          fa = fm;
        } else {
          b = mid;
        }
      }
      return std::abs(fa) <= std::abs(f(b)) ? a : b;
    }
    a = b;
    fa = fb;
  }
  std::ostringstream os;
  os << "rho_bar_to_rho: no solution for rho_bar = " << rho_bar << " on (" << lo << ", 1]";
  throw Error(os.str());
}

CalibrationReport oracle_optimum(double c, const CovarianceModel& cov) {
  if (!(c > 0.0)) throw DomainError("oracle_optimum: c must be positive");
  CalibrationReport r;
  r.m1 = cov.spectral_moment(1);
  r.m2 = cov.spectral_moment(2);
  if (!(r.m1 > 0.0)) throw DomainError("oracle_optimum: C has zero trace");
  const double m2 = r.m2 / (r.m1 * r.m1);
  if (m2 < 1.0 - 1e-12) {
    throw DomainError("oracle_optimum: second normalized moment below 1 violates Jensen");
  }
  if (m2 <= 1.0) {
    r.rho_star = 1.0;
    r.loss_star = 0.0;
    return r;
  }
  r.rho_star = c / (c + m2 - 1.0);
  r.loss_star = c * (m2 - 1.0) / (c + m2 - 1.0);
  return r;
}

double rho_hat_left_side(const EstimatorResult& fixed_point, double rho) {
  return rho / normalized_trace(fixed_point.estimate);
}

double rho_hat_target(const Dataset& data) {
  const Index dim = data.dimension();
  const Index n = data.size();
  if (n < 1 || dim < 1) throw DomainError("rho_hat_target: empty dataset");
  RealVector w(n);
  for (Index i = 0; i < n; ++i) {
    const double sq = data.samples.col(i).squaredNorm();
    if (!(sq > 0.0)) throw DomainError("rho_hat_target: zero sample");
    w(i) = static_cast<double>(dim) / sq;
  }
  Matrix s;
  kernels::weighted_gram(kernels::Policy::Parallel, data.samples, w,
                         1.0 / static_cast<double>(n), s);
  const double denom = s.squaredNorm() / static_cast<double>(dim) - 1.0;
  if (!(denom > 0.0)) return std::numeric_limits<double>::infinity();
  return data.aspect_ratio() / denom;
}

namespace {

struct Probe {
  double rho;
  double f;
  EstimatorResult fp;
};

}  // namespace

RhoHatResult estimate_rho_hat(const Dataset& data, const WeightFunction& weight,
                              const RhoHatOptions& options) {
  RhoHatResult out;
  out.contaminated_flag = options.suspected_contaminated;
  out.target = rho_hat_target(data);
  const double c = data.aspect_ratio();
  const double lower = std::max(minimal_rho(weight, c), options.lower_floor);
  const double target = out.target;

  auto solve = [&](double rho, const Probe* warm) {
    Probe p;
    p.rho = rho;
    p.fp = regularized_maronna(data, weight, rho, options.solver,
                               warm != nullptr ? &warm->fp.estimate : nullptr);
    ++out.evaluations;
    p.f = rho_hat_left_side(p.fp, rho) - target;
    return p;
  };

  Probe hi = solve(1.0, nullptr);
  if (hi.f <= 0.0) {
    // The left side equals 1 at rho = 1; a target at or above 1 puts the root at
    // (or past) the upper end.
    out.rho_hat = 1.0;
    out.boundary = hi.f < 0.0;
    if (out.boundary) out.diagnostic = "target >= 1: no root in the interior, rho_hat = 1";
    out.estimate = std::move(hi.fp);
    return out;
  }

  // Walk down towards the lower end until the left side drops below the target.
  std::optional<Probe> lo;
  for (int k = 1; out.evaluations < options.max_evaluations; ++k) {
    const double rho = lower + (1.0 - lower) * std::ldexp(1.0, -k);
    Probe p = solve(rho, &hi);
    if (p.f <= 0.0) {
      lo = std::move(p);
      break;
    }
    hi = std::move(p);
    if (rho - lower <= options.rho_tolerance) break;
  }
  if (!lo) {
    std::ostringstream os;
    os << "no sign change on (" << lower << ", 1]; returning the lowest evaluated rho";
    out.rho_hat = hi.rho;
    out.boundary = true;
    out.diagnostic = os.str();
    out.estimate = std::move(hi.fp);
    return out;
  }
  if (lo->f == 0.0) {
    out.rho_hat = lo->rho;
    out.estimate = std::move(lo->fp);
    return out;
  }

  // Illinois false position on [lo, hi] with f(lo) < 0 < f(hi).
  int side = 0;
  while (out.evaluations < options.max_evaluations &&
         hi.rho - lo->rho > options.rho_tolerance) {
    double x = hi.rho - hi.f * (hi.rho - lo->rho) / (hi.f - lo->f);
    const double width = hi.rho - lo->rho;
    if (!(x > lo->rho + 1e-3 * width && x < hi.rho - 1e-3 * width)) {
      x = 0.5 * (lo->rho + hi.rho);
    }
    const Probe& warm = (x - lo->rho < hi.rho - x) ? *lo : hi;
    Probe p = solve(x, &warm);
    if (p.f == 0.0) {
      lo = std::move(p);
      hi = *lo;
      break;
    }
    if (p.f < 0.0) {
      lo = std::move(p);
      if (side == -1) hi.f *= 0.5;
      side = -1;
    } else {
      hi = std::move(p);
      if (side == 1) lo->f *= 0.5;
      side = 1;
    }
  }
  // Report the endpoint nearer to the root by the (unscaled) residual.
  const double flo = std::abs(rho_hat_left_side(lo->fp, lo->rho) - target);
  const double fhi = std::abs(rho_hat_left_side(hi.fp, hi.rho) - target);
  Probe& best = flo <= fhi ? *lo : hi;
  out.rho_hat = best.rho;
  out.estimate = std::move(best.fp);
  if (hi.rho - lo->rho > options.rho_tolerance) {
    out.diagnostic = "evaluation cap reached before the bracket closed";
  }
  return out;
}

}  // namespace rmest
