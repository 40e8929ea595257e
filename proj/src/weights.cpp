#include "rmest/weights.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rmest/errors.hpp"

namespace rmest {

namespace {

constexpr double kKinkTolerance = 1e-12;

bool at_point(double x, double point) {
  return std::abs(x - point) <= kKinkTolerance * std::max(1.0, std::abs(point));
}

void require_nonnegative(double x, const char* where) {
  if (!(x >= 0.0)) {
    std::ostringstream os;
    os << where << ": argument must be >= 0, got " << x;
    throw DomainError(os.str());
  }
}

}  // namespace

WeightFunction::WeightFunction(WeightKind kind, double scale, double shape)
    : kind_(kind), scale_(scale), shape_(shape) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw DomainError("WeightFunction: scale K must be positive and finite");
  }
  if (!(shape > 0.0) || !std::isfinite(shape)) {
    throw DomainError("WeightFunction: shape t must be positive and finite");
  }
}

std::string WeightFunction::name() const {
  return kind_ == WeightKind::MTyler ? "MTyler" : "MHuber";
}

double WeightFunction::u(double x) const {
  require_nonnegative(x, "u");
  const double hyperbolic = (1.0 + shape_) / (shape_ + x);
  if (kind_ == WeightKind::MTyler) return scale_ * hyperbolic;
  return scale_ * std::min(1.0, hyperbolic);
}

double WeightFunction::u_derivative(double x, Side side) const {
  require_nonnegative(x, "u_derivative");
  const double slope = -scale_ * (1.0 + shape_) / ((shape_ + x) * (shape_ + x));
  if (kind_ == WeightKind::MTyler) return slope;
  if (at_point(x, 1.0)) {
    switch (side) {
      case Side::Left: return 0.0;
      case Side::Right: return slope;
      case Side::Both: throw KinkError("u_derivative: MHuber weight is not differentiable at x = 1");
    }
  }
  return x < 1.0 ? 0.0 : slope;
}

double WeightFunction::phi(double x) const { return x * u(x); }

double WeightFunction::phi_derivative(double x, Side side) const {
  return u(x) + x * u_derivative(x, side);
}

double WeightFunction::phi_inverse(double y) const {
  if (!(y >= 0.0) || !(y < phi_infinity())) {
    std::ostringstream os;
    os << "phi_inverse: argument must lie in [0, " << phi_infinity() << "), got " << y;
    throw DomainError(os.str());
  }
  if (kind_ == WeightKind::MHuber && y <= scale_) return y / scale_;
  return y * shape_ / (phi_infinity() - y);
}

RegularizedContext::RegularizedContext(const WeightFunction& weight, double rho, double c)
    : weight_(weight), rho_(rho), c_(c), load_((1.0 - rho) * c) {
  if (!(rho >= 0.0 && rho <= 1.0)) {
    throw DomainError("RegularizedContext: rho must lie in [0, 1]");
  }
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw DomainError("RegularizedContext: aspect ratio c must be positive");
  }
  if (!(load_ * weight.phi_infinity() < 1.0)) {
    std::ostringstream os;
    os << "RegularizedContext: (1 - rho) phi_inf c = " << load_ * weight.phi_infinity()
       << " must be < 1 (rho=" << rho << ", c=" << c << ", phi_inf=" << weight.phi_infinity()
       << ")";
    throw AdmissibilityError(os.str());
  }
}

double RegularizedContext::g(double x) const {
  require_nonnegative(x, "g");
  return x / (1.0 - load_ * weight_.phi(x));
}

double RegularizedContext::g_derivative(double x, Side side) const {
  require_nonnegative(x, "g_derivative");
  const double denom = 1.0 - load_ * weight_.phi(x);
  return (denom + load_ * x * weight_.phi_derivative(x, side)) / (denom * denom);
}

double RegularizedContext::g_inverse(double y) const {
  require_nonnegative(y, "g_inverse");
  if (y == 0.0 || load_ == 0.0) return y;
  // x <= g(x) <= x / (1 - load phi_inf) brackets the root.
  double lo = y * (1.0 - load_ * weight_.phi_infinity());
  double hi = y;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (g(mid) < y) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return std::abs(g(lo) - y) <= std::abs(g(hi) - y) ? lo : hi;
}

double RegularizedContext::v(double x) const { return weight_.u(g_inverse(x)); }

double RegularizedContext::v_approximate(double x) const {
  require_nonnegative(x, "v_approximate");
  const double s = shrink_slope();
  const double k = weight_.scale();
  const double t = weight_.shape();
  if (weight_.kind() == WeightKind::MHuber && s * x <= 1.0) return k;
  return k * (1.0 + t) / (t + s * x);
}

double RegularizedContext::v_kink(DerivativeMode mode) const {
  return mode == DerivativeMode::Exact ? g(1.0) : 1.0 / shrink_slope();
}

double RegularizedContext::v_derivative(double x, DerivativeMode mode, Side side) const {
  require_nonnegative(x, "v_derivative");
  const bool huber = weight_.kind() == WeightKind::MHuber;
  if (mode == DerivativeMode::Approximate) {
    const double s = shrink_slope();
    const double k = weight_.scale();
    const double t = weight_.shape();
    const double slope = -k * (1.0 + t) * s / ((t + s * x) * (t + s * x));
    if (!huber) return slope;
    if (at_point(x, 1.0 / s)) {
      switch (side) {
        case Side::Left: return 0.0;
        case Side::Right: return slope;
        case Side::Both:
          throw KinkError("v_derivative: approximate MHuber v is not differentiable at x = 1/s");
      }
    }
    return s * x < 1.0 ? 0.0 : slope;
  }
  const double preimage = g_inverse(x);
  Side effective = side;
  if (huber && side == Side::Both && at_point(preimage, 1.0)) {
    throw KinkError("v_derivative: MHuber v is not differentiable at g(1)");
  }
  if (!huber) effective = Side::Both;
  return weight_.u_derivative(preimage, effective) / g_derivative(preimage, effective);
}

double minimal_rho(const WeightFunction& weight, double c) {
  return std::max(0.0, 1.0 - 1.0 / (c * weight.phi_infinity()));
}

}  // namespace rmest
