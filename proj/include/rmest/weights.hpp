#pragma once

#include <string>

namespace rmest {

enum class WeightKind { MTyler, MHuber };

/// Which side of the Huber kink a derivative is taken on. `Both` means the
/// caller expects a two-sided derivative and gets a KinkError at the kink.
enum class Side { Both, Left, Right };

/// `Approximate` uses the small-t closed form of v; `Exact` differentiates
/// v = u o g^{-1} through the chain rule at the exact g^{-1}.
enum class DerivativeMode { Approximate, Exact };

/// Bounded weight function of an M-estimator of scatter.
///
///   MTyler: u(x) = K (1 + t) / (t + x)
///   MHuber: u(x) = K min{1, (1 + t) / (t + x)}
///
/// Both satisfy u >= 0 nonincreasing and bounded, phi(x) = x u(x) strictly
/// increasing with supremum phi_inf = K (1 + t). Immutable.
class WeightFunction {
 public:
  WeightFunction(WeightKind kind, double scale, double shape);

  static WeightFunction tyler(double scale, double shape) {
    return {WeightKind::MTyler, scale, shape};
  }
  static WeightFunction huber(double scale, double shape) {
    return {WeightKind::MHuber, scale, shape};
  }

  WeightKind kind() const noexcept { return kind_; }
  double scale() const noexcept { return scale_; }
  double shape() const noexcept { return shape_; }
  std::string name() const;

  double u(double x) const;
  /// du/dx. MHuber is not differentiable at x = 1; `side` selects the branch there.
  double u_derivative(double x, Side side = Side::Both) const;

  double phi(double x) const;
  double phi_derivative(double x, Side side = Side::Both) const;
  double phi_infinity() const noexcept { return scale_ * (1.0 + shape_); }
  /// Inverse of phi on [0, phi_inf). Closed form on both families.
  double phi_inverse(double y) const;

  /// Location of the non-differentiable point of u (MHuber only; x = 1).
  bool has_kink() const noexcept { return kind_ == WeightKind::MHuber; }

 private:
  WeightKind kind_;
  double scale_;
  double shape_;
};

/// (rho, c) pair together with the weight it is applied to. Admissibility
/// (1 - rho) phi_inf c < 1 is checked once here; rho = 0 is accepted and
/// yields the non-regularized g(x) = x / (1 - c phi(x)).
class RegularizedContext {
 public:
  RegularizedContext(const WeightFunction& weight, double rho, double c);

  const WeightFunction& weight() const noexcept { return weight_; }
  double rho() const noexcept { return rho_; }
  double c() const noexcept { return c_; }

  /// g(x) = x / (1 - (1 - rho) c phi(x)); g(x) >= x, strictly increasing.
  double g(double x) const;
  double g_derivative(double x, Side side = Side::Both) const;
  /// Bracketed bisection on [y (1 - (1 - rho) c phi_inf), y].
  double g_inverse(double y) const;

  /// v(x) = u(g^{-1}(x)).
  double v(double x) const;
  /// Small-t closed form of v: K (1 + t) / (t + s x) with s = 1 - (1 - rho) c K,
  /// held at K below the Huber threshold x <= 1/s.
  double v_approximate(double x) const;
  double v_derivative(double x, DerivativeMode mode = DerivativeMode::Approximate,
                      Side side = Side::Both) const;

  /// Point where v is not differentiable (MHuber only): g(1) for the exact v,
  /// 1/s for the approximate one. Meaningless for MTyler.
  double v_kink(DerivativeMode mode) const;

 private:
  double shrink_slope() const noexcept { return 1.0 - (1.0 - rho_) * c_ * weight_.scale(); }

  WeightFunction weight_;
  double rho_;
  double c_;
  double load_;  // (1 - rho) c
};

/// Smallest admissible regularization: max{0, 1 - 1 / (c phi_inf)}.
double minimal_rho(const WeightFunction& weight, double c);

}  // namespace rmest
