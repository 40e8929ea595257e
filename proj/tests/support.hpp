#pragma once

// Independent numerical oracles and random generators shared by the tests.
// Nothing here calls into the library's solvers.

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <random>

#include "rmest/linalg.hpp"

namespace testing {

using rmest::Complex;
using rmest::Index;
using rmest::Matrix;

inline Matrix random_gaussian(Index rows, Index cols, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = Complex(normal(gen), normal(gen));
  return m;
}

/// Hermitian positive definite X X^H / m + floor I.
inline Matrix random_hpd(Index n, std::uint64_t seed, double floor = 0.1) {
  const Matrix x = random_gaussian(n, 2 * n, seed);
  Matrix a = x * x.adjoint() / static_cast<double>(2 * n);
  a = (a + a.adjoint()).eval() / 2.0;
  a.diagonal().array() += floor;
  return a;
}

/// A / ((1/N) tr A).
inline Matrix unit_trace(const Matrix& a) {
  return a * (static_cast<double>(a.rows()) / a.trace().real());
}

/// Real symmetric Toeplitz with entries r^|i-j|, built entrywise.
inline Matrix toeplitz(Index n, double r) {
  Matrix m(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) m(i, j) = std::pow(r, std::abs(static_cast<double>(i - j)));
  return m;
}

/// Largest |eigenvalue| of a Hermitian matrix by power iteration on A^2.
inline double power_norm(const Matrix& a, int iterations = 5000) {
  const Matrix a2 = a * a;
  rmest::ComplexVector x = rmest::ComplexVector::Ones(a.rows());
  x += random_gaussian(a.rows(), 1, 99).col(0) * 0.01;
  double lambda = 0.0;
  for (int k = 0; k < iterations; ++k) {
    rmest::ComplexVector y = a2 * x;
    const double next = y.norm() / x.norm();
    x = y / y.norm();
    if (std::abs(next - lambda) <= 1e-15 * next) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  return std::sqrt(lambda);
}

/// Plain bisection on a sign change of f over [lo, hi].
inline double bisect(const std::function<double(double)>& f, double lo, double hi) {
  double flo = f(lo);
  for (int k = 0; k < 400 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++k) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Central difference with step h.
inline double central_difference(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

inline double relative_error(double a, double b) {
  return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

/// (1/N) Re tr(X) through the explicit matrix.
inline double ntrace(const Matrix& x) { return x.trace().real() / static_cast<double>(x.rows()); }

/// Uniform draws for property loops.
class Generator {
 public:
  explicit Generator(std::uint64_t seed) : gen_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
  double log_uniform(double lo, double hi) {
    return std::exp(uniform(std::log(lo), std::log(hi)));
  }
  std::uint64_t seed() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace testing
