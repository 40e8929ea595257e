#pragma once

#include "rmest/linalg.hpp"

/// Inner loops of the fixed-point solvers. Each kernel comes in a serial
/// reference form (plain loops, kept for testing) and an OpenMP form that
/// splits the work over sample or output columns. The parallel forms assign
/// every output entry to exactly one thread with a fixed summation order, so
/// results do not depend on the thread count.
namespace rmest::kernels {

enum class Policy { Serial, Parallel };

/// d_i = (1/N) y_i^H Z^{-1} y_i for every column of `samples`, where
/// `lower` is the lower Cholesky factor of Z (Z = L L^H).
void quadratic_forms_serial(const Matrix& lower, const Matrix& samples, RealVector& out);
void quadratic_forms_parallel(const Matrix& lower, const Matrix& samples, RealVector& out);

/// out = scale * sum_i w_i y_i y_i^H.
void weighted_gram_serial(const Matrix& samples, const RealVector& weights, double scale,
                          Matrix& out);
void weighted_gram_parallel(const Matrix& samples, const RealVector& weights, double scale,
                            Matrix& out);

inline void quadratic_forms(Policy p, const Matrix& lower, const Matrix& samples,
                            RealVector& out) {
  p == Policy::Serial ? quadratic_forms_serial(lower, samples, out)
                      : quadratic_forms_parallel(lower, samples, out);
}

inline void weighted_gram(Policy p, const Matrix& samples, const RealVector& weights,
                          double scale, Matrix& out) {
  p == Policy::Serial ? weighted_gram_serial(samples, weights, scale, out)
                      : weighted_gram_parallel(samples, weights, scale, out);
}

}  // namespace rmest::kernels
