#include "rmest/kernels.hpp"

#include <algorithm>

namespace rmest::kernels {

namespace {

// Column chunk per OpenMP task; big enough for Eigen's blocked routines.
constexpr Index kChunk = 16;

}  // namespace

void quadratic_forms_serial(const Matrix& lower, const Matrix& samples, RealVector& out) {
  const Index dim = lower.rows();
  const Index n = samples.cols();
  out.resize(n);
  ComplexVector x(dim);
  for (Index k = 0; k < n; ++k) {
    // Forward substitution L x = y_k; then d_k = |x|^2 / N.
    double acc = 0.0;
    for (Index i = 0; i < dim; ++i) {
      Complex s = samples(i, k);
      for (Index j = 0; j < i; ++j) s -= lower(i, j) * x(j);
      x(i) = s / lower(i, i);
      acc += std::norm(x(i));
    }
    out(k) = acc / static_cast<double>(dim);
  }
}

void quadratic_forms_parallel(const Matrix& lower, const Matrix& samples, RealVector& out) {
  const Index n = samples.cols();
  const double inv_dim = 1.0 / static_cast<double>(lower.rows());
  out.resize(n);
  const auto tri = lower.triangularView<Eigen::Lower>();
#pragma omp parallel for schedule(static)
  for (Index start = 0; start < n; start += kChunk) {
    const Index width = std::min(kChunk, n - start);
    Matrix x = samples.middleCols(start, width);
    tri.solveInPlace(x);
    out.segment(start, width) = x.colwise().squaredNorm().transpose() * inv_dim;
  }
}

void weighted_gram_serial(const Matrix& samples, const RealVector& weights, double scale,
                          Matrix& out) {
  const Index dim = samples.rows();
  const Index n = samples.cols();
  out.setZero(dim, dim);
  for (Index k = 0; k < n; ++k) {
    const double w = scale * weights(k);
    for (Index j = 0; j < dim; ++j) {
      const Complex yj = std::conj(samples(j, k));
      for (Index i = 0; i < dim; ++i) out(i, j) += w * samples(i, k) * yj;
    }
  }
}

void weighted_gram_parallel(const Matrix& samples, const RealVector& weights, double scale,
                            Matrix& out) {
  const Index dim = samples.rows();
  out.resize(dim, dim);
  const Matrix weighted = samples * (scale * weights).asDiagonal();
#pragma omp parallel for schedule(static)
  for (Index start = 0; start < dim; start += kChunk) {
    const Index width = std::min(kChunk, dim - start);
    out.middleCols(start, width).noalias() =
        weighted * samples.middleRows(start, width).adjoint();
  }
}

}  // namespace rmest::kernels
