#include "rmest/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "rmest/errors.hpp"

namespace rmest {

double hermitian_defect(const Matrix& a) {
  if (a.rows() != a.cols()) {
    throw DomainError("hermitian_defect: matrix is not square");
  }
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

void symmetrize(Matrix& a) {
  const Index n = a.rows();
  for (Index j = 0; j < n; ++j) {
    a(j, j) = Complex(a(j, j).real(), 0.0);
    for (Index i = j + 1; i < n; ++i) {
      const Complex avg = 0.5 * (a(i, j) + std::conj(a(j, i)));
      a(i, j) = avg;
      a(j, i) = std::conj(avg);
    }
  }
}

double normalized_trace(const Matrix& a) {
  return a.trace().real() / static_cast<double>(a.rows());
}

Matrix trace_normalize(const Matrix& a) {
  const double tr = normalized_trace(a);
  if (!(tr > 0.0)) {
    throw DomainError("trace_normalize: normalized trace must be positive");
  }
  return a / tr;
}

RealVector hermitian_eigenvalues(const Matrix& a) {
  if (a.rows() == 0) return RealVector();
  if (is_real(a)) {
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(a.real(), Eigen::EigenvaluesOnly);
    return es.eigenvalues();
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

double spectral_norm(const Matrix& hermitian) {
  if (hermitian.rows() == 0) return 0.0;
  const RealVector ev = hermitian_eigenvalues(hermitian);
  return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
}

bool is_real(const Matrix& a) {
  return (a.imag().array() == 0.0).all();
}

}  // namespace rmest
