#pragma once

#include <complex>

#include <Eigen/Dense>

namespace rmest {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Largest |A_ij - conj(A_ji)|.
double hermitian_defect(const Matrix& a);

/// (A + A^H) / 2, in place.
void symmetrize(Matrix& a);

/// (1/N) Re tr A.
double normalized_trace(const Matrix& a);

/// A / ((1/N) tr A). Throws DomainError if the normalized trace is not positive.
Matrix trace_normalize(const Matrix& a);

/// Spectral norm of a Hermitian matrix (largest |eigenvalue|).
double spectral_norm(const Matrix& hermitian);

/// True when every entry has an exactly zero imaginary part.
bool is_real(const Matrix& a);

/// Eigenvalues of a Hermitian matrix, ascending.
RealVector hermitian_eigenvalues(const Matrix& a);

}  // namespace rmest
