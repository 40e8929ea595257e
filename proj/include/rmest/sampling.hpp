#pragma once

#include <cstdint>
#include <iosfwd>

#include "rmest/linalg.hpp"

namespace rmest {

/// Hermitian positive semidefinite N x N covariance with a cached
/// eigendecomposition. Eigenvalues within -1e-10 of zero are clamped to 0.
class CovarianceModel {
 public:
  explicit CovarianceModel(Matrix matrix);

  /// [C]_ij = b^|i - j|. Unit diagonal, hence trace-normalized.
  static CovarianceModel toeplitz(Index dimension, double coefficient);
  static CovarianceModel identity(Index dimension);

  Index dimension() const noexcept { return matrix_.rows(); }
  const Matrix& matrix() const noexcept { return matrix_; }
  /// Ascending.
  const RealVector& eigenvalues() const noexcept { return eigenvalues_; }
  const Matrix& eigenvectors() const noexcept { return eigenvectors_; }
  bool trace_normalized() const noexcept { return trace_normalized_; }
  bool real() const noexcept { return real_; }

  /// (1/N) sum_i lambda_i^k over the cached spectrum.
  double spectral_moment(int order) const;
  double max_eigenvalue() const { return eigenvalues_(eigenvalues_.size() - 1); }
  double min_eigenvalue() const { return eigenvalues_(0); }

  /// C / ((1/N) tr C).
  CovarianceModel normalized() const;

 private:
  Matrix matrix_;
  RealVector eigenvalues_;
  Matrix eigenvectors_;
  bool trace_normalized_ = false;
  bool real_ = false;
};

/// Hermitian square root via eigendecomposition with eigenvalue clamping.
Matrix matrix_sqrt(const CovarianceModel& model);
/// Same, for a raw matrix. Throws DomainError when `m` is not Hermitian to 1e-12.
Matrix matrix_sqrt(const Matrix& m);

/// Samples laid out as [legitimate | outliers], one column per sample.
struct Dataset {
  Matrix samples;
  Index n_legit = 0;
  Index n_outlier = 0;
  std::uint64_t seed = 0;

  Index dimension() const noexcept { return samples.rows(); }
  Index size() const noexcept { return samples.cols(); }
  /// c_N = N / n.
  double aspect_ratio() const { return static_cast<double>(dimension()) / static_cast<double>(size()); }
  auto legit() const { return samples.leftCols(n_legit); }
  auto outliers() const { return samples.rightCols(n_outlier); }
};

enum class ScalarField { Complex, Real };

struct SamplingOptions {
  /// Complex: entries are circular CN(0, 1). Real: entries are N(0, 1).
  ScalarField field = ScalarField::Complex;
};

/// floor(eps * n), guarded against eps * n landing one ulp under an integer.
Index outlier_count(Index n, double eps);

/// n legitimate samples C^{1/2} x drawn from the legitimate stream of `seed`.
Dataset sample_clean(const CovarianceModel& c, Index n, std::uint64_t seed,
                     const SamplingOptions& options = {});

/// (n - floor(eps n)) legitimate samples C^{1/2} x followed by floor(eps n)
/// outliers D^{1/2} x'. Legitimate and outlier columns come from two independent
/// streams derived from `seed`; the legitimate block is a prefix of what
/// sample_clean(c, n, seed) produces, so datasets at different eps share it.
Dataset sample_contaminated(const CovarianceModel& c, const CovarianceModel& d, Index n,
                            double eps, std::uint64_t seed,
                            const SamplingOptions& options = {});

/// Column-major CSV dump: a header line "N,n,n_outlier,seed", then one line per
/// sample column with complex entries written as "a+bi" to 17 significant digits.
void write_dataset(std::ostream& out, const Dataset& data);
Dataset read_dataset(std::istream& in);

}  // namespace rmest
