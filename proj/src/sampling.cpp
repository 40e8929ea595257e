#include "rmest/sampling.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <string>

#include "rmest/errors.hpp"
#include "rmest/matrix_io.hpp"

namespace rmest {

namespace {

constexpr std::uint64_t kLegitStream = 0;
constexpr std::uint64_t kOutlierStream = 1;

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), 0x9e3779b9u};
  return std::mt19937_64(seq);
}

/// Column-by-column standard draws so that the first k columns do not depend on `cols`.
Matrix standard_draws(Index rows, Index cols, std::mt19937_64& rng, ScalarField field) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix x(rows, cols);
  const double half = std::sqrt(0.5);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) {
      if (field == ScalarField::Complex) {
        const double re = normal(rng);
        const double im = normal(rng);
        x(i, j) = Complex(half * re, half * im);
      } else {
        x(i, j) = Complex(normal(rng), 0.0);
      }
    }
  }
  return x;
}

Matrix sqrt_from_spectrum(const RealVector& eigenvalues, const Matrix& eigenvectors) {
  const RealVector root = eigenvalues.cwiseMax(0.0).cwiseSqrt();
  return eigenvectors * root.asDiagonal() * eigenvectors.adjoint();
}

}  // namespace

CovarianceModel::CovarianceModel(Matrix matrix) : matrix_(std::move(matrix)) {
  if (matrix_.rows() < 1 || matrix_.rows() != matrix_.cols()) {
    throw DomainError("CovarianceModel: matrix must be square with dimension >= 1");
  }
  const double scale = std::max(1.0, matrix_.cwiseAbs().maxCoeff());
  if (hermitian_defect(matrix_) > 1e-12 * scale) {
    throw DomainError("CovarianceModel: matrix is not Hermitian");
  }
  symmetrize(matrix_);
  real_ = is_real(matrix_);
  if (real_) {
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(matrix_.real());
    eigenvalues_ = es.eigenvalues();
    eigenvectors_ = es.eigenvectors().cast<Complex>();
  } else {
    Eigen::SelfAdjointEigenSolver<Matrix> es(matrix_);
    eigenvalues_ = es.eigenvalues();
    eigenvectors_ = es.eigenvectors();
  }
  const double floor = -1e-10 * std::max(1.0, eigenvalues_.cwiseAbs().maxCoeff());
  if (eigenvalues_(0) < floor) {
    throw DomainError("CovarianceModel: matrix is not positive semidefinite (min eigenvalue " +
                      std::to_string(eigenvalues_(0)) + ")");
  }
  eigenvalues_ = eigenvalues_.cwiseMax(0.0);
  trace_normalized_ = std::abs(normalized_trace(matrix_) - 1.0) <= 1e-12;
}

CovarianceModel CovarianceModel::toeplitz(Index dimension, double coefficient) {
  if (dimension < 1) throw DomainError("toeplitz: dimension must be >= 1");
  if (!(coefficient >= 0.0 && coefficient < 1.0)) {
    throw DomainError("toeplitz: coefficient must lie in [0, 1)");
  }
  Matrix m(dimension, dimension);
  for (Index i = 0; i < dimension; ++i) {
    for (Index j = 0; j < dimension; ++j) {
      const auto lag = static_cast<double>(i > j ? i - j : j - i);
      m(i, j) = Complex(lag == 0.0 ? 1.0 : std::pow(coefficient, lag), 0.0);
    }
  }
  return CovarianceModel(std::move(m));
}

CovarianceModel CovarianceModel::identity(Index dimension) {
  if (dimension < 1) throw DomainError("identity: dimension must be >= 1");
  return CovarianceModel(Matrix::Identity(dimension, dimension));
}

double CovarianceModel::spectral_moment(int order) const {
  return eigenvalues_.array().pow(order).mean();
}

CovarianceModel CovarianceModel::normalized() const {
  return CovarianceModel(trace_normalize(matrix_));
}

Matrix matrix_sqrt(const CovarianceModel& model) {
  return sqrt_from_spectrum(model.eigenvalues(), model.eigenvectors());
}

Matrix matrix_sqrt(const Matrix& m) {
  return matrix_sqrt(CovarianceModel(m));
}

Index outlier_count(Index n, double eps) {
  if (!(eps >= 0.0 && eps < 1.0)) throw DomainError("outlier_count: eps must lie in [0, 1)");
  return static_cast<Index>(std::floor(eps * static_cast<double>(n) + 1e-9));
}

Dataset sample_clean(const CovarianceModel& c, Index n, std::uint64_t seed,
                     const SamplingOptions& options) {
  return sample_contaminated(c, c, n, 0.0, seed, options);
}

Dataset sample_contaminated(const CovarianceModel& c, const CovarianceModel& d, Index n,
                            double eps, std::uint64_t seed, const SamplingOptions& options) {
  if (c.dimension() != d.dimension()) {
    throw DomainError("sample_contaminated: C and D dimensions differ");
  }
  if (n < 1) throw DomainError("sample_contaminated: n must be >= 1");
  const Index n_out = outlier_count(n, eps);
  const Index n_legit = n - n_out;
  const Index dim = c.dimension();

  Dataset data;
  data.samples.resize(dim, n);
  data.n_legit = n_legit;
  data.n_outlier = n_out;
  data.seed = seed;

  auto legit_rng = make_stream(seed, kLegitStream);
  data.samples.leftCols(n_legit) =
      matrix_sqrt(c) * standard_draws(dim, n_legit, legit_rng, options.field);
  if (n_out > 0) {
    auto outlier_rng = make_stream(seed, kOutlierStream);
    data.samples.rightCols(n_out) =
        matrix_sqrt(d) * standard_draws(dim, n_out, outlier_rng, options.field);
  }
  return data;
}

void write_dataset(std::ostream& out, const Dataset& data) {
  out << data.dimension() << ',' << data.size() << ',' << data.n_outlier << ',' << data.seed
      << '\n';
  for (Index j = 0; j < data.size(); ++j) {
    for (Index i = 0; i < data.dimension(); ++i) {
      if (i > 0) out << ',';
      out << format_complex(data.samples(i, j));
    }
    out << '\n';
  }
}

Dataset read_dataset(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("dataset: missing header", 1);
  const auto header = split_csv_line(line);
  if (header.size() != 4) throw ParseError("dataset: header must be N,n,n_outlier,seed", 1);
  long long fields[4];
  for (int k = 0; k < 4; ++k) {
    try {
      fields[k] = std::stoll(std::string(header[k]));
    } catch (const std::exception&) {
      throw ParseError("dataset: malformed header field '" + std::string(header[k]) + "'", 1);
    }
  }
  const Index dim = fields[0];
  const Index n = fields[1];
  if (dim < 1 || n < 1 || fields[2] < 0 || fields[2] > n) {
    throw ParseError("dataset: inconsistent header", 1);
  }
  Dataset data;
  data.samples.resize(dim, n);
  data.n_outlier = fields[2];
  data.n_legit = n - data.n_outlier;
  data.seed = static_cast<std::uint64_t>(fields[3]);
  for (Index j = 0; j < n; ++j) {
    const std::size_t line_no = static_cast<std::size_t>(j) + 2;
    if (!std::getline(in, line)) throw ParseError("dataset: missing sample column", line_no);
    const auto values = split_csv_line(line);
    if (static_cast<Index>(values.size()) != dim) {
      throw ParseError("dataset: expected " + std::to_string(dim) + " entries", line_no);
    }
    for (Index i = 0; i < dim; ++i) data.samples(i, j) = parse_complex(values[i], line_no);
  }
  return data;
}

}  // namespace rmest
