#include <doctest.h>

#include <sstream>

#include "rmest/errors.hpp"
#include "rmest/linalg.hpp"
#include "rmest/matrix_io.hpp"
#include "rmest/sampling.hpp"
#include "support.hpp"

using namespace rmest;

TEST_CASE("linalg: helpers") {
  const Matrix a = testing::random_hpd(12, 1);
  CHECK(hermitian_defect(a) < 1e-15);
  Matrix b = a;
  b(0, 1) += Complex(0.0, 1e-3);
  CHECK(hermitian_defect(b) == doctest::Approx(1e-3));
  symmetrize(b);
  CHECK(hermitian_defect(b) == 0.0);
  CHECK(normalized_trace(trace_normalize(a)) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(trace_normalize(Matrix::Zero(3, 3)), DomainError);
  CHECK(spectral_norm(a) == doctest::Approx(testing::power_norm(a)).epsilon(1e-10));
  const Matrix indefinite = a - 2.0 * spectral_norm(a) * Matrix::Identity(12, 12);
  CHECK(spectral_norm(indefinite) == doctest::Approx(testing::power_norm(indefinite)).epsilon(1e-10));
  CHECK(is_real(testing::toeplitz(5, 0.3)));
  CHECK_FALSE(is_real(a));
}

TEST_CASE("sampling: covariance model") {
  const CovarianceModel t = CovarianceModel::toeplitz(40, 0.9);
  CHECK((t.matrix() - testing::toeplitz(40, 0.9)).norm() < 1e-14);
  CHECK(t.trace_normalized());
  CHECK(t.real());
  // Spectral moments through explicit traces.
  const Matrix& m = t.matrix();
  CHECK(t.spectral_moment(1) == doctest::Approx(testing::ntrace(m)).epsilon(1e-12));
  CHECK(t.spectral_moment(2) == doctest::Approx(testing::ntrace(m * m)).epsilon(1e-12));
  const Matrix root = matrix_sqrt(t);
  CHECK((root * root - m).norm() < 1e-10);

  const Matrix a = testing::random_hpd(10, 2);
  const CovarianceModel g(a);
  CHECK_FALSE(g.trace_normalized());
  CHECK(g.normalized().trace_normalized());
  const Matrix rebuilt =
      g.eigenvectors() * g.eigenvalues().cast<Complex>().asDiagonal() * g.eigenvectors().adjoint();
  CHECK((rebuilt - a).norm() < 1e-12);
  CHECK(g.max_eigenvalue() == doctest::Approx(testing::power_norm(a)).epsilon(1e-10));

  CHECK_THROWS_AS(CovarianceModel::toeplitz(5, 1.0), DomainError);
  CHECK_THROWS_AS(CovarianceModel(Matrix::Ones(3, 2)), DomainError);
  CHECK_THROWS_AS(CovarianceModel(-Matrix::Identity(3, 3)), DomainError);
}

TEST_CASE("sampling: outlier count uses floor") {
  CHECK(outlier_count(200, 0.15) == 30);
  CHECK(outlier_count(100, 0.07) == 7);
  CHECK(outlier_count(100, 0.129) == 12);
  CHECK(outlier_count(100, 0.0) == 0);
  CHECK_THROWS_AS(outlier_count(100, 1.0), DomainError);
}

TEST_CASE("sampling: determinism, partition and second moment") {
  const CovarianceModel c = CovarianceModel::toeplitz(8, 0.5);
  const CovarianceModel d = CovarianceModel::toeplitz(8, 0.1);
  const Dataset a = sample_contaminated(c, d, 50, 0.2, 7);
  const Dataset b = sample_contaminated(c, d, 50, 0.2, 7);
  CHECK(a.samples == b.samples);
  CHECK(a.n_legit == 40);
  CHECK(a.n_outlier == 10);
  // The legit block does not depend on eps.
  const Dataset clean = sample_clean(c, 40, 7);
  CHECK(clean.samples == a.legit());
  CHECK(sample_clean(c, 40, 8).samples != clean.samples);

  SamplingOptions real;
  real.field = ScalarField::Real;
  CHECK(is_real(sample_clean(c, 5, 3, real).samples));

  // E[y y^H] = C: the empirical covariance of many draws approaches C.
  const Dataset big = sample_clean(c, 40000, 1);
  const Matrix s = big.samples * big.samples.adjoint() / 40000.0;
  CHECK((s - c.matrix()).norm() / c.matrix().norm() < 0.03);
  const Dataset big_real = sample_clean(c, 40000, 1, real);
  const Matrix sr = big_real.samples * big_real.samples.adjoint() / 40000.0;
  CHECK((sr - c.matrix()).norm() / c.matrix().norm() < 0.03);
}

TEST_CASE("sampling: dataset dump round trip") {
  const Dataset a = sample_contaminated(CovarianceModel::toeplitz(4, 0.5),
                                        CovarianceModel::identity(4), 9, 0.3, 5);
  std::stringstream ss;
  write_dataset(ss, a);
  const Dataset b = read_dataset(ss);
  CHECK(b.samples == a.samples);
  CHECK(b.n_outlier == a.n_outlier);
  CHECK(b.seed == a.seed);

  std::stringstream bad("4,2,0,1\n1,2,3,4\n1,2,x,4\n");
  try {
    read_dataset(bad);
    FAIL("expected ParseError");
  } catch (const ParseError& ex) {
    CHECK(ex.line() == 3);
  }
}

TEST_CASE("matrix io: complex formatting round trip") {
  testing::Generator g(3);
  for (int i = 0; i < 500; ++i) {
    const Complex z(g.uniform(-1e3, 1e3), g.uniform(-1e-3, 1e-3));
    CHECK(parse_complex(format_complex(z)) == z);
  }
  CHECK(parse_complex("1.5") == Complex(1.5, 0));
  CHECK(parse_complex(" -2-3i ") == Complex(-2, -3));
  CHECK(parse_complex("i") == Complex(0, 1));
  CHECK(parse_complex("-i") == Complex(0, -1));
  CHECK(parse_complex("2.5e-3i") == Complex(0, 2.5e-3));
  CHECK(parse_complex("1e+2+1e-2i") == Complex(100, 0.01));
  CHECK(format_complex(Complex(2, 0)) == "2");
  CHECK_THROWS_AS(parse_complex("1+"), ParseError);
  CHECK_THROWS_AS(parse_complex(""), ParseError);
  CHECK_THROWS_AS(parse_complex("abc"), ParseError);
}

TEST_CASE("matrix io: CSV read and write") {
  const Matrix m = testing::random_gaussian(5, 7, 4);
  std::stringstream ss;
  write_matrix_csv(ss, m);
  CHECK(read_matrix_csv(ss) == m);

  std::stringstream with_comments("# header\n1,2\n\n3+i,4\n");
  const Matrix r = read_matrix_csv(with_comments);
  CHECK(r.rows() == 2);
  CHECK(r(1, 0) == Complex(3, 1));

  std::stringstream ragged("1,2\n3\n");
  try {
    read_matrix_csv(ragged);
    FAIL("expected ParseError");
  } catch (const ParseError& ex) {
    CHECK(ex.line() == 2);
  }
  std::stringstream garbage("1,2\n3,4\n5,zz\n");
  try {
    read_matrix_csv(garbage);
    FAIL("expected ParseError");
  } catch (const ParseError& ex) {
    CHECK(ex.line() == 3);
    CHECK(std::string(ex.what()).find("line 3") != std::string::npos);
  }
  std::stringstream empty("# nothing\n");
  CHECK_THROWS_AS(read_matrix_csv(empty), ParseError);
}
