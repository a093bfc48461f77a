#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>

#include "qgp/error.hpp"
#include "qgp/numerics.hpp"
#include "support.hpp"

using namespace qgp;
using namespace testing;

namespace nm = qgp::numerics;

TEST_CASE("eigh: identity and Pauli X") {
  const auto id = nm::eigh(ComplexMatrix(ComplexMatrix::Identity(2, 2)));
  CHECK(id.eigenvalues(0) == doctest::Approx(1.0));
  CHECK(id.eigenvalues(1) == doctest::Approx(1.0));

  ComplexMatrix x(2, 2);
  x << 0, 1, 1, 0;
  const auto e = nm::eigh(x);
  CHECK(e.eigenvalues(0) == doctest::Approx(-1.0));
  CHECK(e.eigenvalues(1) == doctest::Approx(1.0));
  // eigenvector of -1 is (1,-1)/sqrt2 up to phase
  const cplx ratio = e.eigenvectors(1, 0) / e.eigenvectors(0, 0);
  CHECK(std::abs(ratio + 1.0) < 1e-12);
  CHECK(std::abs(std::abs(e.eigenvectors(0, 0)) - 1 / std::sqrt(2.0)) < 1e-12);
}

TEST_CASE("eigh: reconstruction, orthonormality, eigenpairs on random Hermitian 2..32") {
  std::mt19937_64 g(11);
  for (int n : {2, 3, 5, 8, 16, 32}) {
    const ComplexMatrix a = random_hermitian(n, g);
    const auto e = nm::eigh(a);
    const double scale = nm::max_abs(a);
    const ComplexMatrix rec = e.eigenvectors * e.eigenvalues.cast<cplx>().asDiagonal() * e.eigenvectors.adjoint();
    CHECK(max_abs_diff(rec, a) < 1e-9 * scale);
    CHECK(max_abs_diff(e.eigenvectors.adjoint() * e.eigenvectors, ComplexMatrix::Identity(n, n)) < 1e-10);
    for (int j = 0; j < n; ++j) {
      const ComplexVector r = a * e.eigenvectors.col(j) - e.eigenvalues(j) * e.eigenvectors.col(j);
      CHECK(r.cwiseAbs().maxCoeff() < 1e-9 * scale);
      if (j > 0) CHECK(e.eigenvalues(j) >= e.eigenvalues(j - 1));
    }
  }
}

TEST_CASE("eigh rejects non-Hermitian input") {
  ComplexMatrix a(2, 2);
  a << 1, 2, 3, 4;
  CHECK_THROWS_AS(nm::eigh(a), Error);
  try {
    nm::eigh(a);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonHermitian);
  }
}

TEST_CASE("cholesky_logdet: trivial cases") {
  CHECK(nm::cholesky_logdet(RealMatrix::Identity(3, 3)).logdet == doctest::Approx(0.0));
  RealMatrix d = RealMatrix::Zero(2, 2);
  d.diagonal() << 2, 8;
  CHECK(nm::cholesky_logdet(d).logdet == doctest::Approx(std::log(16.0)));
}

TEST_CASE("cholesky_logdet agrees with eigenvalue sum and factors K") {
  std::mt19937_64 g(5);
  for (int trial = 0; trial < 10; ++trial) {
    const RealMatrix k = random_spd(32, g);
    const auto c = nm::cholesky_logdet(k);
    const auto e = nm::eigh(k);
    CHECK(std::abs(c.logdet - e.eigenvalues.array().log().sum()) < 1e-8);
    CHECK((c.lower * c.lower.transpose() - k).cwiseAbs().maxCoeff() < 1e-9 * nm::max_abs(k));
    double diag_sum = 0.0;
    for (int i = 0; i < 32; ++i) diag_sum += std::log(c.lower(i, i));
    CHECK(c.logdet == doctest::Approx(2.0 * diag_sum).epsilon(1e-14));
  }
}

TEST_CASE("cholesky_logdet rejects indefinite input") {
  RealMatrix k(2, 2);
  k << 1, 2, 2, 1;
  try {
    nm::cholesky_logdet(k);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotPositiveDefinite);
  }
}

TEST_CASE("psd_sqrt: trivial and multiply-back") {
  RealMatrix d = RealMatrix::Zero(2, 2);
  d.diagonal() << 4, 9;
  const RealMatrix s = nm::psd_sqrt(d);
  CHECK(s(0, 0) == doctest::Approx(2.0));
  CHECK(s(1, 1) == doctest::Approx(3.0));
  CHECK(std::abs(s(0, 1)) < 1e-14);
  CHECK((nm::psd_sqrt(RealMatrix(RealMatrix::Identity(4, 4))) - RealMatrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-14);

  std::mt19937_64 g(7);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + trial % 15;
    const RealMatrix a = random_real(n, n / 2 + 1, g);
    const RealMatrix k = a * a.transpose();  // rank deficient PSD
    const RealMatrix r = nm::psd_sqrt(k);
    CHECK((r * r - k).cwiseAbs().maxCoeff() < 1e-9 * nm::max_abs(k));
    CHECK((r - r.transpose()).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("psd_sqrt complex") {
  std::mt19937_64 g(8);
  const ComplexMatrix a = random_complex(6, 6, g);
  const ComplexMatrix k = a * a.adjoint();
  const ComplexMatrix r = nm::psd_sqrt(k);
  CHECK(max_abs_diff(r * r, k) < 1e-9 * nm::max_abs(k));
}

TEST_CASE("psd_sqrt rejects clearly indefinite input") {
  RealMatrix k = RealMatrix::Identity(2, 2);
  k(1, 1) = -0.5;
  try {
    nm::psd_sqrt(k);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotPSD);
  }
}

TEST_CASE("condition_number examples") {
  CHECK(nm::condition_number(RealMatrix(RealMatrix::Identity(3, 3))) == doctest::Approx(1.0));
  RealMatrix d = RealMatrix::Zero(2, 2);
  d.diagonal() << 1, 512;
  CHECK(nm::condition_number(d) == doctest::Approx(512.0));
  d.diagonal() << 1, std::ldexp(1.0, 30);
  CHECK(nm::condition_number(d) == doctest::Approx(std::ldexp(1.0, 30)));
  // only the numerically nonzero spectrum counts
  d.diagonal() << 0, 4;
  CHECK(nm::condition_number(d) == doctest::Approx(1.0));
  RealVector ev(3);
  ev << 1e-20, 0.5, 2.0;
  CHECK(nm::condition_number(ev) == doctest::Approx(4.0));
  try {
    nm::condition_number(RealMatrix(RealMatrix::Zero(2, 2)));
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ZeroMatrix);
  }
}

TEST_CASE("solve_psd: trivial and residual oracle") {
  RealVector y(2);
  y << 3, 4;
  CHECK((nm::solve_psd(RealMatrix::Identity(2, 2), y) - y).norm() < 1e-15);
  RealMatrix d = RealMatrix::Zero(2, 2);
  d.diagonal() << 2, 4;
  RealVector y2(2);
  y2 << 2, 4;
  const RealVector x = nm::solve_psd(d, y2);
  CHECK(x(0) == doctest::Approx(1.0));
  CHECK(x(1) == doctest::Approx(1.0));

  std::mt19937_64 g(9);
  for (int trial = 0; trial < 20; ++trial) {
    const RealMatrix k = random_spd(32, g);
    const RealVector b = random_vec(32, g);
    const RealVector sol = nm::solve_psd(k, b);
    CHECK((k * sol - b).cwiseAbs().maxCoeff() <= 1e-8 * b.cwiseAbs().maxCoeff());
  }
}
