#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "qtm/errors.hpp"
#include "qtm/qt_matrix.hpp"

using qtm::Correction;
using qtm::LaurentSymbol;
using qtm::QtMatrix;

namespace {

std::mt19937_64 rng(501);

Correction random_correction(Eigen::Index n, Eigen::Index m, Eigen::Index r) {
  Eigen::MatrixXd U = oracle::random_matrix(rng, n, r);
  Eigen::MatrixXd V = oracle::random_matrix(rng, m, r);
  for (Eigen::Index j = 0; j < r; ++j) {
    U.col(j) *= std::pow(0.5, j);
    V.col(j) *= std::pow(0.5, j);
  }
  return Correction(std::move(U), std::move(V));
}

QtMatrix random_qt(long long lo, long long hi, Eigen::Index n, Eigen::Index m,
                   Eigen::Index r, double eps = qtm::kDefaultEps) {
  return QtMatrix{oracle::random_symbol(rng, lo, hi, 0.75),
                  random_correction(n, m, r), eps};
}

// Exact distance in the matrix norm between two represented values: the
// symbol parts subtract exactly and the correction difference is measured
// through an economy SVD of the stacked factors.
double pair_norm_diff(const QtMatrix& A, const QtMatrix& B) {
  const LaurentSymbol ds = qtm::sub(A.symbol, B.symbol);
  Correction nb = B.correction;
  if (!nb.is_zero()) nb = Correction(-nb.U, nb.V);
  const Correction dc = qtm::concat(A.correction, nb);
  return qtm::kAlpha * qtm::wiener_norm(ds) + qtm::norm2(dc);
}

}  // namespace

TEST_CASE("matrix norm splits into symbol and correction parts") {
  LaurentSymbol a(-1, {1.0, -2.0, 0.5});
  CHECK(qtm::qt_norm(QtMatrix::toeplitz(a)) ==
        doctest::Approx(3.5 * qtm::kAlpha));
  Correction e(Eigen::MatrixXd::Constant(1, 1, 3.0),
               Eigen::MatrixXd::Constant(1, 1, 1.0));
  CHECK(qtm::qt_norm(QtMatrix{a, e}) ==
        doctest::Approx(3.5 * qtm::kAlpha + 3.0));
  CHECK(qtm::qt_norm(QtMatrix{LaurentSymbol::zero(), Correction::zero()}) ==
        0.0);
}

TEST_CASE("truncation removes at most the advertised share of the norm") {
  for (int rep = 0; rep < 100; ++rep) {
    QtMatrix A = random_qt(-12, 15, 10, 8, 4);
    const double eps = std::pow(10.0, -2.0 - (rep % 11));
    const QtMatrix T = qtm::truncate(A, eps);
    CHECK(pair_norm_diff(A, T) <= eps * qtm::qt_norm(A) * (1.0 + 1e-12));
    CHECK(T.eps >= eps);
  }
}

TEST_CASE("sum and product agree with dense sections") {
  for (int rep = 0; rep < 25; ++rep) {
    QtMatrix A = random_qt(-6, 9, 7, 9, 3);
    QtMatrix B = random_qt(-8, 5, 6, 4, 2);
    const Eigen::Index n = 40;
    const Eigen::Index K = 400;  // decayed to nothing well before this
    const Eigen::MatrixXd dsum = A.dense(n, n) + B.dense(n, n);
    const Eigen::MatrixXd dprod = A.dense(n, K) * B.dense(K, n);
    CHECK((qtm::add(A, B).dense(n, n) - dsum).norm() <=
          1e-13 * (qtm::qt_norm(A) + qtm::qt_norm(B)));
    CHECK((qtm::multiply(A, B).dense(n, n) - dprod).norm() <=
          1e-12 * qtm::qt_norm(A) * qtm::qt_norm(B));
  }
}

TEST_CASE("the matrix norm is submultiplicative in practice") {
  for (int rep = 0; rep < 100; ++rep) {
    QtMatrix A = random_qt(-5, 5, 6, 6, 3);
    QtMatrix B = random_qt(-4, 7, 5, 8, 2);
    const QtMatrix P = qtm::multiply(A, B);
    CHECK(qtm::qt_norm(P) <=
          qtm::qt_norm(A) * qtm::qt_norm(B) * (1.0 + 1e-12));
    CHECK(P.eps == std::max(A.eps, B.eps));
  }
}

TEST_CASE("scalar Toeplitz inverse reproduces the geometric symbol") {
  // (1 - z/2)(1 - 1/(2z)) inverts to b_k = (4/3) 2^-|k|
  LaurentSymbol a(-1, {-0.5, 1.25, -0.5});
  double bound = 0.0;
  const QtMatrix inv = qtm::invert_toeplitz(a, 1e-15, &bound);
  for (long long k = -20; k <= 20; ++k) {
    const double want =
        (4.0 / 3.0) * std::pow(2.0, -static_cast<double>(std::llabs(k)));
    CHECK(std::abs(inv.symbol.at(k) - want) <= 1e-13);
  }
  CHECK(bound > 0.0);
  CHECK(bound <= 1e-12);

  // corner of the represented inverse against a finite dense solve
  const Eigen::Index n = 50, K = 600;
  const Eigen::MatrixXd T = QtMatrix::toeplitz(a).dense(K, K);
  const Eigen::MatrixXd S = T.lu().solve(Eigen::MatrixXd::Identity(K, K));
  const double corner_err = (inv.dense(n, n) - S.topLeftCorner(n, n)).norm();
  CHECK(corner_err <= 1e-12);
  CHECK(corner_err <= 100.0 * bound);
}

TEST_CASE("Toeplitz inverses of random dominant symbols") {
  for (int rep = 0; rep < 15; ++rep) {
    const LaurentSymbol a = oracle::random_dominant_symbol(rng, -4, 5, 0.7);
    const QtMatrix inv = qtm::invert_toeplitz(a, 1e-13);
    const QtMatrix prod =
        qtm::multiply(QtMatrix::toeplitz(a, 1e-13), inv);
    CHECK(pair_norm_diff(prod, QtMatrix::identity()) <=
          1e-10 * qtm::qt_norm(inv));

    const Eigen::Index n = 40, K = 500;
    const Eigen::MatrixXd T = QtMatrix::toeplitz(a).dense(K, K);
    const Eigen::MatrixXd S = T.lu().solve(Eigen::MatrixXd::Identity(K, K));
    CHECK((inv.dense(n, n) - S.topLeftCorner(n, n)).norm() <=
          1e-12 * S.norm());
  }
  CHECK_THROWS_AS(qtm::invert_toeplitz(LaurentSymbol::zero(), 1e-13),
                  qtm::SingularMatrix);
}

TEST_CASE("inverse with a compact correction via the Woodbury identity") {
  for (int rep = 0; rep < 15; ++rep) {
    const LaurentSymbol a = oracle::random_dominant_symbol(rng, -3, 4, 0.7);
    Correction e = random_correction(6, 7, 3);
    e = Correction(e.U * (0.2 / qtm::norm2(e)), e.V);  // keep A invertible
    const QtMatrix A{a, e, 1e-13};
    double bound = 0.0;
    const QtMatrix inv = qtm::invert(A, &bound);
    CHECK(bound > 0.0);
    CHECK(pair_norm_diff(qtm::multiply(A, inv), QtMatrix::identity()) <=
          1e-9 * qtm::qt_norm(inv));

    const Eigen::Index n = 40, K = 500;
    const Eigen::MatrixXd D = A.dense(K, K);
    const Eigen::MatrixXd S = D.lu().solve(Eigen::MatrixXd::Identity(K, K));
    CHECK((inv.dense(n, n) - S.topLeftCorner(n, n)).norm() <=
          1e-11 * S.norm());
  }
}

TEST_CASE("inverse failure modes") {
  // no symbol part: a compact operator has no bounded inverse
  CHECK_THROWS_AS(
      qtm::invert(QtMatrix{LaurentSymbol::zero(), random_correction(3, 3, 1)}),
      qtm::SingularMatrix);

  // rank-one downdate tuned to cancel: (T^-1)_{11} = 1 for the geometric
  // symbol, so subtracting e1 e1^T makes I + V^T T^-1 U exactly zero
  LaurentSymbol a(-1, {-0.5, 1.25, -0.5});
  Eigen::MatrixXd u1 = Eigen::MatrixXd::Zero(1, 1);
  u1(0, 0) = -1.0;
  Eigen::MatrixXd v1 = Eigen::MatrixXd::Ones(1, 1);
  const QtMatrix A{a, Correction(u1, v1), 1e-13};
  CHECK_THROWS_AS(qtm::invert(A), qtm::SingularSchurComplement);
}

TEST_CASE("integer powers agree with repeated dense products") {
  QtMatrix A = random_qt(-3, 3, 5, 5, 2);
  A = qtm::scale(A, 0.4 / qtm::qt_norm(A));
  const Eigen::Index n = 30, K = 300;
  const Eigen::MatrixXd D = A.dense(K, K);
  Eigen::MatrixXd Dk = Eigen::MatrixXd::Identity(K, K);
  QtMatrix P0 = qtm::power(A, 0);
  CHECK(pair_norm_diff(P0, QtMatrix::identity()) == 0.0);
  for (unsigned k = 1; k <= 5; ++k) {
    Dk = Dk * D;
    const QtMatrix Pk = qtm::power(A, k);
    CHECK((Pk.dense(n, n) - Dk.topLeftCorner(n, n)).norm() <= 1e-13);
  }
}

TEST_CASE("leading submatrix deletion") {
  const QtMatrix A = random_qt(-3, 3, 6, 5, 2);
  const QtMatrix S = qtm::submatrix(A, 4, 2);
  const Eigen::MatrixXd want = A.dense(63, 61).block(3, 1, 30, 30);
  CHECK((S.dense(30, 30) - want).norm() <= 1e-15);
  // deleting nothing is the identity operation
  const QtMatrix same = qtm::submatrix(A, 1, 1);
  CHECK(pair_norm_diff(same, A) == 0.0);
  CHECK_THROWS_AS(qtm::submatrix(A, 0, 1), qtm::DimensionMismatch);

  // deleting past the correction support leaves a pure Toeplitz tail
  const QtMatrix tail = qtm::submatrix(A, 9, 9);
  CHECK(tail.is_toeplitz());
}

TEST_CASE("triangular factorization of a pure Toeplitz matrix is exact") {
  LaurentSymbol a(-1, {-0.5, 1.25, -0.5});
  const qtm::UlFactorization f = qtm::ul(QtMatrix::toeplitz(a, 1e-14), 1e-14);
  CHECK(f.U.is_toeplitz());
  CHECK(f.L.is_toeplitz());
  CHECK(f.U.symbol.lowest_index >= 0);
  CHECK(f.L.symbol.highest_index() <= 0);
  const Eigen::Index n = 40, K = 200;
  const Eigen::MatrixXd P = f.U.dense(n, K) * f.L.dense(K, n);
  CHECK((P - QtMatrix::toeplitz(a).dense(n, n)).norm() <= 1e-13);
}

TEST_CASE("triangular factorization with a compact correction") {
  int done = 0;
  for (int rep = 0; rep < 10; ++rep) {
    const LaurentSymbol a = oracle::random_dominant_symbol(rng, -3, 4, 0.7);
    Correction e = random_correction(6, 5, 2);
    e = Correction(e.U * (0.1 / qtm::norm2(e)), e.V);
    const QtMatrix A{a, e, 1e-13};
    qtm::UlFactorization f;
    try {
      f = qtm::ul(A, 1e-13);
    } catch (const qtm::FactorizationFailed&) {
      continue;  // a trailing corner minor may legitimately vanish
    }
    CHECK(f.U.symbol.lowest_index >= 0);
    CHECK(f.L.symbol.highest_index() <= 0);
    const Eigen::Index n = 40, K = 200;
    const Eigen::MatrixXd P = f.U.dense(n, K) * f.L.dense(K, n);
    CHECK((P - A.dense(n, n)).norm() <= 1e-11 * qtm::qt_norm(A));
    ++done;
  }
  CHECK(done >= 8);
}
