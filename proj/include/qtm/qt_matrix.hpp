#pragma once

// Semi-infinite quasi-Toeplitz matrices A = T(a) + E: a Toeplitz part with
// symbol a in the Wiener algebra, T(a)_{i,j} = a_{j-i}, plus a compact
// correction E = U V^T with finitely supported factors. The set is a Banach
// algebra under ||A|| = alpha ||a||_W + ||E||_2 with alpha = (1+sqrt 5)/2,
// which makes the norm submultiplicative; every operation truncates its
// result against that norm, so errors stay relative to the operator size.
//
// Values are immutable; each carries the accuracy parameter eps used to
// derive truncation budgets. Binary operations combine parameters with max.

#include <Eigen/Dense>
#include <cmath>

#include "qtm/correction.hpp"
#include "qtm/hankel.hpp"
#include "qtm/symbol.hpp"

namespace qtm {

inline constexpr double kDefaultEps = 1e-15;

// Weight of the symbol term in the QT norm, (1 + sqrt 5) / 2. The smallest
// constant for which ||H(f)||_2 <= (alpha - 1) ||f||_W makes the norm
// submultiplicative.
inline const double kAlpha = (1.0 + std::sqrt(5.0)) / 2.0;

struct QtMatrix {
    LaurentSymbol symbol;
    Correction correction;
    double eps = kDefaultEps;

    QtMatrix() = default;
    QtMatrix(LaurentSymbol a, Correction e, double accuracy = kDefaultEps)
        : symbol(std::move(a)), correction(std::move(e)), eps(accuracy) {}

    static QtMatrix identity(double accuracy = kDefaultEps) {
        return {LaurentSymbol::one(), Correction::zero(), accuracy};
    }
    static QtMatrix toeplitz(LaurentSymbol a, double accuracy = kDefaultEps) {
        return {std::move(a), Correction::zero(), accuracy};
    }

    bool is_toeplitz() const { return correction.is_zero(); }

    // Leading n x m section, for oracles and small demos.
    Eigen::MatrixXd dense(Eigen::Index n, Eigen::Index m) const;
};

// alpha * ||a||_W + ||E||_2.
double qt_norm(const QtMatrix& A);

// Norm-controlled truncation: removes up to eps*||A|| of symbol mass (the
// symbol share is eps*||A||/(2 alpha)) and compresses the correction with a
// 2-norm budget eps*||A||/2, so ||A - truncate(A)|| <= eps*||A||.
QtMatrix truncate(const QtMatrix& A, double eps);
inline QtMatrix truncate(const QtMatrix& A) { return truncate(A, A.eps); }

QtMatrix add(const QtMatrix& A, const QtMatrix& B);
QtMatrix sub(const QtMatrix& A, const QtMatrix& B);
QtMatrix scale(const QtMatrix& A, double s);

// Product in the algebra: T(a)T(b) = T(ab) - H(a-)H(b+) plus the correction
// cross terms, compressed and truncated at the combined accuracy.
QtMatrix multiply(const QtMatrix& A, const QtMatrix& B);

// A^n by binary powering, n >= 0.
QtMatrix power(const QtMatrix& A, unsigned long long n);

// The submatrix A(i:inf, j:inf), 1-based: deleting leading rows and columns
// of a semi-infinite QT matrix yields another one (the symbol shifts by
// i - j, the correction factors lose leading rows).
QtMatrix submatrix(const QtMatrix& A, Eigen::Index i, Eigen::Index j);

// Inverse of the Toeplitz part alone: T(a)^-1 = T(w_rev) T(v) computed from
// the spectral factorization a = u(z) l(1/z), with v ~ u^-1 and w ~ l^-1 by
// Newton series inversion. Returns T(a)^-1 as symbol plus Hankel-product
// correction. error_bound, when requested, receives the forward bound
// (alpha ||a^-1||_W + ||u^-1||_W ||l^-1||_W) * eps.
QtMatrix invert_toeplitz(const LaurentSymbol& a, double eps,
                         double* error_bound = nullptr);

// Inverse in the algebra via the Woodbury identity on A = T(a) + U V^T:
// A^-1 = T(a)^-1 - T(a)^-1 U S^-1 V^T T(a)^-1 with S = I + V^T T(a)^-1 U.
// Throws SingularSchurComplement when S is too ill-conditioned for the
// accuracy target and SingularMatrix when the symbol part vanishes.
QtMatrix invert(const QtMatrix& A, double* error_bound = nullptr);

struct UlFactorization {
    QtMatrix U;  // symbol supported on indices >= 0 (upper triangular part)
    QtMatrix L;  // symbol supported on indices <= 0 (lower triangular part)
};

// A = U * L with U upper and L lower QT-triangular. For a pure Toeplitz
// matrix this is the spectral factorization itself (exactly, with no
// correction); with a compact correction the factors gain finite corner
// corrections obtained by refactoring the leading block against the
// Toeplitz tail. Throws FactorizationFailed when a trailing corner minor is
// singular (no such factorization exists).
UlFactorization ul(const QtMatrix& A, double eps);
inline UlFactorization ul(const QtMatrix& A) { return ul(A, A.eps); }

namespace detail {

// Pieces of a Toeplitz inverse: T(a)^-1 = T(b) + E with b = v * w_rev and
// E the compressed -H(w)H(v) product; v and w are kept for applying the
// inverse through two triangular Toeplitz convolutions.
struct ToeplitzInverseParts {
    LaurentSymbol b;
    Correction corr;
    LaurentSymbol v;  // ~ u^-1, power series
    LaurentSymbol w;  // ~ l^-1, power series
    double bound = 0.0;
};

ToeplitzInverseParts invert_toeplitz_parts(const LaurentSymbol& a, double eps);

}  // namespace detail

}  // namespace qtm
