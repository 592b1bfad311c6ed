#pragma once

// Low-rank corrections E = U*V^T with finitely supported factors, and the
// compression machinery shared by every QT operation. The zero correction is
// normalized to 0x0 factors.

#include <Eigen/Dense>

#include "qtm/symbol.hpp"

namespace qtm {

struct Correction {
    Eigen::MatrixXd U;  // row support x rank
    Eigen::MatrixXd V;  // column support x rank

    Correction() : U(0, 0), V(0, 0) {}
    Correction(Eigen::MatrixXd u, Eigen::MatrixXd v);

    static Correction zero() { return {}; }

    Eigen::Index rank() const { return U.cols(); }
    Eigen::Index rows() const { return U.rows(); }    // support, not matrix size
    Eigen::Index cols() const { return V.rows(); }
    bool is_zero() const { return U.cols() == 0; }

    // Dense n x m section of U*V^T (zero-padded past the support).
    Eigen::MatrixXd dense(Eigen::Index n, Eigen::Index m) const;
};

struct EconomySvd {
    Eigen::MatrixXd U;   // orthonormal columns
    Eigen::VectorXd S;   // nonincreasing
    Eigen::MatrixXd V;   // orthonormal columns
};

// Economy SVD of U*V^T without forming the product: QR of each factor, then
// an SVD of R_U * R_V^T.
EconomySvd economy_svd(const Correction& c);

// Largest singular value of U*V^T (0 for the zero correction).
double norm2(const Correction& c);

// Compression with an absolute 2-norm budget: singular values below
// budget/2 are cut, then trailing rows of the scaled factors are dropped
// greedily (smaller of the two trailing rows first) while they fit in the
// remaining budget/2, debiting as they go. Guarantees
// ||c - compress(c, budget)||_2 <= budget. When nothing is removable the
// input is returned unchanged, bit for bit.
Correction compress(const Correction& c, double budget);

// [U_a, U_b] x [V_a, V_b] with zero padding to the larger row supports.
Correction concat(const Correction& a, const Correction& b);

// Factor a dense block D as U*V^T through a thin SVD, cutting singular
// values at rel_cut * sigma_max (noise floor). sqrt(sigma) folds into both
// factors so neither carries the whole scale.
Correction correction_from_dense(const Eigen::MatrixXd& d,
                                 double rel_cut = 1e-15);

namespace detail {

// Y(i,:) = sum_j a_{j-i} X(j,:) with 1-based row indices, i = 1..out_rows;
// out_rows < 0 selects the natural support X.rows() - lowest_index(a).
Eigen::MatrixXd toeplitz_apply(const LaurentSymbol& a, const Eigen::MatrixXd& X,
                               Eigen::Index out_rows = -1);

}  // namespace detail

// T(a) * E applied through the factors: replaces U by T(a)*U over its finite
// support (plus bandwidth), keeping V. rows < 0 keeps the natural support.
Correction left_multiply_toeplitz(const LaurentSymbol& a, const Correction& c,
                                  Eigen::Index rows = -1);

}  // namespace qtm
