#pragma once

// Products H(f)H(g) of two Hankel operators, kept in factored form and
// compressed into low-rank corrections. H(f) has entries f_{i+j-1}, so only
// indices >= 1 of the symbols participate; the operators are applied through
// fast convolutions and never formed densely except below the dense
// crossover (or in oracles).
//
// Optional clip dimensions (rows, inner, cols) restrict the product to
// H_{rows,inner}(f) * H_{inner,cols}(g), the finite-section form; negative
// values mean unclipped.

#include <cstdint>
#include <Eigen/Dense>

#include "qtm/correction.hpp"
#include "qtm/symbol.hpp"

namespace qtm {

enum class CompressionMethod { lanczos, random, dense };

// Process-wide default used by compress() when no method is passed.
// Read once at operation start.
void set_default_compression(CompressionMethod m);
CompressionMethod default_compression();

struct HankelProduct {
    LaurentSymbol f;
    LaurentSymbol g;
    Eigen::Index rows = -1;
    Eigen::Index inner = -1;
    Eigen::Index cols = -1;

    // Nonzero-support dimensions of the product operator.
    Eigen::Index op_rows() const;
    Eigen::Index op_cols() const;
    Eigen::Index op_inner() const;

    HankelProduct transpose() const {
        return {g, f, cols, inner, rows};
    }
};

// Y = H(f) (H(g) X); X must have op_cols() rows.
Eigen::MatrixXd apply(const HankelProduct& hp, const Eigen::MatrixXd& X);
Eigen::MatrixXd apply_transpose(const HankelProduct& hp, const Eigen::MatrixXd& X);

// Dense product, for oracles and the small-size direct path.
Eigen::MatrixXd dense(const HankelProduct& hp);

// Golub-Kahan bidiagonalization with full reorthogonalization; stops when
// the smallest singular-value estimate of the bidiagonal stays below
// tol * (largest estimate) for 3 consecutive steps, or on breakdown, or when
// the full dimension is exhausted (exact factorization).
Correction compress_lanczos(const HankelProduct& hp, double tol);

// Adaptive randomized range finder: Gaussian blocks starting at 16 columns
// (plus oversampling 10), doubling until a sampled posterior residual check
// passes. Deterministic for a fixed seed.
Correction compress_random(const HankelProduct& hp, double tol,
                           std::uint64_t seed = 0x9e3779b97f4a7c15ULL);

// Dense SVD cut at tol (relative); sizes beyond the dense crossover defer to
// the adaptive default method.
Correction compress_dense(const HankelProduct& hp, double tol);

// Dispatcher: dense below the crossover (500), otherwise the requested or
// process-default adaptive method.
Correction compress(const HankelProduct& hp, double tol);
Correction compress(const HankelProduct& hp, double tol, CompressionMethod method);

namespace detail {

inline constexpr Eigen::Index kDenseCompressionCap = 500;

// Z_i = sum_{j=1}^{X.rows()} s_{i+j-1} X(j,:), 1-based, i = 1..out_rows.
Eigen::MatrixXd hankel_apply(const LaurentSymbol& s, const Eigen::MatrixXd& X,
                             Eigen::Index out_rows);

}  // namespace detail

}  // namespace qtm
