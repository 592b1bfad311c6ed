#pragma once

// Wiener-Hopf (spectral) factorization of a Laurent symbol with winding
// number zero: a(z) = u(z) * l(1/z) with u a polynomial of degree n+ whose
// zeros lie outside the closed unit disk and l a polynomial of degree n-
// with the same property. The factors come from the minimal solvents of the
// quadratic matrix equations attached to the block-tridiagonal form of T(a),
// computed by cyclic reduction.

#include <Eigen/Dense>

#include "qtm/symbol.hpp"

namespace qtm {

// p x p coefficient blocks of T(a) viewed as a block-tridiagonal operator:
// sub-diagonal Am1 (entries a_{j-i-p}, upper triangular), diagonal A0
// (entries a_{j-i}) and super-diagonal A1 (entries a_{p+j-i}, lower
// triangular). Requires p >= max(n-, n+).
struct QuadraticBlocks {
    Eigen::MatrixXd Am1, A0, A1;
    Eigen::Index p = 0;
};

QuadraticBlocks assemble_blocks(const LaurentSymbol& a, Eigen::Index p);

// Cyclic reduction output. G is the minimal solvent of
//   Am1 + A0 X + A1 X^2 = 0,
// R the minimal solvent of
//   A1 + X A0 + X^2 Am1 = 0;
// both have spectral radius < 1 when the symbol has winding number zero.
// W is the limit of the first-equation auxiliary sequence; it satisfies
// W = A0 - A1 W^-1 Am1 and both solvents are read off it:
// G = -W^-1 Am1, R = -A1 W^-1.
struct CyclicReductionResult {
    Eigen::MatrixXd G, R;
    Eigen::MatrixXd W;
    int iterations = 0;
    double residual_G = 0.0;  // ||Am1 + A0 G + A1 G^2||_F / scale
    double residual_R = 0.0;  // ||A1 + R A0 + R^2 Am1||_F / scale
};

// Dense cyclic reduction on the blocks. Stops once the coupling blocks are
// negligible against the inverses of the auxiliary limits:
//   min(||A^(k)||, ||C^(k)||) * max(||Bt^-1||, ||Bh^-1||) <= tol.
// Throws Breakdown when an iterate becomes numerically singular and
// NoConvergence when the couplings fail to decay within max_iter steps.
CyclicReductionResult cyclic_reduction(const QuadraticBlocks& blocks, double tol,
                                       int max_iter = 64);

struct WienerHopfFactorization {
    LaurentSymbol u;  // degree n+ polynomial, u(z); normalization folded in
    LaurentSymbol l;  // degree n- polynomial, evaluated at 1/z in products
    // First p coefficients of u^-1 and l^-1, read off the solvents; used to
    // seed series inversion.
    LaurentSymbol u_inv_seed;
    LaurentSymbol l_inv_seed;
    double residual = 0.0;  // ||a - u(z) l(1/z)||_W / ||a||_W
    int cr_iterations = 0;
};

// Factorize a symbol that does not vanish on the unit circle and has winding
// number zero; throws FactorizationFailed otherwise (and propagates
// SymbolVanishesOnCircle from the winding test).
WienerHopfFactorization factorize(const LaurentSymbol& a, double tol);

}  // namespace qtm
