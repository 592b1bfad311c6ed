#pragma once

#include <stdexcept>
#include <string>

namespace qtm {

// Base class for every failure raised by the library. Callers that do not
// care about the precise failure mode can catch this one type.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Power series with vanishing constant term cannot be inverted.
struct NonInvertibleSeries : Error {
    using Error::Error;
};

// An iteration hit its cap without meeting its stopping criterion.
struct NoConvergence : Error {
    using Error::Error;
};

// Symbol has (numerically) a zero on the unit circle; winding number and
// Wiener-Hopf factorization are undefined there.
struct SymbolVanishesOnCircle : Error {
    using Error::Error;
};

// Requested reblocking size is smaller than the symbol bandwidth.
struct BlockTooSmall : Error {
    using Error::Error;
};

// A pivot block of cyclic reduction became numerically singular.
struct Breakdown : Error {
    using Error::Error;
};

// Wiener-Hopf factorization does not exist or could not be computed
// (nonzero winding number, zero symbol, or failed factor validation).
struct FactorizationFailed : Error {
    using Error::Error;
};

// Schur complement in the Sherman-Morrison-Woodbury step is ill conditioned.
struct SingularSchurComplement : Error {
    using Error::Error;
};

// Operand shapes are incompatible.
struct DimensionMismatch : Error {
    using Error::Error;
};

// Finite matrix (or Woodbury core) is singular.
struct SingularMatrix : Error {
    using Error::Error;
};

// Operation outside the supported domain of the algorithm.
struct Unsupported : Error {
    using Error::Error;
};

// Input coefficient is negative where a nonnegative model is required.
struct NegativeCoefficient : Error {
    using Error::Error;
};

// An iterate of a matrix iteration became singular.
struct SingularIterate : Error {
    using Error::Error;
};

}  // namespace qtm
