#pragma once

// Laurent symbols a(z) = sum_k a_k z^k with finite support, the scalar layer
// underneath every Toeplitz operation. Coefficients are stored densely from
// lowest_index upward; the canonical form keeps nonzero extreme coefficients
// (exact zeros only are trimmed) and represents the zero symbol as an empty
// coefficient vector with lowest_index = 0.
//
// The default scalar type is double; the complex variant instantiates the
// same template.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

#include "qtm/errors.hpp"
#include "qtm/fft.hpp"

namespace qtm {

template <class S>
struct BasicLaurentSymbol {
    long long lowest_index = 0;
    std::vector<S> coefficients;

    BasicLaurentSymbol() = default;
    BasicLaurentSymbol(long long lo, std::vector<S> coeffs)
        : lowest_index(lo), coefficients(std::move(coeffs)) {
        trim();
    }

    static BasicLaurentSymbol zero() { return {}; }
    static BasicLaurentSymbol one() { return {0, {S(1)}}; }
    static BasicLaurentSymbol monomial(long long k, S v = S(1)) { return {k, {v}}; }

    bool is_zero() const { return coefficients.empty(); }
    long long highest_index() const {
        return lowest_index + static_cast<long long>(coefficients.size()) - 1;
    }
    // Support length; 0 for the zero symbol.
    std::size_t support() const { return coefficients.size(); }

    S at(long long k) const {
        if (is_zero() || k < lowest_index || k > highest_index()) return S(0);
        return coefficients[static_cast<std::size_t>(k - lowest_index)];
    }

    // Degree of the negative / positive tail (n_- and n_+).
    long long neg_degree() const { return std::max(0LL, -lowest_index); }
    long long pos_degree() const { return is_zero() ? 0 : std::max(0LL, highest_index()); }

    void trim() {
        std::size_t b = 0, e = coefficients.size();
        while (b < e && coefficients[b] == S(0)) ++b;
        while (e > b && coefficients[e - 1] == S(0)) --e;
        if (b == e) {
            coefficients.clear();
            lowest_index = 0;
            return;
        }
        if (b > 0) {
            coefficients.erase(coefficients.begin(),
                               coefficients.begin() + static_cast<std::ptrdiff_t>(b));
            lowest_index += static_cast<long long>(b);
        }
        coefficients.resize(e - b);
    }
};

using LaurentSymbol = BasicLaurentSymbol<double>;
using ComplexLaurentSymbol = BasicLaurentSymbol<std::complex<double>>;

template <class S>
double wiener_norm(const BasicLaurentSymbol<S>& a) {
    double s = 0.0;
    for (const auto& v : a.coefficients) s += std::abs(v);
    return s;
}

template <class S>
BasicLaurentSymbol<S> add(const BasicLaurentSymbol<S>& a, const BasicLaurentSymbol<S>& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    const long long lo = std::min(a.lowest_index, b.lowest_index);
    const long long hi = std::max(a.highest_index(), b.highest_index());
    std::vector<S> c(static_cast<std::size_t>(hi - lo + 1), S(0));
    for (std::size_t i = 0; i < a.coefficients.size(); ++i)
        c[static_cast<std::size_t>(a.lowest_index - lo) + i] += a.coefficients[i];
    for (std::size_t i = 0; i < b.coefficients.size(); ++i)
        c[static_cast<std::size_t>(b.lowest_index - lo) + i] += b.coefficients[i];
    return {lo, std::move(c)};
}

template <class S>
BasicLaurentSymbol<S> negate(const BasicLaurentSymbol<S>& a) {
    auto c = a.coefficients;
    for (auto& v : c) v = -v;
    return {a.lowest_index, std::move(c)};
}

template <class S>
BasicLaurentSymbol<S> scale(const BasicLaurentSymbol<S>& a, S s) {
    if (s == S(0)) return {};
    auto c = a.coefficients;
    for (auto& v : c) v *= s;
    return {a.lowest_index, std::move(c)};
}

template <class S>
BasicLaurentSymbol<S> sub(const BasicLaurentSymbol<S>& a, const BasicLaurentSymbol<S>& b) {
    return add(a, negate(b));
}

template <class S>
BasicLaurentSymbol<S> multiply(const BasicLaurentSymbol<S>& a,
                               const BasicLaurentSymbol<S>& b) {
    if (a.is_zero() || b.is_zero()) return {};
    auto c = detail::conv(a.coefficients, b.coefficients);
    return {a.lowest_index + b.lowest_index, std::move(c)};
}

// Substitution z -> z^-1.
template <class S>
BasicLaurentSymbol<S> reverse(const BasicLaurentSymbol<S>& a) {
    if (a.is_zero()) return {};
    auto c = a.coefficients;
    std::reverse(c.begin(), c.end());
    return {-a.highest_index(), std::move(c)};
}

// Multiplication by z^k.
template <class S>
BasicLaurentSymbol<S> shift(const BasicLaurentSymbol<S>& a, long long k) {
    if (a.is_zero()) return {};
    return {a.lowest_index + k, a.coefficients};
}

template <class S>
struct SymbolSplit {
    BasicLaurentSymbol<S> minus;  // sum_{i>=1} a_{-i} z^i, re-indexed to nonnegative powers
    S center;                     // a_0
    BasicLaurentSymbol<S> plus;   // sum_{i>=1} a_i z^i
};

// a(z) = minus(z^-1) + center + plus(z), exactly.
template <class S>
SymbolSplit<S> split(const BasicLaurentSymbol<S>& a) {
    SymbolSplit<S> out;
    out.center = a.at(0);
    if (a.lowest_index < 0) {
        const long long n = -a.lowest_index;
        std::vector<S> m(static_cast<std::size_t>(n + 1), S(0));
        for (long long i = 1; i <= n; ++i) m[static_cast<std::size_t>(i)] = a.at(-i);
        out.minus = BasicLaurentSymbol<S>(0, std::move(m));
    }
    if (a.highest_index() > 0 && !a.is_zero()) {
        const long long n = a.highest_index();
        std::vector<S> p(static_cast<std::size_t>(n + 1), S(0));
        for (long long i = 1; i <= n; ++i) p[static_cast<std::size_t>(i)] = a.at(i);
        out.plus = BasicLaurentSymbol<S>(0, std::move(p));
    }
    return out;
}

// Greedy removal of extreme coefficients: while the smaller extreme modulus
// fits inside the remaining budget, remove it and debit the budget. The sum
// of removed moduli never exceeds eps, so ||a - result||_W <= eps.
template <class S>
BasicLaurentSymbol<S> truncate_symbol(const BasicLaurentSymbol<S>& a, double eps) {
    if (a.is_zero() || eps <= 0.0) return a;
    std::size_t b = 0, e = a.coefficients.size();
    double budget = eps;
    while (b < e) {
        const double mlo = std::abs(a.coefficients[b]);
        const double mhi = std::abs(a.coefficients[e - 1]);
        if (mhi < mlo) {
            if (mhi >= budget) break;
            budget -= mhi;
            --e;
        } else {
            if (mlo >= budget) break;
            budget -= mlo;
            ++b;
        }
    }
    if (b == e) return {};
    std::vector<S> c(a.coefficients.begin() + static_cast<std::ptrdiff_t>(b),
                     a.coefficients.begin() + static_cast<std::ptrdiff_t>(e));
    return {a.lowest_index + static_cast<long long>(b), std::move(c)};
}

namespace detail {

// First n coefficients of u^-1 by forward substitution on the triangular
// Toeplitz system.
template <class S>
std::vector<S> series_inverse_head(const BasicLaurentSymbol<S>& u, std::size_t n) {
    std::vector<S> v(n, S(0));
    const S u0 = u.at(0);
    v[0] = S(1) / u0;
    for (std::size_t k = 1; k < n; ++k) {
        S acc = S(0);
        const long long kmax = std::min<long long>(static_cast<long long>(k), u.highest_index());
        for (long long j = 1; j <= kmax; ++j)
            acc += u.at(j) * v[static_cast<std::size_t>(static_cast<long long>(k) - j)];
        v[k] = -acc / u0;
    }
    return v;
}

// Newton doubling for power-series inversion. Each pass applies
// v <- v*(2 - u*v), which squares the residual r = u*v - 1; iteration stops
// once stop(||r||_W) holds. Squaring only contracts from ||r|| < 1, so the
// starting segment (an optional caller seed, or a triangular solve whose
// length doubles from 8) is grown until its residual drops below 1/2.
//
// When the target sits below the rounding floor of the series the residual
// stops improving; by default that throws NoConvergence, while best_effort
// returns the best iterate seen instead. achieved, when given, receives the
// residual of the returned iterate.
template <class S>
BasicLaurentSymbol<S> invert_series_impl(const BasicLaurentSymbol<S>& u,
                                         const std::function<bool(double)>& stop,
                                         std::vector<double>* residual_trace = nullptr,
                                         const BasicLaurentSymbol<S>* seed = nullptr,
                                         bool best_effort = false,
                                         double* achieved = nullptr) {
    if (u.is_zero() || u.lowest_index > 0 || u.at(0) == S(0))
        throw NonInvertibleSeries("power series has zero constant term");
    if (u.lowest_index < 0)
        throw DimensionMismatch("power series inversion requires lowest_index = 0");

    const BasicLaurentSymbol<S> id = BasicLaurentSymbol<S>::one();
    BasicLaurentSymbol<S> v;
    double rn = std::numeric_limits<double>::infinity();
    bool started = false;
    if (seed && !seed->is_zero()) {
        v = *seed;
        rn = wiener_norm(sub(multiply(u, v), id));
        started = std::isfinite(rn) && (rn < 0.5 || stop(rn));
    }
    if (!started) {
        constexpr std::size_t kMaxHead = std::size_t(1) << 20;
        for (std::size_t n = 8;; n *= 2) {
            v = BasicLaurentSymbol<S>(0, series_inverse_head(u, n));
            rn = wiener_norm(sub(multiply(u, v), id));
            if (std::isfinite(rn) && rn < 0.5) break;
            if (n >= kMaxHead)
                throw NoConvergence("no contracting initial segment for power series "
                                    "inversion; zeros inside or near the unit disk");
        }
    }

    constexpr int kMaxDoublings = 50;
    BasicLaurentSymbol<S> best = v;
    double best_rn = rn;
    double prev = std::numeric_limits<double>::infinity();
    for (int it = 0;; ++it) {
        if (residual_trace) residual_trace->push_back(rn);
        if (std::isfinite(rn) && rn < best_rn) {
            best = v;
            best_rn = rn;
        }
        if (stop(rn)) {
            if (achieved) *achieved = rn;
            return v;
        }
        if (it == kMaxDoublings || !(rn < prev) || !std::isfinite(rn)) {
            if (best_effort) {
                if (achieved) *achieved = best_rn;
                return best;
            }
            throw NoConvergence("power series inversion stalled; target below the "
                                "rounding floor for this series");
        }
        prev = rn;
        v = sub(scale(v, S(2)), multiply(v, multiply(u, v)));
        rn = wiener_norm(sub(multiply(u, v), id));
    }
}

}  // namespace detail

// Approximate inverse of a power series (lowest_index = 0), accurate to
// ||u*v - 1||_W <= eps * ||u||_W.
template <class S>
BasicLaurentSymbol<S> invert_power_series(const BasicLaurentSymbol<S>& u, double eps) {
    const double target = eps * wiener_norm(u);
    return detail::invert_series_impl<S>(u, [target](double rn) { return rn <= target; });
}

namespace detail {

inline double min_circle_modulus(const std::vector<std::complex<double>>& vals) {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& v : vals) m = std::min(m, std::abs(v));
    return m;
}

}  // namespace detail

// Winding number of a(z) around the origin as z traverses the unit circle,
// by accumulating argument increments over a refined transform grid. The
// grid starts at the smallest power of two >= 32 * support and doubles until
// the accumulated angle is within 1e-3 * 2*pi of an integer multiple.
template <class S>
long long winding_number(const BasicLaurentSymbol<S>& a) {
    if (a.is_zero()) throw SymbolVanishesOnCircle("zero symbol has no winding number");
    const double anorm = wiener_norm(a);
    std::size_t N = detail::next_pow2(std::max<std::size_t>(32 * a.support(), 32));
    constexpr std::size_t kMaxGrid = std::size_t(1) << 24;
    for (; N <= kMaxGrid; N *= 2) {
        const auto vals =
            detail::roots_of_unity_values(a.coefficients, a.lowest_index, N);
        if (detail::min_circle_modulus(vals) < 1e-10 * anorm)
            throw SymbolVanishesOnCircle("symbol modulus vanishes on the unit circle");
        double total = 0.0;
        for (std::size_t j = 0; j < N; ++j) {
            const auto& z0 = vals[j];
            const auto& z1 = vals[(j + 1) % N];
            total += std::arg(z1 / z0);  // increment wrapped to (-pi, pi]
        }
        const double w = total / (2.0 * std::numbers::pi);
        const double r = std::round(w);
        if (std::abs(w - r) <= 1e-3) return static_cast<long long>(r);
    }
    throw SymbolVanishesOnCircle(
        "winding number did not stabilize; symbol nearly vanishes on the circle");
}

}  // namespace qtm
