#include "qtm/qt_matrix.hpp"

#include <algorithm>
#include <limits>

#include "qtm/errors.hpp"
#include "qtm/wiener_hopf.hpp"

namespace qtm {

Eigen::MatrixXd QtMatrix::dense(Eigen::Index n, Eigen::Index m) const {
    Eigen::MatrixXd out(n, m);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < m; ++j) out(i, j) = symbol.at(j - i);
    return out + correction.dense(n, m);
}

double qt_norm(const QtMatrix& A) {
    return kAlpha * wiener_norm(A.symbol) + norm2(A.correction);
}

QtMatrix truncate(const QtMatrix& A, double eps) {
    const double nrm = qt_norm(A);
    const double out_eps = std::max(A.eps, eps);
    if (!(eps > 0.0) || nrm == 0.0)
        return {A.symbol, A.correction, out_eps};
    LaurentSymbol s = truncate_symbol(A.symbol, eps * nrm / (2.0 * kAlpha));
    Correction e = compress(A.correction, eps * nrm / 2.0);
    return {std::move(s), std::move(e), out_eps};
}

QtMatrix add(const QtMatrix& A, const QtMatrix& B) {
    const double eps = std::max(A.eps, B.eps);
    QtMatrix out{qtm::add(A.symbol, B.symbol),
                 concat(A.correction, B.correction), eps};
    return truncate(out, eps);
}

QtMatrix sub(const QtMatrix& A, const QtMatrix& B) {
    return qtm::add(A, scale(B, -1.0));
}

QtMatrix scale(const QtMatrix& A, double s) {
    if (s == 0.0) return {LaurentSymbol::zero(), Correction::zero(), A.eps};
    Correction e = A.correction;
    if (!e.is_zero()) e = Correction(e.U * s, e.V);
    return {qtm::scale(A.symbol, s), std::move(e), A.eps};
}

namespace {

// Adds rows-aligned factor blocks, zero-padding to the taller one.
Eigen::MatrixXd pad_add(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
    if (x.size() == 0) return y;
    if (y.size() == 0) return x;
    const Eigen::Index rows = std::max(x.rows(), y.rows());
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(rows, x.cols());
    out.topRows(x.rows()) = x;
    out.topRows(y.rows()) += y;
    return out;
}

}  // namespace

QtMatrix multiply(const QtMatrix& A, const QtMatrix& B) {
    const double eps = std::max(A.eps, B.eps);
    const double est = qt_norm(A) * qt_norm(B);
    LaurentSymbol c = qtm::multiply(A.symbol, B.symbol);

    Correction corr = Correction::zero();

    // Toeplitz-times-Toeplitz remainder: T(a)T(b) = T(ab) - H(a-)H(b+).
    const LaurentSymbol am = split(A.symbol).minus;
    const LaurentSymbol bp = split(B.symbol).plus;
    if (!am.is_zero() && !bp.is_zero() && est > 0.0) {
        const double bound = wiener_norm(am) * wiener_norm(bp);
        const double rel = (eps * est / 4.0) / bound;
        Correction h = compress(HankelProduct{am, bp, -1, -1, -1}, rel);
        if (!h.is_zero()) corr = concat(corr, Correction(-h.U, h.V));
    }

    // T(a) * E_b keeps V_b and maps U_b through the Toeplitz part.
    corr = concat(corr, left_multiply_toeplitz(A.symbol, B.correction));

    // E_a * (T(b) + E_b) = U_a * (T(b)^T V_a + V_b (U_b^T V_a))^T.
    if (!A.correction.is_zero()) {
        Eigen::MatrixXd w =
            detail::toeplitz_apply(reverse(B.symbol), A.correction.V);
        if (!B.correction.is_zero()) {
            const Eigen::Index r =
                std::min(B.correction.U.rows(), A.correction.V.rows());
            const Eigen::MatrixXd inner = B.correction.U.topRows(r).transpose() *
                                          A.correction.V.topRows(r);
            w = pad_add(w, B.correction.V * inner);
        }
        if (w.size() > 0) corr = concat(corr, Correction(A.correction.U, w));
    }

    return truncate(QtMatrix{std::move(c), std::move(corr), eps}, eps);
}

QtMatrix power(const QtMatrix& A, unsigned long long n) {
    QtMatrix result = QtMatrix::identity(A.eps);
    QtMatrix base = A;
    while (n > 0) {
        if (n & 1ULL) result = multiply(result, base);
        n >>= 1ULL;
        if (n > 0) base = multiply(base, base);
    }
    return result;
}

QtMatrix submatrix(const QtMatrix& A, Eigen::Index i, Eigen::Index j) {
    if (i < 1 || j < 1)
        throw DimensionMismatch("submatrix indices are 1-based");
    QtMatrix out;
    out.eps = A.eps;
    out.symbol = shift(A.symbol, i - j);
    const Eigen::Index dr = i - 1, dc = j - 1;
    if (!A.correction.is_zero() && A.correction.rows() > dr &&
        A.correction.cols() > dc) {
        out.correction = Correction(A.correction.U.bottomRows(A.correction.rows() - dr),
                                    A.correction.V.bottomRows(A.correction.cols() - dc));
    }
    return out;
}

namespace detail {

namespace {

// Series inverse with the residual target scaled by the inverse's own size:
// a coarse pass estimates ||u^-1||_W, then the iteration continues (seeded,
// no restart) to ||u v - 1||_W <= (tol / ||v||_W) * ||u||_W, or to the
// rounding floor when the target sits below it. achieved_tol, when given,
// receives the relative tolerance actually reached (>= tol at the floor).
LaurentSymbol factor_inverse(const LaurentSymbol& u, double tol,
                             const LaurentSymbol* seed,
                             double* achieved_tol = nullptr) {
    const double unorm = wiener_norm(u);
    LaurentSymbol coarse = invert_series_impl<double>(
        u, [](double rn) { return rn <= 1e-2; }, nullptr, seed, true);
    const double vnorm = std::max(wiener_norm(coarse), 1e-300);
    const double target =
        std::max(tol * unorm / vnorm, std::numeric_limits<double>::min());
    double rn = 0.0;
    LaurentSymbol v = invert_series_impl<double>(
        u, [target](double r) { return r <= target; }, nullptr, &coarse, true,
        &rn);
    if (achieved_tol)
        *achieved_tol = rn * std::max(wiener_norm(v), 1e-300) /
                        std::max(unorm, 1e-300);
    return v;
}

}  // namespace

ToeplitzInverseParts invert_toeplitz_parts(const LaurentSymbol& a, double eps) {
    if (a.is_zero())
        throw SingularMatrix("zero symbol has no inverse");
    const WienerHopfFactorization f = factorize(a, eps / 4.0);

    ToeplitzInverseParts out;
    double ach_u = eps, ach_l = eps;
    out.v = factor_inverse(f.u, eps, &f.u_inv_seed, &ach_u);
    out.w = factor_inverse(f.l, eps, &f.l_inv_seed, &ach_l);
    out.b = qtm::multiply(out.v, reverse(out.w));

    // T(w_rev) T(v) = T(b) - H(w)H(v); only indices >= 1 of w and v enter.
    Correction h = compress(HankelProduct{out.w, out.v, -1, -1, -1}, eps / 4.0);
    if (!h.is_zero()) out.corr = Correction(-h.U, h.V);

    // Requested accuracy, or the series rounding floor where that is coarser.
    const double eff = std::max({eps, ach_u, ach_l});
    out.bound =
        (kAlpha * wiener_norm(out.b) + wiener_norm(out.v) * wiener_norm(out.w)) *
        eff;
    return out;
}

}  // namespace detail

QtMatrix invert_toeplitz(const LaurentSymbol& a, double eps, double* error_bound) {
    detail::ToeplitzInverseParts parts = detail::invert_toeplitz_parts(a, eps);
    if (error_bound) *error_bound = parts.bound;
    return truncate(QtMatrix{std::move(parts.b), std::move(parts.corr), eps}, eps);
}

QtMatrix invert(const QtMatrix& A, double* error_bound) {
    const double eps = A.eps;
    if (A.symbol.is_zero())
        throw SingularMatrix("symbol part is zero; a compact operator has no "
                             "bounded inverse");
    detail::ToeplitzInverseParts parts =
        detail::invert_toeplitz_parts(A.symbol, eps);
    if (A.correction.is_zero()) {
        if (error_bound) *error_bound = parts.bound;
        return truncate(QtMatrix{parts.b, parts.corr, eps}, eps);
    }

    // Woodbury on A = T + U V^T:
    //   A^-1 = T^-1 - (T^-1 U) S^-1 (T^-T V)^T,  S = I + V^T (T^-1 U),
    // with T^-1 = T(w_rev) T(v) applied through two triangular convolutions.
    const Eigen::MatrixXd up = detail::toeplitz_apply(
        reverse(parts.w), detail::toeplitz_apply(parts.v, A.correction.U));
    const Eigen::Index k = A.correction.rank();
    const Eigen::Index common = std::min(up.rows(), A.correction.V.rows());
    Eigen::MatrixXd S = Eigen::MatrixXd::Identity(k, k);
    S += A.correction.V.topRows(common).transpose() * up.topRows(common);

    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(S);
    const double smax = svd.singularValues()(0);
    const double smin = svd.singularValues()(k - 1);
    if (!(smin > 0.0) || smax / smin > 1.0 / (100.0 * eps))
        throw SingularSchurComplement(
            "I + V^T T^-1 U is numerically singular at the working accuracy");

    const Eigen::MatrixXd wp = detail::toeplitz_apply(
        reverse(parts.v), detail::toeplitz_apply(parts.w, A.correction.V));
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(S.transpose());
    const Eigen::MatrixXd us = lu.solve(up.transpose()).transpose();  // up * S^-1

    Correction corr = concat(parts.corr, Correction(-us, wp));
    if (error_bound) {
        const double sinv = 1.0 / smin;
        *error_bound = parts.bound * std::max(1.0, sinv) *
                       (1.0 + norm2(A.correction) *
                                  (kAlpha * wiener_norm(parts.b) + norm2(parts.corr)));
    }
    return truncate(QtMatrix{parts.b, std::move(corr), eps}, eps);
}

namespace {

// Bottom-up UL factorization M = U L of a dense corner, L carrying the fixed
// diagonal ldiag so the factors blend into the Toeplitz tails at the seam.
void dense_ul(Eigen::MatrixXd work, double ldiag, Eigen::MatrixXd& U,
              Eigen::MatrixXd& L) {
    const Eigen::Index n = work.rows();
    const double scale = work.norm() + std::numeric_limits<double>::min();
    U = Eigen::MatrixXd::Zero(n, n);
    L = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index k = n - 1; k >= 0; --k) {
        const double piv = work(k, k);
        if (std::abs(piv) <= 1e3 * std::numeric_limits<double>::epsilon() * scale)
            throw FactorizationFailed(
                "trailing corner minor is singular; no UL factorization");
        L(k, k) = ldiag;
        U(k, k) = piv / ldiag;
        if (k > 0) {
            U.col(k).head(k) = work.col(k).head(k) / ldiag;
            L.row(k).head(k) = work.row(k).head(k) / U(k, k);
            work.topLeftCorner(k, k) -= U.col(k).head(k) * L.row(k).head(k);
        }
    }
}

}  // namespace

UlFactorization ul(const QtMatrix& A, double eps) {
    const WienerHopfFactorization f = factorize(A.symbol, eps / 4.0);
    const LaurentSymbol lrev = reverse(f.l);
    if (A.is_toeplitz()) {
        // T(a) = T(u) T(l_rev) exactly: u is analytic, so the Hankel
        // remainder H(u-)H(l_rev+) vanishes.
        return {QtMatrix::toeplitz(f.u, eps), QtMatrix::toeplitz(lrev, eps)};
    }

    const LaurentSymbol v = detail::factor_inverse(f.u, eps, &f.u_inv_seed);
    const LaurentSymbol w = detail::factor_inverse(f.l, eps, &f.l_inv_seed);
    const Eigen::Index nm = static_cast<Eigen::Index>(A.symbol.neg_degree());
    const Eigen::Index np = static_cast<Eigen::Index>(A.symbol.pos_degree());
    const Eigen::Index N = std::max<Eigen::Index>(
        {A.correction.rows(), A.correction.cols(), nm, np, Eigen::Index{1}});

    // Partition at N: the tail is exactly Toeplitz, so U22 = T(u) and
    // L22 = T(l_rev) there, and the cross blocks are forced:
    //   U12 = A12 L22^-1 (finite: A12 has n+ nonzero columns),
    //   L21 = U22^-1 A21 (finite: A21 has n- nonzero rows),
    // and the corner must satisfy U11 L11 = A11 - U12 L21.
    Eigen::MatrixXd A12 = Eigen::MatrixXd::Zero(N, np);
    for (Eigen::Index i = 0; i < N; ++i)
        for (Eigen::Index jj = 0; jj < np; ++jj)
            A12(i, jj) = A.symbol.at(N + jj - i);
    Eigen::MatrixXd R(np, np);  // leading rows of T(w_rev): entries w_{r-c}
    for (Eigen::Index r = 0; r < np; ++r)
        for (Eigen::Index c2 = 0; c2 < np; ++c2) R(r, c2) = w.at(r - c2);
    const Eigen::MatrixXd U12 = A12 * R;

    Eigen::MatrixXd A21 = Eigen::MatrixXd::Zero(nm, N);
    for (Eigen::Index ii = 0; ii < nm; ++ii)
        for (Eigen::Index j = 0; j < N; ++j)
            A21(ii, j) = A.symbol.at(j - N - ii);
    Eigen::MatrixXd Cv(nm, nm);  // leading columns of T(v): entries v_{c-r}
    for (Eigen::Index r = 0; r < nm; ++r)
        for (Eigen::Index c2 = 0; c2 < nm; ++c2) Cv(r, c2) = v.at(c2 - r);
    const Eigen::MatrixXd L21 = Cv * A21;

    // U12 covers tail columns N..N+np-1 and L21 tail rows N..N+nm-1; their
    // product only sees the shared tail range.
    const Eigen::Index q = std::min(np, nm);
    Eigen::MatrixXd Mt = A.dense(N, N) - U12.leftCols(q) * L21.topRows(q);
    Eigen::MatrixXd U11, L11;
    dense_ul(Mt, f.l.at(0), U11, L11);

    // Corrections are the corner factors minus the matching Toeplitz
    // sections, glued with the forced cross blocks.
    Eigen::MatrixXd F = Eigen::MatrixXd::Zero(N, N + np);
    for (Eigen::Index i = 0; i < N; ++i)
        for (Eigen::Index j = 0; j < N; ++j)
            F(i, j) = U11(i, j) - f.u.at(j - i);
    for (Eigen::Index i = 0; i < N; ++i)
        for (Eigen::Index jj = 0; jj < np; ++jj)
            F(i, N + jj) = U12(i, jj) - f.u.at(N + jj - i);

    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(N + nm, N);
    for (Eigen::Index i = 0; i < N; ++i)
        for (Eigen::Index j = 0; j < N; ++j)
            K(i, j) = L11(i, j) - lrev.at(j - i);
    for (Eigen::Index ii = 0; ii < nm; ++ii)
        for (Eigen::Index j = 0; j < N; ++j)
            K(N + ii, j) = L21(ii, j) - lrev.at(j - N - ii);

    UlFactorization out;
    out.U = truncate(QtMatrix{f.u, correction_from_dense(F), eps}, eps);
    out.L = truncate(QtMatrix{lrev, correction_from_dense(K), eps}, eps);
    return out;
}

}  // namespace qtm
