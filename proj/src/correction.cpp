#include "qtm/correction.hpp"

#include <complex>

#include "qtm/errors.hpp"
#include "qtm/fft.hpp"

namespace qtm {

Correction::Correction(Eigen::MatrixXd u, Eigen::MatrixXd v)
    : U(std::move(u)), V(std::move(v)) {
    if (U.cols() != V.cols())
        throw DimensionMismatch("correction factors must share the rank dimension");
    if (U.cols() == 0 || U.rows() == 0 || V.rows() == 0) {
        U.resize(0, 0);
        V.resize(0, 0);
    }
}

Eigen::MatrixXd Correction::dense(Eigen::Index n, Eigen::Index m) const {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, m);
    const Eigen::Index r = std::min(n, rows());
    const Eigen::Index c = std::min(m, cols());
    if (!is_zero() && r > 0 && c > 0)
        out.topLeftCorner(r, c) = U.topRows(r) * V.topRows(c).transpose();
    return out;
}

namespace {

struct ThinQr {
    Eigen::MatrixXd Q;  // n x r
    Eigen::MatrixXd R;  // r x k, upper trapezoidal
};

ThinQr thin_qr(const Eigen::MatrixXd& a) {
    const Eigen::Index r = std::min(a.rows(), a.cols());
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
    ThinQr out;
    out.Q = qr.householderQ() * Eigen::MatrixXd::Identity(a.rows(), r);
    out.R = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
    return out;
}

}  // namespace

EconomySvd economy_svd(const Correction& c) {
    EconomySvd out;
    if (c.is_zero()) {
        out.U.resize(0, 0);
        out.S.resize(0);
        out.V.resize(0, 0);
        return out;
    }
    const ThinQr qu = thin_qr(c.U);
    const ThinQr qv = thin_qr(c.V);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(qu.R * qv.R.transpose(),
                                          Eigen::ComputeThinU | Eigen::ComputeThinV);
    out.U = qu.Q * svd.matrixU();
    out.S = svd.singularValues();
    out.V = qv.Q * svd.matrixV();
    return out;
}

double norm2(const Correction& c) {
    if (c.is_zero()) return 0.0;
    const ThinQr qu = thin_qr(c.U);
    const ThinQr qv = thin_qr(c.V);
    return (qu.R * qv.R.transpose()).jacobiSvd().singularValues()(0);
}

Correction compress(const Correction& c, double budget) {
    if (c.is_zero()) return c;
    const EconomySvd f = economy_svd(c);

    // Rank cut: dropping every singular value below budget/2 perturbs the
    // 2-norm by at most the largest one dropped.
    const double svcut = budget / 2;
    Eigen::Index r = f.S.size();
    while (r > 0 && f.S(r - 1) < svcut) --r;
    if (r == 0) return Correction::zero();

    // Trailing-row drop on the scaled factors, smaller side first, debiting
    // the remaining half of the budget.
    const Eigen::VectorXd s = f.S.head(r);
    Eigen::Index nu = f.U.rows(), nv = f.V.rows();
    double left = budget / 2;
    auto row_norm = [&s](const Eigen::MatrixXd& m, Eigen::Index i, Eigen::Index r_) {
        return (m.row(i).head(r_).transpose().array() * s.array()).matrix().norm();
    };
    while (nu > 0 && nv > 0) {
        const double ru = row_norm(f.U, nu - 1, r);
        const double rv = row_norm(f.V, nv - 1, r);
        const double m = std::min(ru, rv);
        if (!(m < left)) break;
        left -= m;
        if (ru <= rv)
            --nu;
        else
            --nv;
    }
    if (nu == 0 || nv == 0) return Correction::zero();

    if (r == f.S.size() && nu == f.U.rows() && nv == f.V.rows())
        return c;  // nothing removable: keep the representation bit for bit

    const Eigen::VectorXd h = s.cwiseSqrt();
    return Correction(f.U.topRows(nu).leftCols(r) * h.asDiagonal(),
                      f.V.topRows(nv).leftCols(r) * h.asDiagonal());
}

Correction concat(const Correction& a, const Correction& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    const Eigen::Index nr = std::max(a.rows(), b.rows());
    const Eigen::Index nc = std::max(a.cols(), b.cols());
    const Eigen::Index k = a.rank() + b.rank();
    Eigen::MatrixXd U = Eigen::MatrixXd::Zero(nr, k);
    Eigen::MatrixXd V = Eigen::MatrixXd::Zero(nc, k);
    U.topLeftCorner(a.rows(), a.rank()) = a.U;
    U.topRightCorner(b.rows(), b.rank()) = b.U;
    V.topLeftCorner(a.cols(), a.rank()) = a.V;
    V.topRightCorner(b.cols(), b.rank()) = b.V;
    return Correction(std::move(U), std::move(V));
}

Correction correction_from_dense(const Eigen::MatrixXd& d, double rel_cut) {
    if (d.rows() == 0 || d.cols() == 0) return Correction::zero();
    Eigen::BDCSVD<Eigen::MatrixXd> svd(d, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& s = svd.singularValues();
    if (s.size() == 0 || s(0) == 0.0) return Correction::zero();
    Eigen::Index r = 0;
    while (r < s.size() && s(r) > rel_cut * s(0)) ++r;
    if (r == 0) return Correction::zero();
    const Eigen::VectorXd h = s.head(r).cwiseSqrt();
    return Correction(svd.matrixU().leftCols(r) * h.asDiagonal(),
                      svd.matrixV().leftCols(r) * h.asDiagonal());
}

namespace detail {

Eigen::MatrixXd toeplitz_apply(const LaurentSymbol& a, const Eigen::MatrixXd& X,
                               Eigen::Index out_rows) {
    const Eigen::Index n = X.rows();
    if (out_rows < 0) out_rows = std::max<Eigen::Index>(
        0, n - static_cast<Eigen::Index>(a.is_zero() ? 0 : a.lowest_index));
    Eigen::MatrixXd Y = Eigen::MatrixXd::Zero(out_rows, X.cols());
    if (a.is_zero() || n == 0 || out_rows == 0) return Y;

    const long long hi = a.highest_index();
    const std::size_t L = a.support();
    std::vector<double> rev(L);
    for (std::size_t m = 0; m < L; ++m)
        rev[m] = a.coefficients[L - 1 - m];  // rev[m] = a_{hi-m}

    const std::size_t conv_len = L + static_cast<std::size_t>(n) - 1;
    const bool use_fft = conv_len >= detail::kDirectConvCutoff;
    std::size_t fft_len = detail::next_pow2(conv_len);
    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> fa;
    if (use_fft) {
        std::vector<double> pad(fft_len, 0.0);
        std::copy(rev.begin(), rev.end(), pad.begin());
        fft.fwd(fa, pad);
    }

    std::vector<double> x(static_cast<std::size_t>(n));
    for (Eigen::Index col = 0; col < X.cols(); ++col) {
        for (Eigen::Index j = 0; j < n; ++j) x[static_cast<std::size_t>(j)] = X(j, col);
        std::vector<double> cvec;
        if (use_fft) {
            std::vector<double> pad(fft_len, 0.0);
            std::copy(x.begin(), x.end(), pad.begin());
            std::vector<std::complex<double>> fx;
            fft.fwd(fx, pad);
            for (std::size_t i = 0; i < fft_len; ++i) fx[i] *= fa[i];
            fft.inv(cvec, fx);
        } else {
            cvec = detail::conv_direct(rev, x);
        }
        // Y(i,:) = c[hi + i - 1] with 1-based i.
        for (Eigen::Index i = 1; i <= out_rows; ++i) {
            const long long t = hi + static_cast<long long>(i) - 1;
            if (t < 0 || t >= static_cast<long long>(conv_len)) continue;
            Y(i - 1, col) = cvec[static_cast<std::size_t>(t)];
        }
    }
    return Y;
}

}  // namespace detail

Correction left_multiply_toeplitz(const LaurentSymbol& a, const Correction& c,
                                  Eigen::Index rows) {
    if (c.is_zero() || a.is_zero()) return Correction::zero();
    return Correction(detail::toeplitz_apply(a, c.U, rows), c.V);
}

}  // namespace qtm
