#include "qtm/hankel.hpp"

#include <atomic>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "qtm/errors.hpp"
#include "qtm/fft.hpp"

namespace qtm {

namespace {

std::atomic<CompressionMethod> g_default_compression{CompressionMethod::lanczos};

Eigen::Index clip(Eigen::Index support, Eigen::Index bound) {
    return bound < 0 ? support : std::min(support, bound);
}

}  // namespace

void set_default_compression(CompressionMethod m) { g_default_compression.store(m); }
CompressionMethod default_compression() { return g_default_compression.load(); }

Eigen::Index HankelProduct::op_rows() const {
    return clip(static_cast<Eigen::Index>(f.pos_degree()), rows);
}
Eigen::Index HankelProduct::op_cols() const {
    return clip(static_cast<Eigen::Index>(g.pos_degree()), cols);
}
Eigen::Index HankelProduct::op_inner() const {
    return clip(static_cast<Eigen::Index>(g.pos_degree()), inner);
}

namespace detail {

Eigen::MatrixXd hankel_apply(const LaurentSymbol& s, const Eigen::MatrixXd& X,
                             Eigen::Index out_rows) {
    Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(out_rows, X.cols());
    const Eigen::Index n = X.rows();
    const long long d = s.pos_degree();
    if (d <= 0 || n == 0 || out_rows == 0) return Z;

    // sp[m] = s_{m+1}
    std::vector<double> sp(static_cast<std::size_t>(d));
    for (long long m = 0; m < d; ++m) sp[static_cast<std::size_t>(m)] = s.at(m + 1);

    const std::size_t conv_len = sp.size() + static_cast<std::size_t>(n) - 1;
    const bool use_fft = conv_len >= detail::kDirectConvCutoff;
    const std::size_t fft_len = detail::next_pow2(conv_len);
    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> fs;
    if (use_fft) {
        std::vector<double> pad(fft_len, 0.0);
        std::copy(sp.begin(), sp.end(), pad.begin());
        fft.fwd(fs, pad);
    }

    std::vector<double> xr(static_cast<std::size_t>(n));
    for (Eigen::Index col = 0; col < X.cols(); ++col) {
        for (Eigen::Index j = 0; j < n; ++j)
            xr[static_cast<std::size_t>(n - 1 - j)] = X(j, col);  // reversed column
        std::vector<double> cvec;
        if (use_fft) {
            std::vector<double> pad(fft_len, 0.0);
            std::copy(xr.begin(), xr.end(), pad.begin());
            std::vector<std::complex<double>> fx;
            fft.fwd(fx, pad);
            for (std::size_t i = 0; i < fft_len; ++i) fx[i] *= fs[i];
            fft.inv(cvec, fx);
        } else {
            cvec = detail::conv_direct(sp, xr);
        }
        // Z(i,:) = c[(i-1) + n - 1], 1-based i.
        for (Eigen::Index i = 0; i < out_rows; ++i) {
            const std::size_t t = static_cast<std::size_t>(i + n - 1);
            if (t < cvec.size()) Z(i, col) = cvec[t];
        }
    }
    return Z;
}

}  // namespace detail

Eigen::MatrixXd apply(const HankelProduct& hp, const Eigen::MatrixXd& X) {
    const Eigen::Index nc = hp.op_cols();
    if (X.rows() != nc)
        throw DimensionMismatch("hankel product apply: input has wrong row count");
    const Eigen::Index nr = hp.op_rows();
    if (nr == 0 || nc == 0) return Eigen::MatrixXd::Zero(nr, X.cols());
    const Eigen::Index k = hp.op_inner();
    const Eigen::MatrixXd W = detail::hankel_apply(hp.g, X, k);
    return detail::hankel_apply(hp.f, W, nr);
}

Eigen::MatrixXd apply_transpose(const HankelProduct& hp, const Eigen::MatrixXd& X) {
    return apply(hp.transpose(), X);
}

Eigen::MatrixXd dense(const HankelProduct& hp) {
    const Eigen::Index nr = hp.op_rows();
    const Eigen::Index nc = hp.op_cols();
    if (nr == 0 || nc == 0) return Eigen::MatrixXd::Zero(nr, nc);
    return apply(hp, Eigen::MatrixXd::Identity(nc, nc));
}

namespace {

// Rank cut at tol * sigma_max, singular-value scaling split evenly between
// the two factors.
Correction cut_and_fold(const Eigen::MatrixXd& Ub, const Eigen::VectorXd& s,
                        const Eigen::MatrixXd& Vb, double tol) {
    if (s.size() == 0) return Correction::zero();
    Eigen::Index r = s.size();
    const double cut = tol * s(0);
    while (r > 0 && s(r - 1) <= cut) --r;
    if (r == 0) return Correction::zero();
    const Eigen::VectorXd h = s.head(r).cwiseSqrt();
    return Correction(Ub.leftCols(r) * h.asDiagonal(), Vb.leftCols(r) * h.asDiagonal());
}

}  // namespace

Correction compress_lanczos(const HankelProduct& hp, double tol) {
    const Eigen::Index nr = hp.op_rows();
    const Eigen::Index nc = hp.op_cols();
    if (nr == 0 || nc == 0) return Correction::zero();
    const Eigen::Index kmax = std::min(nr, nc);

    // Deterministic start vector.
    std::mt19937_64 rng(0x6b8f0c3a5d2e9171ULL);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXd v(nc);
    for (Eigen::Index i = 0; i < nc; ++i) v(i) = gauss(rng);
    v.normalize();

    Eigen::MatrixXd V(nc, kmax), U(nr, kmax);
    std::vector<double> alpha, beta;  // B(i,i) = alpha[i], B(i,i+1) = beta[i]

    auto reorth = [](Eigen::VectorXd& w, const Eigen::MatrixXd& basis, Eigen::Index k) {
        if (k == 0) return;
        // two passes of classical Gram-Schmidt against the stored basis
        for (int pass = 0; pass < 2; ++pass)
            w.noalias() -= basis.leftCols(k) * (basis.leftCols(k).transpose() * w);
    };

    V.col(0) = v;
    Eigen::VectorXd u = apply(hp, v);
    double a = u.norm();
    double sigma_max = a;
    Eigen::Index k = 0;
    int streak = 0;
    bool exhausted = false;

    while (true) {
        if (a <= 1e-3 * std::numeric_limits<double>::epsilon() * std::max(sigma_max, 1e-300)) {
            exhausted = true;  // breakdown: invariant subspace found
            break;
        }
        u /= a;
        U.col(k) = u;
        alpha.push_back(a);
        ++k;

        // Singular values of the current bidiagonal.
        Eigen::MatrixXd B = Eigen::MatrixXd::Zero(k, k);
        for (Eigen::Index i = 0; i < k; ++i) {
            B(i, i) = alpha[static_cast<std::size_t>(i)];
            if (i + 1 < k) B(i, i + 1) = beta[static_cast<std::size_t>(i)];
        }
        Eigen::JacobiSVD<Eigen::MatrixXd> bs(B);
        const Eigen::VectorXd sv = bs.singularValues();
        sigma_max = sv(0);
        streak = (sv(k - 1) < tol * sigma_max) ? streak + 1 : 0;
        if (streak >= 3 || k == kmax) {
            exhausted = (k == kmax);
            break;
        }

        Eigen::VectorXd p = apply_transpose(hp, U.col(k - 1));
        p -= a * V.col(k - 1);
        reorth(p, V, k);
        const double b = p.norm();
        if (b <= 1e-3 * std::numeric_limits<double>::epsilon() * std::max(sigma_max, 1e-300)) {
            exhausted = true;
            break;
        }
        beta.push_back(b);
        V.col(k) = p / b;

        u = apply(hp, V.col(k));
        u -= b * U.col(k - 1);
        reorth(u, U, k);
        a = u.norm();
    }

    if (k == 0) return Correction::zero();
    if (!exhausted && streak < 3)
        throw NoConvergence("hankel product compression: bidiagonalization exhausted "
                            "without meeting tolerance");

    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
        B(i, i) = alpha[static_cast<std::size_t>(i)];
        if (i + 1 < k) B(i, i + 1) = beta[static_cast<std::size_t>(i)];
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> bs(B, Eigen::ComputeThinU | Eigen::ComputeThinV);
    return cut_and_fold(U.leftCols(k) * bs.matrixU(), bs.singularValues(),
                        V.leftCols(k) * bs.matrixV(), tol);
}

Correction compress_random(const HankelProduct& hp, double tol, std::uint64_t seed) {
    const Eigen::Index nr = hp.op_rows();
    const Eigen::Index nc = hp.op_cols();
    if (nr == 0 || nc == 0) return Correction::zero();
    const Eigen::Index full = std::min(nr, nc);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto randn = [&](Eigen::Index r, Eigen::Index c) {
        Eigen::MatrixXd m(r, c);
        for (Eigen::Index j = 0; j < c; ++j)
            for (Eigen::Index i = 0; i < r; ++i) m(i, j) = gauss(rng);
        return m;
    };

    constexpr Eigen::Index kOversample = 10;
    constexpr int kProbes = 10;

    for (Eigen::Index block = 16;; block *= 2) {
        const Eigen::Index width = std::min(full, block + kOversample);
        Eigen::MatrixXd Y;
        if (width >= full) {
            Y = apply(hp, Eigen::MatrixXd::Identity(nc, nc));
        } else {
            Y = apply(hp, randn(nc, width));
        }
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(Y);
        const Eigen::Index r = std::min(Y.rows(), Y.cols());
        Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(nr, r);
        Eigen::MatrixXd Bt = apply_transpose(hp, Q);  // nc x r, equals (Q^T A)^T

        double sigma_est = 0.0;
        Eigen::BDCSVD<Eigen::MatrixXd> svd(Bt, Eigen::ComputeThinU | Eigen::ComputeThinV);
        sigma_est = svd.singularValues()(0);

        bool ok = width >= full;
        if (!ok) {
            const Eigen::MatrixXd probes = randn(nc, kProbes);
            const Eigen::MatrixXd R = apply(hp, probes) - Q * (Bt.transpose() * probes);
            double worst = 0.0;
            for (int i = 0; i < kProbes; ++i)
                worst = std::max(worst, R.col(i).norm() / probes.col(i).norm());
            const double est = 10.0 * std::sqrt(2.0 / std::numbers::pi) * worst;
            ok = est <= tol * std::max(sigma_est, 1e-300);
        }
        if (ok)
            return cut_and_fold(Q * svd.matrixV(), svd.singularValues(), svd.matrixU(), tol);
        if (width >= full) break;
    }
    throw NoConvergence("randomized hankel compression failed to certify the tolerance");
}

Correction compress_dense(const HankelProduct& hp, double tol) {
    const Eigen::Index nr = hp.op_rows();
    const Eigen::Index nc = hp.op_cols();
    if (nr == 0 || nc == 0) return Correction::zero();
    if (std::max(nr, nc) > detail::kDenseCompressionCap)
        return compress(hp, tol, default_compression());
    const Eigen::MatrixXd D = dense(hp);
    Eigen::BDCSVD<Eigen::MatrixXd> svd(D, Eigen::ComputeThinU | Eigen::ComputeThinV);
    return cut_and_fold(svd.matrixU(), svd.singularValues(), svd.matrixV(), tol);
}

Correction compress(const HankelProduct& hp, double tol, CompressionMethod method) {
    const Eigen::Index m = std::max(hp.op_rows(), hp.op_cols());
    if (m <= detail::kDenseCompressionCap) return compress_dense(hp, tol);
    switch (method) {
        case CompressionMethod::lanczos: return compress_lanczos(hp, tol);
        case CompressionMethod::random: return compress_random(hp, tol);
        case CompressionMethod::dense: return compress_dense(hp, tol);
    }
    return compress_lanczos(hp, tol);
}

Correction compress(const HankelProduct& hp, double tol) {
    return compress(hp, tol, default_compression());
}

}  // namespace qtm
