#include "qtm/wiener_hopf.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "qtm/errors.hpp"

namespace qtm {

QuadraticBlocks assemble_blocks(const LaurentSymbol& a, Eigen::Index p) {
    const long long nm = a.neg_degree();
    const long long np = a.pos_degree();
    if (p < 1 || p < nm || p < np)
        throw BlockTooSmall("block size must cover both symbol bandwidths");
    QuadraticBlocks b;
    b.p = p;
    b.Am1 = Eigen::MatrixXd::Zero(p, p);
    b.A0 = Eigen::MatrixXd::Zero(p, p);
    b.A1 = Eigen::MatrixXd::Zero(p, p);
    for (Eigen::Index i = 0; i < p; ++i) {
        for (Eigen::Index j = 0; j < p; ++j) {
            b.Am1(i, j) = a.at(j - i - p);  // nonzero only for j - i >= p - nm
            b.A0(i, j) = a.at(j - i);
            b.A1(i, j) = a.at(p + j - i);  // nonzero only for i - j >= p - np
        }
    }
    return b;
}

namespace {

double spectral_norm(const Eigen::MatrixXd& m) {
    if (m.size() == 0) return 0.0;
    return m.jacobiSvd().singularValues()(0);
}

// Smallest singular value, 0 for an empty matrix.
double sigma_min(const Eigen::MatrixXd& m) {
    if (m.size() == 0) return 0.0;
    const auto sv = m.jacobiSvd().singularValues();
    return sv(sv.size() - 1);
}

}  // namespace

CyclicReductionResult cyclic_reduction(const QuadraticBlocks& blocks, double tol,
                                       int max_iter) {
    const Eigen::Index p = blocks.p;
    Eigen::MatrixXd A = blocks.A1;
    Eigen::MatrixXd B = blocks.A0;
    Eigen::MatrixXd C = blocks.Am1;
    // First-equation auxiliary sequence (increments -A S C). Its limit W
    // solves W = A0 - A1 W^-1 Am1 and yields both minimal solvents:
    // G = -W^-1 Am1 and R = -A1 W^-1 (verified against the companion-pencil
    // solvent; the first-column sequence with -C S A increments does not
    // produce R).
    Eigen::MatrixXd Bt = B;

    CyclicReductionResult out;
    bool converged = false;
    for (int k = 0; k <= max_iter; ++k) {
        const double na = spectral_norm(A);
        const double nc = spectral_norm(C);
        const double st = sigma_min(Bt);
        if (st > 0.0 && std::min(na, nc) / st <= tol) {
            out.iterations = k;
            converged = true;
            break;
        }
        if (k == max_iter) break;

        const double smin = sigma_min(B);
        const double smax = spectral_norm(B);
        if (!(smin > smax * std::numeric_limits<double>::epsilon()))
            throw Breakdown("cyclic reduction iterate is numerically singular");
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(B);
        const Eigen::MatrixXd SA = lu.solve(A);
        const Eigen::MatrixXd SC = lu.solve(C);
        const Eigen::MatrixXd ASC = A * SC;
        const Eigen::MatrixXd CSA = C * SA;
        Bt -= ASC;
        B -= ASC + CSA;
        A = -(A * SA);
        C = -(C * SC);
        if (!A.allFinite() || !C.allFinite() || !B.allFinite())
            throw Breakdown("cyclic reduction iterate overflowed");
    }
    if (!converged)
        throw NoConvergence("cyclic reduction couplings did not decay; symbol may "
                            "have zeros close to the unit circle");

    Eigen::PartialPivLU<Eigen::MatrixXd> lut(Bt);
    out.G = -lut.solve(blocks.Am1);
    Eigen::PartialPivLU<Eigen::MatrixXd> luh(Bt.transpose());
    out.R = -luh.solve(blocks.A1.transpose()).transpose();
    out.W = std::move(Bt);

    const double scale = blocks.Am1.norm() + blocks.A0.norm() + blocks.A1.norm() +
                         std::numeric_limits<double>::min();
    out.residual_G =
        (blocks.Am1 + blocks.A0 * out.G + blocks.A1 * out.G * out.G).norm() / scale;
    out.residual_R =
        (blocks.A1 + out.R * blocks.A0 + out.R * out.R * blocks.Am1).norm() / scale;
    (void)p;
    return out;
}

WienerHopfFactorization factorize(const LaurentSymbol& a, double tol) {
    const long long wind = winding_number(a);  // also rejects circle zeros
    if (wind != 0)
        throw FactorizationFailed("winding number " + std::to_string(wind) +
                                  " != 0; no canonical factorization exists");

    const long long nm = a.neg_degree();
    const long long np = a.pos_degree();
    const Eigen::Index p = static_cast<Eigen::Index>(std::max({1LL, nm, np}));
    const QuadraticBlocks blocks = assemble_blocks(a, p);
    const CyclicReductionResult cr = cyclic_reduction(blocks, tol);

    // Coefficients of the factors sit in the leading column of R and leading
    // row of G, reversed; the -1 heads account for the shifted first block.
    std::vector<double> u_raw(static_cast<std::size_t>(np) + 1, 0.0);
    u_raw[0] = -1.0;
    for (long long k = 1; k <= np; ++k)
        u_raw[static_cast<std::size_t>(k)] = cr.R(p - k, 0);
    std::vector<double> l_raw(static_cast<std::size_t>(nm) + 1, 0.0);
    l_raw[0] = -1.0;
    for (long long k = 1; k <= nm; ++k)
        l_raw[static_cast<std::size_t>(k)] = cr.G(0, p - k);

    if (std::abs(u_raw[static_cast<std::size_t>(np)]) <
        1e-300 * (1.0 + wiener_norm(a)))
        throw FactorizationFailed("leading factor coefficient vanished");
    const double w = -a.at(np) / u_raw[static_cast<std::size_t>(np)];

    WienerHopfFactorization out;
    {
        std::vector<double> uc(u_raw);
        for (auto& v : uc) v *= -w;
        out.u = LaurentSymbol(0, std::move(uc));
        std::vector<double> lc(l_raw);
        for (auto& v : lc) v = -v;
        out.l = LaurentSymbol(0, std::move(lc));
    }
    out.cr_iterations = cr.iterations;
    const LaurentSymbol recon = multiply(out.u, reverse(out.l));
    out.residual = wiener_norm(sub(a, recon)) / wiener_norm(a);

    // Leading row of the inverse of the upper factor block and leading
    // column of the inverse of the lower one, read off the solvents: they
    // hold the first p coefficients of u^-1 and l^-1.
    {
        const double utop = out.u.at(np);
        std::vector<double> us(static_cast<std::size_t>(p), 0.0);
        if (np == 0) {
            us[0] = 1.0 / out.u.at(0);
        } else {
            for (Eigen::Index j = 0; j < p; ++j)
                us[static_cast<std::size_t>(j)] = -cr.R(p - np, j) / utop;
        }
        out.u_inv_seed = LaurentSymbol(0, std::move(us));

        const double ltop = out.l.at(nm);
        std::vector<double> ls(static_cast<std::size_t>(p), 0.0);
        if (nm == 0) {
            ls[0] = 1.0 / out.l.at(0);
        } else {
            for (Eigen::Index i = 0; i < p; ++i)
                ls[static_cast<std::size_t>(i)] = -cr.G(i, p - nm) / ltop;
        }
        out.l_inv_seed = LaurentSymbol(0, std::move(ls));
    }
    return out;
}

}  // namespace qtm
