#pragma once

// Convolution helpers shared by symbol arithmetic, Toeplitz/Hankel
// application and the transform-grid symbol evaluation. Transforms are
// backed by Eigen's FFT module; a fresh plan object is created per call, so
// nothing here is shared mutably between threads.

#include <complex>
#include <vector>

#include <unsupported/Eigen/FFT>

namespace qtm::detail {

// Total output length below which plain O(n*m) convolution beats the
// transform route.
inline constexpr std::size_t kDirectConvCutoff = 64;

inline std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

template <class S>
std::vector<S> conv_direct(const std::vector<S>& x, const std::vector<S>& y) {
    if (x.empty() || y.empty()) return {};
    std::vector<S> out(x.size() + y.size() - 1, S(0));
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = 0; j < y.size(); ++j) out[i + j] += x[i] * y[j];
    return out;
}

inline std::vector<double> conv_fft(const std::vector<double>& x,
                                    const std::vector<double>& y) {
    const std::size_t n = x.size() + y.size() - 1;
    const std::size_t m = next_pow2(n);  // cyclic length, padded past wrap-around
    std::vector<double> xa(m, 0.0), ya(m, 0.0);
    std::copy(x.begin(), x.end(), xa.begin());
    std::copy(y.begin(), y.end(), ya.begin());
    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> xf, yf;
    fft.fwd(xf, xa);
    fft.fwd(yf, ya);
    for (std::size_t i = 0; i < m; ++i) xf[i] *= yf[i];
    std::vector<double> out;
    fft.inv(out, xf);
    out.resize(n);
    return out;
}

inline std::vector<std::complex<double>> conv_fft(
    const std::vector<std::complex<double>>& x,
    const std::vector<std::complex<double>>& y) {
    const std::size_t n = x.size() + y.size() - 1;
    const std::size_t m = next_pow2(n);
    std::vector<std::complex<double>> xa(m), ya(m);
    std::copy(x.begin(), x.end(), xa.begin());
    std::copy(y.begin(), y.end(), ya.begin());
    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> xf, yf;
    fft.fwd(xf, xa);
    fft.fwd(yf, ya);
    for (std::size_t i = 0; i < m; ++i) xf[i] *= yf[i];
    std::vector<std::complex<double>> out;
    fft.inv(out, xf);
    out.resize(n);
    return out;
}

template <class S>
std::vector<S> conv(const std::vector<S>& x, const std::vector<S>& y) {
    if (x.empty() || y.empty()) return {};
    if (x.size() + y.size() - 1 < kDirectConvCutoff) return conv_direct(x, y);
    return conv_fft(x, y);
}

// Values of sum_k c[k] z^k at the N-th roots of unity z_j = exp(2*pi*i*j/N).
// Requires c.size() <= N.
template <class S>
std::vector<std::complex<double>> roots_of_unity_values(
    const std::vector<S>& c, long long lowest, std::size_t N) {
    std::vector<std::complex<double>> x(N, {0.0, 0.0});
    for (std::size_t k = 0; k < c.size(); ++k) {
        long long idx = (lowest + static_cast<long long>(k)) % static_cast<long long>(N);
        if (idx < 0) idx += static_cast<long long>(N);
        x[static_cast<std::size_t>(idx)] += std::complex<double>(c[k]);
    }
    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> out;
    fft.inv(out, x);  // inv uses exp(+2*pi*i*jk/N)/N
    for (auto& v : out) v *= static_cast<double>(N);
    return out;
}

}  // namespace qtm::detail
