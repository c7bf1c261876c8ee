#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "rbt/constants.hpp"
#include "rbt/errors.hpp"

namespace rbt::fft {

namespace detail {

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

/// Half-size twiddle table: e^{+j 2*pi*k/n} for k in [0, n/2).
inline std::vector<std::complex<double>> make_twiddles(std::size_t n) {
    std::vector<std::complex<double>> tw(n / 2);
    for (std::size_t k = 0; k < n / 2; ++k) {
        const double ang = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(n);
        tw[k] = {std::cos(ang), std::sin(ang)};
    }
    return tw;
}

/// In-place iterative radix-2 transform, kernel sum_m x[m] e^{sign*j*2pi*mk/n},
/// unscaled. `tw` must be make_twiddles(n).
inline void fft_pow2(std::complex<double>* a, std::size_t n, int sign,
                     const std::vector<std::complex<double>>& tw) {
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t stride = n / len;
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t k = 0; k < len / 2; ++k) {
                std::complex<double> w = tw[k * stride];
                if (sign < 0) w = std::conj(w);
                const auto u = a[i + k];
                const auto v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
            }
        }
    }
}

} // namespace detail

/// Reusable transform plan for a fixed length. Power-of-two lengths run the
/// radix-2 path directly; everything else goes through Bluestein's chirp-z
/// reformulation on a padded power-of-two grid. Chirp angles are reduced with
/// exact integer arithmetic (t^2 mod 2n) so long transforms keep full
/// double precision.
class Plan {
public:
    explicit Plan(std::size_t n) : n_(n) {
        if (n_ == 0) throw ValidationError("fft: transform length must be >= 1");
        if (detail::is_pow2(n_)) {
            tw_ = detail::make_twiddles(n_);
            return;
        }
        m_ = detail::next_pow2(2 * n_ - 1);
        mtw_ = detail::make_twiddles(m_);
        chirp_.resize(n_);
        const auto nn = static_cast<std::uint64_t>(n_);
        for (std::uint64_t t = 0; t < nn; ++t) {
            const std::uint64_t r = (t * t) % (2 * nn);
            const double ang = kPi * static_cast<double>(r) / static_cast<double>(nn);
            chirp_[t] = {std::cos(ang), std::sin(ang)};
        }
        bspec_.assign(m_, {0.0, 0.0});
        bspec_[0] = std::conj(chirp_[0]);
        for (std::size_t t = 1; t < n_; ++t) {
            bspec_[t] = std::conj(chirp_[t]);
            bspec_[m_ - t] = std::conj(chirp_[t]);
        }
        detail::fft_pow2(bspec_.data(), m_, -1, mtw_);
    }

    std::size_t size() const { return n_; }

    /// In-place unscaled transform of `data` (length size()):
    ///   X[k] = sum_m x[m] e^{sign * j * 2*pi*m*k / n}
    void execute(std::complex<double>* data, int sign) const {
        if (n_ == 1) return;
        if (!chirp_.empty() && sign < 0) {
            for (std::size_t i = 0; i < n_; ++i) data[i] = std::conj(data[i]);
            execute(data, +1);
            for (std::size_t i = 0; i < n_; ++i) data[i] = std::conj(data[i]);
            return;
        }
        if (chirp_.empty()) {
            detail::fft_pow2(data, n_, sign, tw_);
            return;
        }
        std::vector<std::complex<double>> work(m_, {0.0, 0.0});
        for (std::size_t i = 0; i < n_; ++i) work[i] = data[i] * chirp_[i];
        detail::fft_pow2(work.data(), m_, -1, mtw_);
        for (std::size_t i = 0; i < m_; ++i) work[i] *= bspec_[i];
        detail::fft_pow2(work.data(), m_, +1, mtw_);
        const double inv_m = 1.0 / static_cast<double>(m_);
        for (std::size_t k = 0; k < n_; ++k) data[k] = work[k] * inv_m * chirp_[k];
    }

private:
    std::size_t n_;
    std::vector<std::complex<double>> tw_;    // pow2 path
    std::size_t m_ = 0;                       // Bluestein padded size
    std::vector<std::complex<double>> mtw_;   // twiddles for m_
    std::vector<std::complex<double>> chirp_; // e^{+j*pi*t^2/n}
    std::vector<std::complex<double>> bspec_; // forward FFT of the chirp kernel
};

/// One-shot unscaled transform.
inline std::vector<std::complex<double>> transform(std::vector<std::complex<double>> x,
                                                   int sign) {
    Plan plan(x.size());
    plan.execute(x.data(), sign);
    return x;
}

} // namespace rbt::fft
