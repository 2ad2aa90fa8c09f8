// fft.hpp — radix-2 complex FFT for power-of-two sizes.
//
// The solver only ever sees power-of-two grids (validated at the CLI
// boundary), so a plain iterative Cooley-Tukey with a cached twiddle
// table covers everything. Twiddles come from std::polar per index, not
// from a running product, to keep rounding at O(eps log N).

#pragma once

#include <complex>
#include <cstddef>
#include <map>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace mhs {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

namespace detail {

// Twiddle table for size n: roots[k] = exp(-2*pi*i*k/n), k in [0, n/2).
inline const std::vector<cplx>& twiddles(std::size_t n) {
    thread_local std::map<std::size_t, std::vector<cplx>> cache;
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    std::vector<cplx> roots(n / 2);
    for (std::size_t k = 0; k < n / 2; ++k)
        roots[k] = std::polar(1.0, -two_pi * double(k) / double(n));
    return cache.emplace(n, std::move(roots)).first->second;
}

} // namespace detail

// In-place DFT. sign = -1: forward (e^{-2pi i nk/N}), sign = +1: inverse
// without the 1/N factor.
inline void fft_inplace(std::vector<cplx>& a, int sign) {
    const std::size_t n = a.size();
    if (!is_pow2(n)) throw std::invalid_argument("fft: size must be a power of two");
    if (n == 1) return;

    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }

    const auto& roots = detail::twiddles(n);
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t stride = n / len;
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t k = 0; k < len / 2; ++k) {
                cplx w = roots[k * stride];
                if (sign > 0) w = std::conj(w);
                const cplx u = a[i + k];
                const cplx v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
            }
        }
    }
}

} // namespace mhs
