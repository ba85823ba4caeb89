#pragma once

#include "hstcs/common.hpp"

namespace hstcs {

// Unitary DFT/IDFT. Radix-2 in-place when the size is a power of two,
// otherwise a direct O(n^2) transform (small sizes only).
namespace detail {

inline bool is_pow2(size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline void fft_radix2(VectorXcd& data, bool inverse) {
    const size_t n = data.size();
    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(data(i), data(j));
    }
    for (size_t len = 2; len <= n; len <<= 1) {
        const double angle = (inverse ? kTwoPi : -kTwoPi) / static_cast<double>(len);
        const cdouble step = unit_phasor(angle);
        for (size_t i = 0; i < n; i += len) {
            cdouble w(1.0, 0.0);
            for (size_t k = 0; k < len / 2; ++k) {
                const cdouble u = data(i + k);
                const cdouble v = data(i + k + len / 2) * w;
                data(i + k) = u + v;
                data(i + k + len / 2) = u - v;
                w *= step;
            }
        }
    }
}

inline VectorXcd dft_direct(const VectorXcd& input, bool inverse) {
    const Eigen::Index n = input.size();
    VectorXcd out(n);
    const double sign = inverse ? 1.0 : -1.0;
    for (Eigen::Index k = 0; k < n; ++k) {
        cdouble acc(0.0, 0.0);
        for (Eigen::Index s = 0; s < n; ++s)
            acc += input(s) * unit_phasor(sign * kTwoPi * k * s / static_cast<double>(n));
        out(k) = acc;
    }
    return out;
}

}  // namespace detail

inline VectorXcd dft_unitary(const VectorXcd& input) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(input.size()));
    if (detail::is_pow2(input.size())) {
        VectorXcd data = input;
        detail::fft_radix2(data, false);
        return data * scale;
    }
    return detail::dft_direct(input, false) * scale;
}

inline VectorXcd idft_unitary(const VectorXcd& input) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(input.size()));
    if (detail::is_pow2(input.size())) {
        VectorXcd data = input;
        detail::fft_radix2(data, true);
        return data * scale;
    }
    return detail::dft_direct(input, true) * scale;
}

}  // namespace hstcs
