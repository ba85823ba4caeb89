#pragma once

#include "hstcs/common.hpp"

namespace hstcs {

// Gray-mapped 16-QAM with unit average energy. Bits (b3 b2 b1 b0) map as
// (b3 b2) -> I level, (b1 b0) -> Q level with Gray order 00,01,11,10.
namespace qam16 {

inline const double* levels() {
    static const double lut[4] = {-3.0 / std::sqrt(10.0), -1.0 / std::sqrt(10.0),
                                  1.0 / std::sqrt(10.0), 3.0 / std::sqrt(10.0)};
    return lut;
}

inline int gray_to_position(int gray2) {
    switch (gray2) {
        case 0b00: return 0;
        case 0b01: return 1;
        case 0b11: return 2;
        default: return 3;  // 0b10
    }
}

inline int position_to_gray(int pos) {
    static const int lut[4] = {0b00, 0b01, 0b11, 0b10};
    return lut[pos];
}

inline cdouble modulate(int bits4) {
    const double* lut = levels();
    return {lut[gray_to_position((bits4 >> 2) & 3)], lut[gray_to_position(bits4 & 3)]};
}

inline int demodulate(cdouble symbol) {
    const double* lut = levels();
    auto nearest = [&](double v) {
        int best = 0;
        double dist = std::abs(v - lut[0]);
        for (int i = 1; i < 4; ++i) {
            const double d = std::abs(v - lut[i]);
            if (d < dist) {
                dist = d;
                best = i;
            }
        }
        return best;
    };
    return (position_to_gray(nearest(symbol.real())) << 2) |
           position_to_gray(nearest(symbol.imag()));
}

}  // namespace qam16
}  // namespace hstcs
