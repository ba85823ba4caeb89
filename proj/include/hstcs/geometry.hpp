#pragma once

#include "hstcs/common.hpp"

namespace hstcs {

// Cell geometry of the rail link. Distances in meters, frequencies in Hz.
// d_c (half the in-cell track length) is derived once at construction.
struct GeometryConfig {
    double d_max = 1200.0;  // max distance of BS to railway (positions A and C)
    double d_0 = 50.0;      // direct (minimum) distance of BS to railway
    double d_s = 1000.0;    // distance between BSs
    double f_c = 2.35e9;    // carrier frequency
    double c = 3.0e8;       // propagation speed used for Doppler
    double d_c = 0.0;       // sqrt(d_max^2 - d_0^2), derived

    GeometryConfig() { finalize(); }
    GeometryConfig(double dmax, double d0, double ds, double fc, double light_speed = 3.0e8)
        : d_max(dmax), d_0(d0), d_s(ds), f_c(fc), c(light_speed) {
        finalize();
    }

    void finalize();
};

// Train position along the track, alpha in [0, 2*d_c] measured from A, and speed.
struct PositionState {
    double alpha = 0.0;  // m
    double v = 0.0;      // m/s

    void validate(const GeometryConfig& geom) const;
};

inline double kmh_to_mps(double kmh) { return kmh / 3.6; }

// Largest attainable Doppler shift magnitude (v/c) * f_c.
inline double max_doppler(double v, const GeometryConfig& geom) {
    return v / geom.c * geom.f_c;
}

// Doppler shift at a position: (v/c) * f_c * cos(theta), with
// cos(theta) = (d_c - alpha) / sqrt((d_c - alpha)^2 + d_0^2).
double doppler_at_position(const PositionState& state, const GeometryConfig& geom);

// Doppler bin index: ceil(2*T_d*f_d) for f_d >= 0, floor otherwise.
int doppler_index(double f_d, double t_d);

// Same, but rejects |f_d| beyond f_dmax (and with it |x| > M).
int doppler_index(double f_d, double t_d, double f_dmax);

// Doppler bin for a train position; equals doppler_index(doppler_at_position(..)).
int position_index(const PositionState& state, const GeometryConfig& geom, double t_d);

// 1-based codebook slot for bin x, slot = x + M + 1 in [1, 2M+1].
int codebook_slot(int x, int m_half);

// Doppler frequency interval [lo, hi] mapped to bin x by doppler_index.
std::pair<double, double> doppler_range_of_index(int x, double t_d, double f_dmax);

}  // namespace hstcs
