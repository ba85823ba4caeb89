#include "hstcs/geometry.hpp"

#include <algorithm>

namespace hstcs {

void GeometryConfig::finalize() {
    if (!(d_max > d_0) || !(d_0 > 0.0))
        throw ValidationError("geometry: require d_max > d_0 > 0");
    if (!(f_c > 0.0) || !(c > 0.0))
        throw ValidationError("geometry: require f_c > 0 and c > 0");
    d_c = std::sqrt(d_max * d_max - d_0 * d_0);
}

void PositionState::validate(const GeometryConfig& geom) const {
    if (alpha < 0.0 || alpha > 2.0 * geom.d_c + 1e-9)
        throw ValidationError("position: alpha outside [0, 2*d_c]");
    if (v < 0.0) throw ValidationError("position: negative speed");
}

double doppler_at_position(const PositionState& state, const GeometryConfig& geom) {
    state.validate(geom);
    const double u = geom.d_c - state.alpha;
    const double cos_theta = u / std::sqrt(u * u + geom.d_0 * geom.d_0);
    return state.v / geom.c * geom.f_c * cos_theta;
}

int doppler_index(double f_d, double t_d) {
    const double scaled = 2.0 * t_d * f_d;
    return static_cast<int>(f_d >= 0.0 ? std::ceil(scaled) : std::floor(scaled));
}

int doppler_index(double f_d, double t_d, double f_dmax) {
    if (std::abs(f_d) > f_dmax * (1.0 + 1e-12))
        throw std::domain_error("doppler_index: |f_d| exceeds f_dmax");
    return doppler_index(f_d, t_d);
}

int position_index(const PositionState& state, const GeometryConfig& geom, double t_d) {
    return doppler_index(doppler_at_position(state, geom), t_d);
}

int codebook_slot(int x, int m_half) {
    if (std::abs(x) > m_half) throw std::domain_error("codebook_slot: |x| > M");
    return x + m_half + 1;
}

std::pair<double, double> doppler_range_of_index(int x, double t_d, double f_dmax) {
    const double bin = 1.0 / (2.0 * t_d);
    if (x > 0) return {std::max(0.0, (x - 1) * bin), std::min(x * bin, f_dmax)};
    if (x < 0) return {std::max(x * bin, -f_dmax), std::min(0.0, (x + 1) * bin)};
    return {0.0, 0.0};
}

}  // namespace hstcs
