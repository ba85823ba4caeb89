#pragma once

#include "hstcs/common.hpp"

namespace hstcs {

// Comb pilot pattern: placement (sorted 1-based subcarriers), complex pilot
// symbols, and the per-pilot power-level assignment. power_levels are the
// post-normalization values, so sum_p E_{t(p)} == P.
struct PilotPattern {
    std::vector<int> placement;
    VectorXcd symbols;
    std::vector<double> power_levels;
    std::vector<int> level_assignment;

    int pilot_count() const { return static_cast<int>(placement.size()); }

    // Per-pilot design power E_{t(p)}.
    std::vector<double> powers() const {
        std::vector<double> w(placement.size());
        for (size_t p = 0; p < placement.size(); ++p)
            w[p] = power_levels[level_assignment[p]];
        return w;
    }

    // Per-pilot realized power |X(k_p)|^2 of the stored symbols.
    std::vector<double> realized_powers() const {
        std::vector<double> w(placement.size());
        for (size_t p = 0; p < placement.size(); ++p) w[p] = std::norm(symbols(p));
        return w;
    }

    void validate(int subcarriers) const;
};

// Total design energy (should equal P after normalization).
double total_power(const PilotPattern& pattern);

// Scales power_levels so the total design energy equals the pilot count.
void normalize_total_power(PilotPattern& pattern);

}  // namespace hstcs
