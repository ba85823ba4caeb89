#pragma once

#include "hstcs/channel_model.hpp"
#include "hstcs/common.hpp"
#include "hstcs/pilot_pattern.hpp"

namespace hstcs {

struct CoherenceParams {
    double delta = 0.1;
    bool normalize_columns = true;

    void validate() const {
        if (delta <= 0.0 || delta >= 1.0)
            throw ValidationError("coherence: delta must lie in (0, 1)");
    }
};

// Average coherence: mean of |g_ij| over unordered column pairs with
// |g_ij| >= delta, where g is the Gram of l2-normalized columns. Returns 0
// when no pair qualifies. Parallel over the trailing column index with a
// fixed-order reduction, so results do not depend on the thread count.
double average_coherence(const MatrixXcd& matrix, const CoherenceParams& params);

// Largest |g_ij| over distinct normalized columns.
double mutual_coherence(const MatrixXcd& matrix);

// Sparsity level recoverable per the coherence bound: (1 + 1/mu) / 2.
double recovery_bound(double mu);

// Pilot-domain closed form of average_coherence(X_d(p) * Phi_x). The Gram of
// that product depends only on the delay difference z = v - u, so the P*L^2
// pair sum collapses to L-1 weighted sums of the pilot powers:
//   F(z) = |sum_p w_p e^{-j 2 pi z (k_p - 1) / N_f}| / sum_p w_p,
// each counted with its pair multiplicity (L - z). Independent of x and of the
// symbol index. Weights are the pattern's realized pilot powers |X(k_p)|^2
// (identical to the design powers E_t when symbols sit on their level's ring).
double pilot_coherence_fast(const std::vector<int>& placement,
                            const std::vector<double>& weights,
                            const ChannelModelConfig& cfg, const CoherenceParams& params);

double pilot_coherence_fast(const PilotPattern& pattern, const ChannelModelConfig& cfg,
                            const CoherenceParams& params);

namespace reference {
// Direct pair enumeration; serial oracle for the parallel generic path.
double average_coherence_serial(const MatrixXcd& matrix, const CoherenceParams& params);
}  // namespace reference

}  // namespace hstcs
