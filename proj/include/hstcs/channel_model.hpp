#pragma once

#include <utility>

#include "hstcs/common.hpp"
#include "hstcs/rng.hpp"

namespace hstcs {

// Resolvable grid sizes: L = ceil(W*tau_max)+1 delay taps,
// M = ceil(2*T_d*f_dmax) one-sided Doppler bins.
std::pair<int, int> resolvable_dims(double bandwidth, double tau_max, double t_d,
                                    double f_dmax);

// Sampling grid and sparsity parameters of the delay-Doppler channel.
struct ChannelModelConfig {
    double bandwidth = 5e6;    // W (Hz)
    double tau_max = 5e-6;     // maximum delay spread (s)
    double t_d = 0.675e-3;     // packet duration (s)
    double f_dmax = 1088.0;    // maximum Doppler shift (Hz)
    int subcarriers = 512;     // K
    int cp_len = 32;
    int sparsity = 6;          // S
    double gamma_rel = 0.01;   // dominance threshold relative to max |beta|^2

    // derived
    int paths = 0;          // L
    int doppler_half = 0;   // M
    int coeff_count = 0;    // N_0 = L*(2M+1)
    int symbols_per_packet = 0;  // N_t = floor(T_d / T_0), T_0 = (K+cp)/W
    int freq_bins = 0;      // N_f = K

    ChannelModelConfig() { finalize(); }
    void finalize();

    double sample_period() const { return 1.0 / bandwidth; }
    double symbol_duration() const { return (subcarriers + cp_len) / bandwidth; }
};

// L x (2M+1) coefficient matrix B plus the active Doppler column index.
struct DelayDopplerCoeffs {
    MatrixXcd B;  // L x (2M+1), column m+M holds Doppler bin m
    int x = 0;    // active Doppler bin

    VectorXcd stacked() const;                   // b = vec(B), column-major
    VectorXcd dominant_column() const;           // b_x
    int dominance_count(double gamma) const;     // # entries with |beta|^2 > gamma
};

// P x L(2M+1) model matrix over pilot rows for one OFDM symbol.
struct Dictionary {
    MatrixXcd phi;               // P x N_0
    std::vector<int> placement;  // 1-based subcarrier indices, sorted
    int symbol_index = 1;        // n
};

// Row p, column (l, m): e^{j 2 pi m n / N_t} * e^{-j 2 pi l (k_p - 1) / N_f}.
// Columns are stacked delay-first per Doppler bin, matching vec(B).
Dictionary build_dictionary(const std::vector<int>& placement, int symbol_index,
                            const ChannelModelConfig& cfg);

// Columns L(M+x) .. L(M+x)+L-1 of phi (the b_x block).
MatrixXcd dominant_submatrix(const Dictionary& dict, int x, const ChannelModelConfig& cfg);

// Builds only the P x L dominant block without materializing the full dictionary.
MatrixXcd dominant_block(const std::vector<int>& placement, int x, int symbol_index,
                         const ChannelModelConfig& cfg);

// S nonzero taps at distinct uniform delays in column x, circular complex
// Gaussian amplitudes normalized to unit total power.
DelayDopplerCoeffs sample_sparse_channel(Rng& rng, const ChannelModelConfig& cfg, int x);

// One OFDM symbol of a time-varying sparse channel. Taps rotate at the
// continuous Doppler f_d across the symbol's K+cp samples; `coeffs` holds the
// per-symbol effective delay-Doppler coefficients (time average over the K
// post-CP samples), which reproduce diag(H) exactly through the dictionary.
class ChannelRealization {
public:
    ChannelRealization(const DelayDopplerCoeffs& raw, double f_d,
                       const ChannelModelConfig& cfg, int symbol_index = 1);

    // h(l, m) for m in [0, K+cp): tap value at the m-th sample of the symbol.
    cdouble tap(int delay, int sample) const;

    const DelayDopplerCoeffs& coeffs() const { return effective_; }
    const ChannelModelConfig& config() const { return *cfg_; }
    double doppler() const { return f_d_; }
    int symbol_index() const { return symbol_index_; }

    VectorXcd diag() const;          // H(k,k), k = 1..K
    MatrixXcd full() const;          // H, K x K
    MatrixXcd full_free() const;     // diag(H) as a matrix
    MatrixXcd full_ici() const;      // H - H_free

    // Rows of (H - diag(H)) at the given 1-based subcarriers times a vector.
    VectorXcd ici_rows_times(const std::vector<int>& rows, const VectorXcd& x) const;

    // y(s) = sum_l h(l, s) x_time((s - l) mod window) over the symbol window.
    VectorXcd apply_time_domain(const VectorXcd& time_samples) const;

    const std::vector<int>& delays() const { return delays_; }
    const VectorXcd& amplitudes() const { return amps_; }

private:
    cdouble entry(int row, int col) const;  // H(k, d), 0-based

    std::vector<int> delays_;
    VectorXcd amps_;           // raw amplitudes at the active delays
    double f_d_;
    int symbol_index_;
    const ChannelModelConfig* cfg_;
    double start_sample_;      // global sample index of the first post-CP sample
    DelayDopplerCoeffs effective_;
    VectorXcd geom_sum_;       // G(f) = sum_s e^{j2pi(f_d Ts + f/K)s}, f in [0, K)
    VectorXcd col_response_;   // T(d) = sum_l beta_l e^{-j2pi l d / K} * phase(start)
};

// Eq.-style synthesis H(n, k) = (u_n \otimes u_k) b from coefficients alone.
cdouble diag_from_coeffs(const DelayDopplerCoeffs& coeffs, int symbol_index,
                         int subcarrier, const ChannelModelConfig& cfg);

// Realization whose effective per-symbol coefficients equal b_eff; used to
// re-synthesize a full channel (with ICI) from estimated coefficients.
ChannelRealization realization_from_effective(const VectorXcd& b_eff, int x, double f_d,
                                              const ChannelModelConfig& cfg,
                                              int symbol_index = 1);

namespace reference {
// Brute-force double sum over samples and taps; test oracle for the
// closed-form path in ChannelRealization.
cdouble channel_entry_direct(const ChannelRealization& real, int row, int col,
                             const ChannelModelConfig& cfg);
}  // namespace reference

}  // namespace hstcs
