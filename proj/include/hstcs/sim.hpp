#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "hstcs/channel_model.hpp"
#include "hstcs/estimators.hpp"
#include "hstcs/geometry.hpp"
#include "hstcs/pilot_design.hpp"

namespace hstcs {

enum class Estimator { kLs, kLmmse, kOmp, kBp, kPerfect };
enum class PilotSource { kCodebook, kEquidistant, kRandomSearch };

Estimator estimator_from_name(const std::string& name);
PilotSource pilot_source_from_name(const std::string& name);
std::string to_string(Estimator estimator);
std::string to_string(PilotSource source);

struct SimConfig {
    ChannelModelConfig channel;
    GeometryConfig geometry;
    double speed_kmh = 500.0;
    std::vector<double> snr_db{15.0};
    std::vector<double> alpha_m;                  // positions; default filled from geometry
    std::vector<Estimator> estimators{Estimator::kBp};
    std::vector<PilotSource> pilot_sources{PilotSource::kCodebook};
    std::vector<int> ici_iterations{2};           // q values to sweep
    int trials = 200;
    std::uint64_t seed = 1;
    bool genie_feedback = true;
    int pilots = 64;
    int random_search_iters = 200;
    DesignParams design;                          // used when no codebook is supplied
    OmpOptions omp;
    BpOptions bp;

    void validate() const;
};

struct TrialMetrics {
    double mse = 0.0;
    double ber = 0.0;
    double coherence = 0.0;
    double ici_power = 0.0;  // ICI-to-signal power ratio of the realization
};

struct SimRow {
    double snr_db = 0.0;
    double alpha_m = 0.0;
    double f_d_hz = 0.0;
    std::string estimator;
    std::string pilot_source;
    int q = 0;
    int trials = 0;
    double mse_mean = 0.0;
    double mse_std = 0.0;
    double ber_mean = 0.0;
    double ber_std = 0.0;
    double coherence = 0.0;
};

// One OFDM symbol: pilots at the pattern placement, data bits Gray-mapped to
// 16-QAM elsewhere; unitary IDFT plus cyclic prefix.
struct TxSymbol {
    VectorXcd freq;  // X, length K
    VectorXcd time;  // length K + cp
};
TxSymbol transmit_frame(const std::vector<int>& data_bits, const PilotPattern& pattern,
                        const ChannelModelConfig& cfg);

// Time-varying tap filter, AWGN, CP removal, unitary DFT.
VectorXcd apply_channel_and_receive(const VectorXcd& time_samples,
                                    const ChannelRealization& realization,
                                    double noise_var, Rng& rng);

// Off-diagonal response of a channel to a symbol vector (the ICI it induces),
// computed through the time-domain tap filter.
VectorXcd ici_response(const ChannelRealization& estimated, const VectorXcd& symbols);

// Iterative mitigation: q rounds of estimate -> rebuild -> subtract, with the
// estimator supplied as a callback from cleaned pilot observations to
// effective delay coefficients.
using CoeffEstimator = std::function<VectorXcd(const VectorXcd& y_pilots, int symbol_index)>;
VectorXcd ici_mitigate(const VectorXcd& y_original, const PilotPattern& pattern,
                       const VectorXcd& feedback_symbols, int iterations, int x, double f_d,
                       const ChannelModelConfig& cfg, int symbol_index,
                       const CoeffEstimator& estimator);

struct TrialContext {
    const ChannelModelConfig* cfg;
    const PilotPattern* pattern;
    double f_d;
    int x;
    double noise_var;  // 0 for noiseless
    Estimator estimator;
    int ici_iterations;
    bool genie_feedback;
    OmpOptions omp;
    BpOptions bp;
    std::uint64_t channel_seed;
    std::uint64_t noise_seed;
    std::uint64_t data_seed;
};

TrialMetrics run_trial(const TrialContext& ctx);

// Full factorial sweep (snr x alpha x estimator x pilot source x q) with
// trial-level parallelism; deterministic for a given seed regardless of the
// thread count (per-trial counter-derived streams, fixed-order reduction).
std::vector<SimRow> run_monte_carlo(const SimConfig& cfg,
                                    const Codebook* codebook = nullptr);

// CSV with provenance header comments; one row per grid cell.
std::string rows_to_csv(const std::vector<SimRow>& rows, const std::string& config_hash,
                        std::uint64_t seed);

}  // namespace hstcs
