#pragma once

#include <cstdint>
#include <map>
#include <optional>

#include "hstcs/coherence.hpp"
#include "hstcs/geometry.hpp"
#include "hstcs/pilot_pattern.hpp"
#include "hstcs/rng.hpp"

namespace hstcs {

// 16-QAM alphabet with unit average energy, Gray-mapped.
const std::vector<cdouble>& qam16_alphabet();
// The eight unit-energy points of that alphabet (the middle ring).
const std::vector<cdouble>& qam16_unit_ring();

struct DesignIterRecord {
    int iteration = 0;
    double candidate_mu = 0.0;  // objective of the proposed placement
    double accepted_mu = 0.0;   // objective of the state after the move
    double occupation_max = 0.0;
};

struct DesignTrace {
    std::vector<DesignIterRecord> records;
    std::vector<double> occupation;  // state occupation probabilities I
    int output_state = 0;            // argmax-occupation state index
    long objective_evaluations = 0;
    double initial_mu = 0.0;
    double final_mu = 0.0;  // objective of the returned pattern
};

struct DesignParams {
    int pilots = 64;       // P
    int iterations = 192;  // must be a multiple of the pilot count
    std::vector<double> power_levels{0.5, 1.0, 2.0};
    CoherenceParams coherence{};
};

// The canonical design objective of a pattern: the pilot-domain average
// coherence of X_d(p) * Phi_x evaluated on the pattern's pilot powers.
double pattern_coherence(const PilotPattern& pattern, const ChannelModelConfig& cfg,
                         const CoherenceParams& params);

// Comb placement 1 + (p-1)*round(K/P) with iid random 16-QAM symbols at
// uniform power (a single power level).
PilotPattern equidistant_pattern(int subcarriers, int pilots, Rng& rng);

// Uniformly random placement with iid random 16-QAM symbols at uniform power.
PilotPattern random_pattern(int subcarriers, int pilots, Rng& rng);

// Draws `iterations` random patterns and keeps the best objective.
std::pair<PilotPattern, DesignTrace> random_search_design(int iterations, int subcarriers,
                                                          int pilots,
                                                          const ChannelModelConfig& cfg,
                                                          const CoherenceParams& params,
                                                          Rng& rng);

// Discrete stochastic-approximation search over placement and per-pilot power
// levels. Each iteration proposes replacing one pilot subcarrier with an
// unused one (accepted on strict improvement), then greedily reassigns that
// pilot's power level. State occupation probabilities are tracked with step
// 1/m and the output is the state with the largest occupation probability.
// The returned pattern carries unit-ring 16-QAM symbols scaled to the exact
// level powers, so realized pilot powers equal the designed ones.
std::pair<PilotPattern, DesignTrace> joint_design(const PilotPattern& init,
                                                  const DesignParams& params,
                                                  const ChannelModelConfig& cfg, Rng& rng);

struct CodebookProvenance {
    std::uint64_t seed = 0;
    int iterations = 0;
    double delta = 0.0;
    std::string config_hash;
};

struct Codebook {
    int doppler_half = 0;                // M
    int subcarriers = 0;                 // K
    double f_dmax = 0.0;
    double t_d = 0.0;
    std::vector<double> power_levels;    // design levels before normalization
    std::vector<PilotPattern> entries;   // slot s holds bin x = s - M - 1, s = 1..2M+1
    CodebookProvenance provenance;

    const PilotPattern& entry_for_slot(int slot) const;
};

// Runs joint_design once per Doppler bin x in [-M, M] with independent
// seed streams; entry order is by slot.
Codebook build_codebook(const ChannelModelConfig& cfg, const DesignParams& params,
                        std::uint64_t seed, const std::string& config_hash,
                        const std::vector<DesignTrace>* traces_out = nullptr);
Codebook build_codebook(const ChannelModelConfig& cfg, const DesignParams& params,
                        std::uint64_t seed, const std::string& config_hash,
                        std::vector<DesignTrace>& traces_out);

// Codebook entry for a Doppler shift, via its bin and slot.
const PilotPattern& select_pilot(const Codebook& codebook, double f_d, double t_d);

// JSON serialization (bit-exact integer round trip, shortest exact decimals).
std::string codebook_to_json(const Codebook& codebook);
Codebook codebook_from_json(const std::string& text);

}  // namespace hstcs
