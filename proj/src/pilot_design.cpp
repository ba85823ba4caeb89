#include "hstcs/pilot_design.hpp"

#include <algorithm>
#include <cmath>

namespace hstcs {

const std::vector<cdouble>& qam16_alphabet() {
    static const std::vector<cdouble> alphabet = [] {
        const double levels[4] = {-3.0, -1.0, 1.0, 3.0};
        std::vector<cdouble> pts;
        pts.reserve(16);
        for (double re : levels)
            for (double im : levels) pts.emplace_back(re / std::sqrt(10.0), im / std::sqrt(10.0));
        return pts;
    }();
    return alphabet;
}

const std::vector<cdouble>& qam16_unit_ring() {
    static const std::vector<cdouble> ring = [] {
        std::vector<cdouble> pts;
        for (const cdouble& p : qam16_alphabet())
            if (std::abs(std::norm(p) - 1.0) < 1e-12) pts.push_back(p);
        return pts;
    }();
    return ring;
}

void PilotPattern::validate(int subcarriers) const {
    if (placement.empty()) throw ValidationError("pattern: no pilots");
    for (size_t i = 0; i < placement.size(); ++i) {
        if (placement[i] < 1 || placement[i] > subcarriers)
            throw ValidationError("pattern: placement out of [1, K]");
        if (i > 0 && placement[i] <= placement[i - 1])
            throw ValidationError("pattern: placement must be strictly increasing");
    }
    if (symbols.size() != static_cast<Eigen::Index>(placement.size()))
        throw ValidationError("pattern: symbol count mismatch");
    if (level_assignment.size() != placement.size())
        throw ValidationError("pattern: level assignment size mismatch");
    for (int t : level_assignment)
        if (t < 0 || t >= static_cast<int>(power_levels.size()))
            throw ValidationError("pattern: level index out of range");
    const double total = total_power(*this);
    if (std::abs(total - static_cast<double>(placement.size())) > 1e-6 * placement.size())
        throw ValidationError("pattern: total pilot energy must equal P");
}

double total_power(const PilotPattern& pattern) {
    double total = 0.0;
    for (int t : pattern.level_assignment) total += pattern.power_levels[t];
    return total;
}

void normalize_total_power(PilotPattern& pattern) {
    const double total = total_power(pattern);
    if (total <= 0.0) throw ValidationError("pattern: nonpositive total power");
    const double scale = static_cast<double>(pattern.placement.size()) / total;
    for (double& level : pattern.power_levels) level *= scale;
    for (Eigen::Index p = 0; p < pattern.symbols.size(); ++p)
        pattern.symbols(p) *= std::sqrt(scale);
}

double pattern_coherence(const PilotPattern& pattern, const ChannelModelConfig& cfg,
                         const CoherenceParams& params) {
    return pilot_coherence_fast(pattern.placement, pattern.realized_powers(), cfg, params);
}

PilotPattern equidistant_pattern(int subcarriers, int pilots, Rng& rng) {
    if (pilots < 1 || pilots > subcarriers)
        throw ValidationError("equidistant_pattern: require 1 <= P <= K");
    const int spacing = std::max(
        1, static_cast<int>(std::lround(static_cast<double>(subcarriers) / pilots)));
    if (1 + (pilots - 1) * spacing > subcarriers)
        throw ValidationError("equidistant_pattern: rounded spacing overflows K");
    PilotPattern pattern;
    pattern.placement.resize(pilots);
    for (int p = 0; p < pilots; ++p) pattern.placement[p] = 1 + p * spacing;
    pattern.power_levels = {1.0};
    pattern.level_assignment.assign(pilots, 0);
    pattern.symbols.resize(pilots);
    const auto& alphabet = qam16_alphabet();
    for (int p = 0; p < pilots; ++p)
        pattern.symbols(p) = alphabet[rng.uniform_below(alphabet.size())];
    return pattern;
}

PilotPattern random_pattern(int subcarriers, int pilots, Rng& rng) {
    if (pilots < 1 || pilots > subcarriers)
        throw ValidationError("random_pattern: require 1 <= P <= K");
    PilotPattern pattern;
    pattern.placement = rng.sample_distinct_sorted(1, subcarriers, pilots);
    pattern.power_levels = {1.0};
    pattern.level_assignment.assign(pilots, 0);
    pattern.symbols.resize(pilots);
    const auto& alphabet = qam16_alphabet();
    for (int p = 0; p < pilots; ++p)
        pattern.symbols(p) = alphabet[rng.uniform_below(alphabet.size())];
    return pattern;
}

std::pair<PilotPattern, DesignTrace> random_search_design(int iterations, int subcarriers,
                                                          int pilots,
                                                          const ChannelModelConfig& cfg,
                                                          const CoherenceParams& params,
                                                          Rng& rng) {
    if (iterations < 1) throw ValidationError("random_search: iterations must be >= 1");
    DesignTrace trace;
    trace.records.reserve(iterations);
    PilotPattern best;
    double best_mu = 0.0;
    for (int m = 0; m < iterations; ++m) {
        PilotPattern candidate = random_pattern(subcarriers, pilots, rng);
        const double mu = pattern_coherence(candidate, cfg, params);
        ++trace.objective_evaluations;
        if (m == 0 || mu < best_mu) {
            best = std::move(candidate);
            best_mu = mu;
        }
        trace.records.push_back({m, mu, best_mu, 1.0});
        if (m == 0) trace.initial_mu = mu;
    }
    trace.final_mu = best_mu;
    return {std::move(best), std::move(trace)};
}

namespace {

struct DesignState {
    std::vector<int> placement;       // sorted
    std::vector<int> assignment;      // per-pilot level index (placement order)

    bool operator<(const DesignState& other) const {
        if (placement != other.placement) return placement < other.placement;
        return assignment < other.assignment;
    }
};

}  // namespace

std::pair<PilotPattern, DesignTrace> joint_design(const PilotPattern& init,
                                                  const DesignParams& params,
                                                  const ChannelModelConfig& cfg, Rng& rng) {
    const int pilots = init.pilot_count();
    if (params.iterations < 1 || params.iterations % pilots != 0)
        throw ValidationError("joint_design: iterations must be a positive multiple of P");
    const int outer = params.iterations / pilots;
    const int level_count = static_cast<int>(params.power_levels.size());
    const int subcarriers = cfg.subcarriers;

    DesignState state;
    state.placement = init.placement;
    state.assignment = init.level_assignment;
    if (static_cast<int>(state.assignment.size()) != pilots ||
        *std::max_element(state.assignment.begin(), state.assignment.end()) >= level_count)
        state.assignment.assign(pilots, std::min(1, level_count - 1));

    // Objective with the design powers; scale invariance makes explicit
    // renormalization unnecessary during the search.
    auto objective = [&](const std::vector<int>& placement,
                         const std::vector<int>& assignment, long& evals) {
        std::vector<double> weights(pilots);
        for (int p = 0; p < pilots; ++p) weights[p] = params.power_levels[assignment[p]];
        ++evals;
        return pilot_coherence_fast(placement, weights, cfg, params.coherence);
    };

    DesignTrace trace;
    trace.records.reserve(params.iterations);
    double current_mu = objective(state.placement, state.assignment,
                                  trace.objective_evaluations);
    trace.initial_mu = current_mu;

    // Occupation probabilities over distinct visited states.
    std::map<DesignState, int> state_ids;
    std::vector<DesignState> states;
    std::vector<double> occupation;
    auto state_index = [&](const DesignState& s) {
        auto [it, inserted] = state_ids.try_emplace(s, static_cast<int>(states.size()));
        if (inserted) {
            states.push_back(s);
            occupation.push_back(0.0);
        }
        return it->second;
    };
    int incumbent = state_index(state);
    occupation[incumbent] = 1.0;  // I[0]

    std::vector<char> used(subcarriers + 1, 0);
    for (int k : state.placement) used[k] = 1;

    int m = 0;
    for (int n = 0; n < outer; ++n) {
        for (int k = 0; k < pilots; ++k, ++m) {
            // propose: replace the k-th pilot with a random unused subcarrier
            const int free_count = subcarriers - pilots;
            int pick = static_cast<int>(rng.uniform_below(free_count)) + 1;
            int replacement = 0;
            for (int s = 1; s <= subcarriers; ++s) {
                if (!used[s] && --pick == 0) {
                    replacement = s;
                    break;
                }
            }
            std::vector<int> proposal = state.placement;
            std::vector<int> proposal_assign = state.assignment;
            proposal[k] = replacement;
            // keep placement sorted; carry the pilot's level with it
            {
                const int level = proposal_assign[k];
                proposal.erase(proposal.begin() + k);
                proposal_assign.erase(proposal_assign.begin() + k);
                const auto pos = std::lower_bound(proposal.begin(), proposal.end(), replacement);
                const auto offset = pos - proposal.begin();
                proposal.insert(pos, replacement);
                proposal_assign.insert(proposal_assign.begin() + offset, level);
            }
            const double candidate_mu =
                objective(proposal, proposal_assign, trace.objective_evaluations);
            int touched = k;
            if (candidate_mu < current_mu) {
                used[state.placement[k]] = 0;
                used[replacement] = 1;
                const auto pos =
                    std::lower_bound(proposal.begin(), proposal.end(), replacement);
                touched = static_cast<int>(pos - proposal.begin());
                state.placement = std::move(proposal);
                state.assignment = std::move(proposal_assign);
                current_mu = candidate_mu;
            }
            // greedy power reassignment of the touched pilot
            int best_level = state.assignment[touched];
            double best_mu = current_mu;
            for (int t = 0; t < level_count; ++t) {
                if (t == state.assignment[touched]) continue;
                std::vector<int> assign = state.assignment;
                assign[touched] = t;
                const double mu =
                    objective(state.placement, assign, trace.objective_evaluations);
                if (mu < best_mu) {
                    best_mu = mu;
                    best_level = t;
                }
            }
            if (best_level != state.assignment[touched]) {
                state.assignment[touched] = best_level;
                current_mu = best_mu;
            }

            // occupation update: I[m+1] = I[m] + eta (D[m+1] - I[m]), eta = 1/(m+1)
            const int current_state = state_index(state);
            const double eta = 1.0 / static_cast<double>(m + 1);
            for (double& v : occupation) v *= (1.0 - eta);
            occupation[current_state] += eta;
            if (occupation[current_state] > occupation[incumbent]) incumbent = current_state;

            const double occ_max = *std::max_element(occupation.begin(), occupation.end());
            trace.records.push_back({m, candidate_mu, current_mu, occ_max});
        }
    }

    const DesignState& out = states[incumbent];
    PilotPattern pattern;
    pattern.placement = out.placement;
    pattern.level_assignment = out.assignment;
    pattern.power_levels = params.power_levels;
    {  // normalize the level table so the total design energy equals P
        double total = 0.0;
        for (int t : pattern.level_assignment) total += pattern.power_levels[t];
        const double scale = static_cast<double>(pilots) / total;
        for (double& level : pattern.power_levels) level *= scale;
    }
    // unit-ring 16-QAM symbols at the exact level power
    pattern.symbols.resize(pilots);
    const auto& ring = qam16_unit_ring();
    for (int p = 0; p < pilots; ++p) {
        const double energy = pattern.power_levels[pattern.level_assignment[p]];
        pattern.symbols(p) = ring[rng.uniform_below(ring.size())] * std::sqrt(energy);
    }

    trace.occupation = occupation;
    trace.output_state = incumbent;
    trace.final_mu = pattern_coherence(pattern, cfg, params.coherence);
    return {std::move(pattern), std::move(trace)};
}

const PilotPattern& Codebook::entry_for_slot(int slot) const {
    if (slot < 1 || slot > static_cast<int>(entries.size()))
        throw std::domain_error("codebook: slot out of range");
    return entries[slot - 1];
}

Codebook build_codebook(const ChannelModelConfig& cfg, const DesignParams& params,
                        std::uint64_t seed, const std::string& config_hash,
                        const std::vector<DesignTrace>* traces_out) {
    (void)traces_out;
    std::vector<DesignTrace> traces;
    return build_codebook(cfg, params, seed, config_hash, traces);
}

Codebook build_codebook(const ChannelModelConfig& cfg, const DesignParams& params,
                        std::uint64_t seed, const std::string& config_hash,
                        std::vector<DesignTrace>& traces_out) {
    const int half = cfg.doppler_half;
    const int slots = 2 * half + 1;
    Codebook book;
    book.doppler_half = half;
    book.subcarriers = cfg.subcarriers;
    book.f_dmax = cfg.f_dmax;
    book.t_d = cfg.t_d;
    book.power_levels = params.power_levels;
    book.entries.resize(slots);
    book.provenance = {seed, params.iterations, params.coherence.delta, config_hash};
    traces_out.resize(slots);

#pragma omp parallel for schedule(dynamic)
    for (int slot = 1; slot <= slots; ++slot) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(slot)));
        PilotPattern init = random_pattern(cfg.subcarriers, params.pilots, rng);
        auto [pattern, trace] = joint_design(init, params, cfg, rng);
        book.entries[slot - 1] = std::move(pattern);
        traces_out[slot - 1] = std::move(trace);
    }
    return book;
}

const PilotPattern& select_pilot(const Codebook& codebook, double f_d, double t_d) {
    const int x = doppler_index(f_d, t_d, codebook.f_dmax);
    return codebook.entry_for_slot(codebook_slot(x, codebook.doppler_half));
}

}  // namespace hstcs
