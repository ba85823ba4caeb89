#include "hstcs/sim.hpp"

#include <algorithm>
#include <sstream>

#include "hstcs/fft.hpp"
#include "hstcs/qam.hpp"

namespace hstcs {

Estimator estimator_from_name(const std::string& name) {
    if (name == "ls") return Estimator::kLs;
    if (name == "lmmse") return Estimator::kLmmse;
    if (name == "omp") return Estimator::kOmp;
    if (name == "bp") return Estimator::kBp;
    if (name == "perfect") return Estimator::kPerfect;
    throw ValidationError("unknown estimator: " + name);
}

PilotSource pilot_source_from_name(const std::string& name) {
    if (name == "codebook") return PilotSource::kCodebook;
    if (name == "equidistant") return PilotSource::kEquidistant;
    if (name == "random-search") return PilotSource::kRandomSearch;
    throw ValidationError("unknown pilot source: " + name);
}

std::string to_string(Estimator estimator) {
    switch (estimator) {
        case Estimator::kLs: return "ls";
        case Estimator::kLmmse: return "lmmse";
        case Estimator::kOmp: return "omp";
        case Estimator::kBp: return "bp";
        case Estimator::kPerfect: return "perfect";
    }
    return "?";
}

std::string to_string(PilotSource source) {
    switch (source) {
        case PilotSource::kCodebook: return "codebook";
        case PilotSource::kEquidistant: return "equidistant";
        case PilotSource::kRandomSearch: return "random-search";
    }
    return "?";
}

void SimConfig::validate() const {
    if (trials < 1) throw ValidationError("sim: trials must be >= 1");
    for (int q : ici_iterations)
        if (q < 0) throw ValidationError("sim: ici iterations must be >= 0");
    if (snr_db.empty() || estimators.empty() || pilot_sources.empty() ||
        ici_iterations.empty())
        throw ValidationError("sim: empty sweep grid");
    if (pilots < 1 || pilots > channel.subcarriers)
        throw ValidationError("sim: require 1 <= P <= K");
    if (speed_kmh < 0.0) throw ValidationError("sim: negative speed");
}

TxSymbol transmit_frame(const std::vector<int>& data_bits, const PilotPattern& pattern,
                        const ChannelModelConfig& cfg) {
    const int K = cfg.subcarriers;
    const int pilots = pattern.pilot_count();
    const int data_count = K - pilots;
    if (static_cast<int>(data_bits.size()) != 4 * data_count)
        throw ValidationError("transmit_frame: bit count must be 4*(K-P)");

    TxSymbol tx;
    tx.freq = VectorXcd::Zero(K);
    for (int p = 0; p < pilots; ++p) tx.freq(pattern.placement[p] - 1) = pattern.symbols(p);
    int bit = 0;
    size_t pilot_cursor = 0;
    for (int k = 1; k <= K; ++k) {
        if (pilot_cursor < pattern.placement.size() && pattern.placement[pilot_cursor] == k) {
            ++pilot_cursor;
            continue;
        }
        const int word = (data_bits[bit] << 3) | (data_bits[bit + 1] << 2) |
                         (data_bits[bit + 2] << 1) | data_bits[bit + 3];
        tx.freq(k - 1) = qam16::modulate(word);
        bit += 4;
    }
    const VectorXcd body = idft_unitary(tx.freq);
    tx.time.resize(K + cfg.cp_len);
    tx.time.head(cfg.cp_len) = body.tail(cfg.cp_len);
    tx.time.tail(K) = body;
    return tx;
}

VectorXcd apply_channel_and_receive(const VectorXcd& time_samples,
                                    const ChannelRealization& realization,
                                    double noise_var, Rng& rng) {
    VectorXcd received = realization.apply_time_domain(time_samples);
    if (noise_var > 0.0) {
        const double amp = std::sqrt(noise_var);
        for (Eigen::Index s = 0; s < received.size(); ++s)
            received(s) += rng.cnormal() * amp;
    }
    const int cp_len = static_cast<int>(time_samples.size()) - realization.config().subcarriers;
    return dft_unitary(received.tail(received.size() - cp_len));
}

VectorXcd ici_response(const ChannelRealization& estimated, const VectorXcd& symbols) {
    const ChannelModelConfig& cfg = estimated.config();
    const int K = cfg.subcarriers;
    const VectorXcd body = idft_unitary(symbols);
    VectorXcd with_cp(K + cfg.cp_len);
    with_cp.head(cfg.cp_len) = body.tail(cfg.cp_len);
    with_cp.tail(K) = body;
    const VectorXcd through = estimated.apply_time_domain(with_cp);
    VectorXcd full = dft_unitary(through.tail(K));
    const VectorXcd diag = estimated.diag();
    for (int k = 0; k < K; ++k) full(k) -= diag(k) * symbols(k);
    return full;
}

VectorXcd ici_mitigate(const VectorXcd& y_original, const PilotPattern& pattern,
                       const VectorXcd& feedback_symbols, int iterations, int x, double f_d,
                       const ChannelModelConfig& cfg, int symbol_index,
                       const CoeffEstimator& estimator) {
    VectorXcd y_work = y_original;
    for (int it = 0; it < iterations; ++it) {
        VectorXcd y_pilots(pattern.pilot_count());
        for (int p = 0; p < pattern.pilot_count(); ++p)
            y_pilots(p) = y_work(pattern.placement[p] - 1);
        const VectorXcd b_eff = estimator(y_pilots, symbol_index);
        const ChannelRealization estimated =
            realization_from_effective(b_eff, x, f_d, cfg, symbol_index);
        y_work = y_original - ici_response(estimated, feedback_symbols);
    }
    return y_work;
}

TrialMetrics run_trial(const TrialContext& ctx) {
    const ChannelModelConfig& cfg = *ctx.cfg;
    const PilotPattern& pattern = *ctx.pattern;
    const int K = cfg.subcarriers;
    const int pilots = pattern.pilot_count();
    const int data_count = K - pilots;
    const double noise_var = ctx.noise_var;

    Rng channel_rng(ctx.channel_seed);
    Rng noise_rng(ctx.noise_seed);
    Rng data_rng(ctx.data_seed);

    const DelayDopplerCoeffs raw = sample_sparse_channel(channel_rng, cfg, ctx.x);

    // pilot-domain model matrix without the per-symbol Doppler factor;
    // the factor is a unit scalar on all columns and is applied to y instead
    MatrixXcd a_base(pilots, cfg.paths);
    for (int p = 0; p < pilots; ++p) {
        const double phase = -kTwoPi * (pattern.placement[p] - 1) / cfg.freq_bins;
        for (int l = 0; l < cfg.paths; ++l)
            a_base(p, l) = pattern.symbols(p) * unit_phasor(phase * l);
    }
    std::optional<BpdnSolver> bp_solver;
    if (ctx.estimator == Estimator::kBp) bp_solver.emplace(a_base);
    const double epsilon = bp_default_epsilon(pilots, noise_var);

    VectorXd profile = VectorXd::Constant(cfg.paths, 1.0 / cfg.paths);

    double mse_acc = 0.0;
    double ici_acc = 0.0;
    long bit_errors = 0;
    long bits_total = 0;

    for (int n = 1; n <= cfg.symbols_per_packet; ++n) {
        std::vector<int> bits(4 * data_count);
        for (int& b : bits) b = static_cast<int>(data_rng.uniform_below(2));
        const TxSymbol tx = transmit_frame(bits, pattern, cfg);
        const ChannelRealization realization(raw, ctx.f_d, cfg, n);
        const VectorXcd y =
            apply_channel_and_receive(tx.time, realization, noise_var, noise_rng);
        const VectorXcd h_true = realization.diag();

        // ICI-to-signal ratio of the true realization
        {
            const VectorXcd ici = ici_response(realization, tx.freq);
            double sig = 0.0;
            for (int k = 0; k < K; ++k) sig += std::norm(h_true(k) * tx.freq(k));
            ici_acc += ici.squaredNorm() / std::max(sig, 1e-300);
        }

        const cdouble doppler_factor =
            unit_phasor(kTwoPi * ctx.x * n / cfg.symbols_per_packet);

        auto estimate_diag = [&](const VectorXcd& y_full) -> std::pair<VectorXcd, VectorXcd> {
            // returns {diag estimate over K, effective delay coefficients}
            VectorXcd y_pilots(pilots);
            for (int p = 0; p < pilots; ++p) y_pilots(p) = y_full(pattern.placement[p] - 1);
            switch (ctx.estimator) {
                case Estimator::kPerfect:
                    return {h_true, VectorXcd()};
                case Estimator::kLs: {
                    const VectorXcd diag = ls_estimate(y_pilots, pattern, K);
                    return {diag, VectorXcd()};
                }
                case Estimator::kLmmse: {
                    const VectorXcd diag =
                        lmmse_estimate(y_pilots, pattern, profile, noise_var, K);
                    return {diag, VectorXcd()};
                }
                case Estimator::kOmp: {
                    PilotObservation obs{y_pilots * std::conj(doppler_factor), a_base,
                                         noise_var, ctx.x};
                    const EstimateResult res = omp_estimate(obs, ctx.omp);
                    return {coeffs_to_channel(res.b_hat, ctx.x, n, cfg), res.b_hat};
                }
                case Estimator::kBp: {
                    const EstimateResult res =
                        bp_solver->solve(y_pilots * std::conj(doppler_factor), epsilon, ctx.bp);
                    return {coeffs_to_channel(res.b_hat, ctx.x, n, cfg), res.b_hat};
                }
            }
            throw std::logic_error("unreachable");
        };

        // delay-domain coefficients for ICI re-synthesis; linear estimators
        // are projected onto the L leading delay taps
        auto coeffs_of = [&](const std::pair<VectorXcd, VectorXcd>& est) -> VectorXcd {
            if (est.second.size() > 0) return est.second;
            VectorXcd b(cfg.paths);
            for (int l = 0; l < cfg.paths; ++l) {
                cdouble acc(0.0, 0.0);
                for (int k = 0; k < K; ++k)
                    acc += est.first(k) *
                           unit_phasor(kTwoPi * l * k / static_cast<double>(K));
                b(l) = acc / (static_cast<double>(K) * doppler_factor);
            }
            return b;
        };

        auto est = estimate_diag(y);
        if (ctx.estimator != Estimator::kPerfect) {
            VectorXcd feedback = tx.freq;  // genie: true data, known pilots
            if (!ctx.genie_feedback) {
                // decision-directed: equalize and re-modulate data subcarriers
                feedback = tx.freq;
                size_t cursor = 0;
                for (int k = 1; k <= K; ++k) {
                    if (cursor < pattern.placement.size() &&
                        pattern.placement[cursor] == k) {
                        ++cursor;
                        continue;
                    }
                    const cdouble h = est.first(k - 1);
                    const cdouble eq =
                        std::abs(h) < 1e-12 ? cdouble(0.0, 0.0) : y(k - 1) / h;
                    feedback(k - 1) = qam16::modulate(qam16::demodulate(eq));
                }
            }
            VectorXcd y_work = y;
            for (int it = 0; it < ctx.ici_iterations; ++it) {
                const VectorXcd b_eff = coeffs_of(est);
                const ChannelRealization estimated =
                    realization_from_effective(b_eff, ctx.x, ctx.f_d, cfg, n);
                y_work = y - ici_response(estimated, feedback);
                est = estimate_diag(y_work);
            }
        }

        const VectorXcd& h_hat = est.first;
        double num = 0.0, den = 0.0;
        for (int k = 0; k < K; ++k) {
            num += std::norm(h_hat(k) - h_true(k));
            den += std::norm(h_true(k));
        }
        mse_acc += num / std::max(den, 1e-300);

        // ZF equalization and hard 16-QAM decisions on data subcarriers
        size_t cursor = 0;
        int bit = 0;
        for (int k = 1; k <= K; ++k) {
            if (cursor < pattern.placement.size() && pattern.placement[cursor] == k) {
                ++cursor;
                continue;
            }
            const cdouble h = h_hat(k - 1);
            const cdouble eq = std::abs(h) < 1e-12 ? cdouble(0.0, 0.0) : y(k - 1) / h;
            const int word = qam16::demodulate(eq);
            const int sent = (bits[bit] << 3) | (bits[bit + 1] << 2) |
                             (bits[bit + 2] << 1) | bits[bit + 3];
            bit_errors += __builtin_popcount(word ^ sent);
            bit += 4;
        }
        bits_total += 4 * data_count;
    }

    TrialMetrics metrics;
    metrics.mse = mse_acc / cfg.symbols_per_packet;
    metrics.ber = static_cast<double>(bit_errors) / static_cast<double>(bits_total);
    metrics.ici_power = ici_acc / cfg.symbols_per_packet;
    metrics.coherence = 0.0;  // filled by the sweep driver (pattern-level quantity)
    return metrics;
}

std::vector<SimRow> run_monte_carlo(const SimConfig& cfg, const Codebook* codebook) {
    cfg.validate();
    const double speed = kmh_to_mps(cfg.speed_kmh);
    std::vector<double> alphas = cfg.alpha_m;
    if (alphas.empty()) alphas = {0.0};

    const bool needs_codebook =
        std::find(cfg.pilot_sources.begin(), cfg.pilot_sources.end(),
                  PilotSource::kCodebook) != cfg.pilot_sources.end();
    if (needs_codebook && codebook == nullptr)
        throw ValidationError("sim: codebook pilot source requested without a codebook");
    if (codebook != nullptr) {
        if (codebook->subcarriers != cfg.channel.subcarriers)
            throw ValidationError("sim: codebook K does not match the configuration");
        if (!codebook->entries.empty() &&
            codebook->entries.front().pilot_count() != cfg.pilots)
            throw ValidationError("sim: codebook P does not match the configuration");
    }

    // random-search baseline pattern is designed once per run
    std::optional<PilotPattern> random_search_pattern;
    if (std::find(cfg.pilot_sources.begin(), cfg.pilot_sources.end(),
                  PilotSource::kRandomSearch) != cfg.pilot_sources.end()) {
        Rng rng(derive_seed(cfg.seed, 0xF5));
        CoherenceParams params = cfg.design.coherence;
        auto [pattern, trace] = random_search_design(
            cfg.random_search_iters, cfg.channel.subcarriers, cfg.pilots, cfg.channel,
            params, rng);
        (void)trace;
        random_search_pattern = std::move(pattern);
    }

    std::vector<SimRow> rows;
    for (size_t snr_idx = 0; snr_idx < cfg.snr_db.size(); ++snr_idx) {
        const double snr = cfg.snr_db[snr_idx];
        for (size_t alpha_idx = 0; alpha_idx < alphas.size(); ++alpha_idx) {
            const double alpha = alphas[alpha_idx];
            const PositionState state{alpha, speed};
            const double f_d = doppler_at_position(state, cfg.geometry);
            const int x = doppler_index(f_d, cfg.channel.t_d, cfg.channel.f_dmax);
            for (Estimator estimator : cfg.estimators) {
                for (PilotSource source : cfg.pilot_sources) {
                    for (int q : cfg.ici_iterations) {
                        SimRow row;
                        row.snr_db = snr;
                        row.alpha_m = alpha;
                        row.f_d_hz = f_d;
                        row.estimator = to_string(estimator);
                        row.pilot_source = to_string(source);
                        row.q = q;
                        row.trials = cfg.trials;

                        std::vector<double> mses(cfg.trials), bers(cfg.trials),
                            cohs(cfg.trials);
#pragma omp parallel for schedule(dynamic)
                        for (int trial = 0; trial < cfg.trials; ++trial) {
                            PilotPattern pattern;
                            switch (source) {
                                case PilotSource::kCodebook:
                                    pattern = select_pilot(*codebook, f_d, cfg.channel.t_d);
                                    break;
                                case PilotSource::kEquidistant: {
                                    Rng rng(derive_seed(cfg.seed, 0xE0, trial));
                                    pattern = equidistant_pattern(cfg.channel.subcarriers,
                                                                  cfg.pilots, rng);
                                    break;
                                }
                                case PilotSource::kRandomSearch:
                                    pattern = *random_search_pattern;
                                    break;
                            }
                            TrialContext ctx;
                            ctx.cfg = &cfg.channel;
                            ctx.pattern = &pattern;
                            ctx.f_d = f_d;
                            ctx.x = x;
                            ctx.noise_var = std::pow(10.0, -snr / 10.0);
                            ctx.estimator = estimator;
                            ctx.ici_iterations = q;
                            ctx.genie_feedback = cfg.genie_feedback;
                            ctx.omp = cfg.omp;
                            ctx.bp = cfg.bp;
                            ctx.channel_seed =
                                derive_seed(cfg.seed, 0xC0, alpha_idx, trial);
                            ctx.noise_seed = derive_seed(
                                cfg.seed, 0xA0, alpha_idx * 1000 + snr_idx, trial);
                            ctx.data_seed = derive_seed(cfg.seed, 0xD0, alpha_idx, trial);
                            TrialMetrics m = run_trial(ctx);
                            mses[trial] = m.mse;
                            bers[trial] = m.ber;
                            cohs[trial] = pattern_coherence(pattern, cfg.channel,
                                                            cfg.design.coherence);
                        }
                        auto mean_std = [](const std::vector<double>& v) {
                            double mean = 0.0;
                            for (double value : v) mean += value;
                            mean /= static_cast<double>(v.size());
                            double var = 0.0;
                            for (double value : v) var += (value - mean) * (value - mean);
                            var = v.size() > 1 ? var / static_cast<double>(v.size() - 1) : 0.0;
                            return std::pair<double, double>(mean, std::sqrt(var));
                        };
                        auto [mse_mean, mse_std] = mean_std(mses);
                        auto [ber_mean, ber_std] = mean_std(bers);
                        auto [coh_mean, coh_std] = mean_std(cohs);
                        (void)coh_std;
                        row.mse_mean = mse_mean;
                        row.mse_std = mse_std;
                        row.ber_mean = ber_mean;
                        row.ber_std = ber_std;
                        row.coherence = coh_mean;
                        rows.push_back(std::move(row));
                    }
                }
            }
        }
    }
    return rows;
}

std::string rows_to_csv(const std::vector<SimRow>& rows, const std::string& config_hash,
                        std::uint64_t seed) {
    std::ostringstream out;
    out.precision(17);
    out << "# config_hash=" << config_hash << " seed=" << seed << "\n";
    out << "# mse = ||H_hat - H||^2 / ||H||^2 over the K-point diagonal response,"
           " averaged per packet; snr = unit symbol energy / noise variance\n";
    out << "snr_db,alpha_m,f_d_hz,estimator,pilot_source,q,trials,"
           "mse_mean,mse_std,ber_mean,ber_std,coherence\n";
    for (const SimRow& row : rows) {
        out << row.snr_db << ',' << row.alpha_m << ',' << row.f_d_hz << ','
            << row.estimator << ',' << row.pilot_source << ',' << row.q << ','
            << row.trials << ',' << row.mse_mean << ',' << row.mse_std << ','
            << row.ber_mean << ',' << row.ber_std << ',' << row.coherence << "\n";
    }
    return out.str();
}

}  // namespace hstcs
