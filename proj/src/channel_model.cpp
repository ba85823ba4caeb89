#include "hstcs/channel_model.hpp"

#include <algorithm>

namespace hstcs {

std::pair<int, int> resolvable_dims(double bandwidth, double tau_max, double t_d,
                                    double f_dmax) {
    if (bandwidth <= 0.0 || tau_max < 0.0 || t_d <= 0.0 || f_dmax < 0.0)
        throw ValidationError("resolvable_dims: parameters must be positive");
    const int paths = static_cast<int>(ceil_snapped(bandwidth * tau_max)) + 1;
    const int doppler_half = static_cast<int>(ceil_snapped(2.0 * t_d * f_dmax));
    return {paths, doppler_half};
}

void ChannelModelConfig::finalize() {
    auto [l, m] = resolvable_dims(bandwidth, tau_max, t_d, f_dmax);
    paths = l;
    doppler_half = m;
    coeff_count = paths * (2 * doppler_half + 1);
    freq_bins = subcarriers;
    symbols_per_packet = std::max(1, static_cast<int>(floor_snapped(t_d / symbol_duration())));
    if (sparsity > paths)
        throw ValidationError("channel: sparsity S exceeds path count L");
    if (cp_len < paths - 1)
        throw ValidationError("channel: cp_len shorter than the channel delay span");
    if (gamma_rel <= 0.0)
        throw ValidationError("channel: gamma must be positive");
}

VectorXcd DelayDopplerCoeffs::stacked() const {
    return Eigen::Map<const VectorXcd>(B.data(), B.size());
}

VectorXcd DelayDopplerCoeffs::dominant_column() const {
    return B.col(x + (B.cols() - 1) / 2);
}

int DelayDopplerCoeffs::dominance_count(double gamma) const {
    int count = 0;
    for (Eigen::Index j = 0; j < B.cols(); ++j)
        for (Eigen::Index i = 0; i < B.rows(); ++i)
            if (std::norm(B(i, j)) > gamma) ++count;
    return count;
}

static void check_placement(const std::vector<int>& placement, int subcarriers) {
    if (placement.empty()) throw ValidationError("placement: empty");
    for (size_t i = 0; i < placement.size(); ++i) {
        if (placement[i] < 1 || placement[i] > subcarriers)
            throw ValidationError("placement: subcarrier index out of [1, K]");
        if (i > 0 && placement[i] <= placement[i - 1])
            throw ValidationError("placement: indices must be strictly increasing");
    }
}

Dictionary build_dictionary(const std::vector<int>& placement, int symbol_index,
                            const ChannelModelConfig& cfg) {
    check_placement(placement, cfg.subcarriers);
    const int pilots = static_cast<int>(placement.size());
    const int half = cfg.doppler_half;
    Dictionary dict;
    dict.placement = placement;
    dict.symbol_index = symbol_index;
    dict.phi.resize(pilots, cfg.coeff_count);
    for (int p = 0; p < pilots; ++p) {
        const double row_phase = -kTwoPi * (placement[p] - 1) / cfg.freq_bins;
        for (int m = -half; m <= half; ++m) {
            const cdouble doppler = unit_phasor(kTwoPi * m * symbol_index / cfg.symbols_per_packet);
            for (int l = 0; l < cfg.paths; ++l)
                dict.phi(p, cfg.paths * (m + half) + l) = doppler * unit_phasor(row_phase * l);
        }
    }
    return dict;
}

MatrixXcd dominant_submatrix(const Dictionary& dict, int x, const ChannelModelConfig& cfg) {
    if (std::abs(x) > cfg.doppler_half)
        throw std::domain_error("dominant_submatrix: |x| > M");
    const int offset = cfg.paths * (cfg.doppler_half + x);
    return dict.phi.middleCols(offset, cfg.paths);
}

MatrixXcd dominant_block(const std::vector<int>& placement, int x, int symbol_index,
                         const ChannelModelConfig& cfg) {
    if (std::abs(x) > cfg.doppler_half)
        throw std::domain_error("dominant_block: |x| > M");
    check_placement(placement, cfg.subcarriers);
    const int pilots = static_cast<int>(placement.size());
    MatrixXcd block(pilots, cfg.paths);
    const cdouble doppler = unit_phasor(kTwoPi * x * symbol_index / cfg.symbols_per_packet);
    for (int p = 0; p < pilots; ++p) {
        const double row_phase = -kTwoPi * (placement[p] - 1) / cfg.freq_bins;
        for (int l = 0; l < cfg.paths; ++l)
            block(p, l) = doppler * unit_phasor(row_phase * l);
    }
    return block;
}

DelayDopplerCoeffs sample_sparse_channel(Rng& rng, const ChannelModelConfig& cfg, int x) {
    if (std::abs(x) > cfg.doppler_half)
        throw std::domain_error("sample_sparse_channel: |x| > M");
    DelayDopplerCoeffs coeffs;
    coeffs.B = MatrixXcd::Zero(cfg.paths, 2 * cfg.doppler_half + 1);
    coeffs.x = x;
    if (cfg.sparsity == 0) return coeffs;
    const auto delays = rng.sample_distinct_sorted(0, cfg.paths, cfg.sparsity);
    double power = 0.0;
    std::vector<cdouble> amps(delays.size());
    for (auto& a : amps) {
        a = rng.cnormal();
        power += std::norm(a);
    }
    const double scale = 1.0 / std::sqrt(power);
    for (size_t i = 0; i < delays.size(); ++i)
        coeffs.B(delays[i], x + cfg.doppler_half) = amps[i] * scale;
    return coeffs;
}

ChannelRealization::ChannelRealization(const DelayDopplerCoeffs& raw, double f_d,
                                       const ChannelModelConfig& cfg, int symbol_index)
    : f_d_(f_d), symbol_index_(symbol_index), cfg_(&cfg) {
    const int K = cfg.subcarriers;
    const VectorXcd column = raw.dominant_column();
    for (int l = 0; l < cfg.paths; ++l) {
        if (column(l) != cdouble(0.0, 0.0)) delays_.push_back(l);
    }
    amps_.resize(delays_.size());
    for (size_t i = 0; i < delays_.size(); ++i) amps_(i) = column(delays_[i]);

    // Post-CP window of symbol n (1-based) starts at global sample
    // (n-1)*(K+cp) + cp.
    start_sample_ = static_cast<double>(symbol_index - 1) * (K + cfg.cp_len) + cfg.cp_len;

    // G(f) = sum_{s=0}^{K-1} r^s with r = e^{j2pi(f_d Ts + f/K)}, f = (d-k) mod K.
    geom_sum_.resize(K);
    const double w0 = f_d_ * cfg.sample_period();
    for (int f = 0; f < K; ++f) {
        const double step = kTwoPi * (w0 + static_cast<double>(f) / K);
        const cdouble r = unit_phasor(step);
        if (std::abs(r - cdouble(1.0, 0.0)) < 1e-13) {
            geom_sum_(f) = cdouble(K, 0.0);
        } else {
            geom_sum_(f) = (unit_phasor(step * K) - 1.0) / (r - 1.0);
        }
    }

    // T(d) = e^{j2pi f_d start Ts} * sum_l beta_l e^{-j2pi l d / K}.
    const cdouble start_phase = unit_phasor(kTwoPi * w0 * start_sample_);
    col_response_.resize(K);
    for (int d = 0; d < K; ++d) {
        cdouble acc(0.0, 0.0);
        for (size_t i = 0; i < delays_.size(); ++i)
            acc += amps_(i) * unit_phasor(-kTwoPi * delays_[i] * d / static_cast<double>(K));
        col_response_(d) = start_phase * acc;
    }

    // Effective per-symbol coefficients: time average of each tap over the
    // post-CP window, b_l = beta_l * (1/K) sum_s e^{j2pi f_d (start+s) Ts}.
    // The symbol's Doppler factor e^{j2pi x n / N_t} is divided out so that
    // re-synthesis through the dictionary reproduces diag(H) exactly.
    effective_.B = MatrixXcd::Zero(cfg.paths, 2 * cfg.doppler_half + 1);
    effective_.x = raw.x;
    const cdouble avg = start_phase * geom_sum_(0) / static_cast<double>(K) *
                        unit_phasor(-kTwoPi * raw.x * symbol_index / cfg.symbols_per_packet);
    for (size_t i = 0; i < delays_.size(); ++i)
        effective_.B(delays_[i], raw.x + cfg.doppler_half) = amps_(i) * avg;
}

cdouble ChannelRealization::tap(int delay, int sample) const {
    for (size_t i = 0; i < delays_.size(); ++i) {
        if (delays_[i] == delay) {
            const double t = (start_sample_ - cfg_->cp_len) + sample;
            return amps_(i) * unit_phasor(kTwoPi * f_d_ * cfg_->sample_period() * t);
        }
    }
    return {0.0, 0.0};
}

cdouble ChannelRealization::entry(int row, int col) const {
    const int K = cfg_->subcarriers;
    const int f = ((col - row) % K + K) % K;
    return col_response_(col) * geom_sum_(f) / static_cast<double>(K);
}

VectorXcd ChannelRealization::diag() const {
    const int K = cfg_->subcarriers;
    VectorXcd d(K);
    const cdouble scale = geom_sum_(0) / static_cast<double>(K);
    for (int k = 0; k < K; ++k) d(k) = col_response_(k) * scale;
    return d;
}

MatrixXcd ChannelRealization::full() const {
    const int K = cfg_->subcarriers;
    MatrixXcd h(K, K);
#pragma omp parallel for schedule(static)
    for (int k = 0; k < K; ++k)
        for (int d = 0; d < K; ++d) h(k, d) = entry(k, d);
    return h;
}

MatrixXcd ChannelRealization::full_free() const {
    return diag().asDiagonal();
}

MatrixXcd ChannelRealization::full_ici() const {
    MatrixXcd h = full();
    h.diagonal().setZero();
    return h;
}

VectorXcd ChannelRealization::ici_rows_times(const std::vector<int>& rows,
                                             const VectorXcd& x) const {
    const int K = cfg_->subcarriers;
    VectorXcd out(rows.size());
    for (size_t i = 0; i < rows.size(); ++i) {
        const int k = rows[i] - 1;
        cdouble acc(0.0, 0.0);
        for (int d = 0; d < K; ++d) {
            if (d == k) continue;
            acc += entry(k, d) * x(d);
        }
        out(i) = acc;
    }
    return out;
}

VectorXcd ChannelRealization::apply_time_domain(const VectorXcd& time_samples) const {
    const Eigen::Index n = time_samples.size();
    VectorXcd out = VectorXcd::Zero(n);
    const double base = start_sample_ - cfg_->cp_len;
    for (Eigen::Index s = 0; s < n; ++s) {
        cdouble acc(0.0, 0.0);
        const cdouble rot =
            unit_phasor(kTwoPi * f_d_ * cfg_->sample_period() * (base + static_cast<double>(s)));
        for (size_t i = 0; i < delays_.size(); ++i) {
            const Eigen::Index src = (s - delays_[i] % n + n) % n;
            acc += amps_(i) * rot * time_samples(src);
        }
        out(s) = acc;
    }
    return out;
}

cdouble diag_from_coeffs(const DelayDopplerCoeffs& coeffs, int symbol_index,
                         int subcarrier, const ChannelModelConfig& cfg) {
    const int half = (coeffs.B.cols() - 1) / 2;
    cdouble acc(0.0, 0.0);
    for (int m = -half; m <= half; ++m) {
        const cdouble doppler =
            unit_phasor(kTwoPi * m * symbol_index / cfg.symbols_per_packet);
        for (int l = 0; l < coeffs.B.rows(); ++l) {
            const cdouble beta = coeffs.B(l, m + half);
            if (beta == cdouble(0.0, 0.0)) continue;
            acc += beta * doppler *
                   unit_phasor(-kTwoPi * l * (subcarrier - 1) / static_cast<double>(cfg.freq_bins));
        }
    }
    return acc;
}

ChannelRealization realization_from_effective(const VectorXcd& b_eff, int x, double f_d,
                                              const ChannelModelConfig& cfg,
                                              int symbol_index) {
    if (b_eff.size() != cfg.paths)
        throw ValidationError("realization_from_effective: coefficient length != L");
    // effective = raw * avg with avg = e^{j2pi w0 start} (G(0)/K) e^{-j2pi x n/N_t}
    const int K = cfg.subcarriers;
    const double w0 = f_d / cfg.bandwidth;
    const double start = static_cast<double>(symbol_index - 1) * (K + cfg.cp_len) + cfg.cp_len;
    cdouble window_sum(0.0, 0.0);
    const cdouble r = unit_phasor(kTwoPi * w0);
    if (std::abs(r - cdouble(1.0, 0.0)) < 1e-13) {
        window_sum = cdouble(K, 0.0);
    } else {
        window_sum = (unit_phasor(kTwoPi * w0 * K) - 1.0) / (r - 1.0);
    }
    const cdouble avg = unit_phasor(kTwoPi * w0 * start) * window_sum / static_cast<double>(K) *
                        unit_phasor(-kTwoPi * x * symbol_index / cfg.symbols_per_packet);
    if (std::abs(avg) < 1e-12)
        throw std::runtime_error("realization_from_effective: vanishing symbol average");
    DelayDopplerCoeffs raw;
    raw.B = MatrixXcd::Zero(cfg.paths, 2 * cfg.doppler_half + 1);
    raw.x = x;
    for (int l = 0; l < cfg.paths; ++l) raw.B(l, x + cfg.doppler_half) = b_eff(l) / avg;
    return ChannelRealization(raw, f_d, cfg, symbol_index);
}

namespace reference {

cdouble channel_entry_direct(const ChannelRealization& real, int row, int col,
                             const ChannelModelConfig& cfg) {
    const int K = cfg.subcarriers;
    cdouble acc(0.0, 0.0);
    for (int s = 0; s < K; ++s) {
        for (int l = 0; l < cfg.paths; ++l) {
            const cdouble h = real.tap(l, cfg.cp_len + s);
            if (h == cdouble(0.0, 0.0)) continue;
            acc += h * unit_phasor(-kTwoPi * l * col / static_cast<double>(K)) *
                   unit_phasor(kTwoPi * (col - row) * s / static_cast<double>(K));
        }
    }
    return acc / static_cast<double>(K);
}

}  // namespace reference

}  // namespace hstcs
