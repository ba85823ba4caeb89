#include "hstcs/coherence.hpp"

namespace hstcs {

static MatrixXcd normalized_columns(const MatrixXcd& matrix, bool normalize) {
    if (!normalize) return matrix;
    MatrixXcd out = matrix;
    for (Eigen::Index j = 0; j < out.cols(); ++j) {
        const double norm = out.col(j).norm();
        if (norm == 0.0)
            throw ValidationError("coherence: zero column cannot be normalized");
        out.col(j) /= norm;
    }
    return out;
}

double average_coherence(const MatrixXcd& matrix, const CoherenceParams& params) {
    params.validate();
    const Eigen::Index cols = matrix.cols();
    if (cols < 2) throw ValidationError("coherence: need at least two columns");
    const MatrixXcd m = normalized_columns(matrix, params.normalize_columns);

    std::vector<double> sums(cols, 0.0);
    std::vector<long> counts(cols, 0);
#pragma omp parallel for schedule(static)
    for (Eigen::Index j = 1; j < cols; ++j) {
        double sum = 0.0;
        long count = 0;
        for (Eigen::Index i = 0; i < j; ++i) {
            const double g = std::abs(m.col(i).dot(m.col(j)));
            if (g >= params.delta) {
                sum += g;
                ++count;
            }
        }
        sums[j] = sum;
        counts[j] = count;
    }
    double total = 0.0;
    long total_count = 0;
    for (Eigen::Index j = 1; j < cols; ++j) {
        total += sums[j];
        total_count += counts[j];
    }
    return total_count == 0 ? 0.0 : total / static_cast<double>(total_count);
}

double mutual_coherence(const MatrixXcd& matrix) {
    const Eigen::Index cols = matrix.cols();
    if (cols < 2) throw ValidationError("coherence: need at least two columns");
    const MatrixXcd m = normalized_columns(matrix, true);
    std::vector<double> maxima(cols, 0.0);
#pragma omp parallel for schedule(static)
    for (Eigen::Index j = 1; j < cols; ++j) {
        double best = 0.0;
        for (Eigen::Index i = 0; i < j; ++i)
            best = std::max(best, std::abs(m.col(i).dot(m.col(j))));
        maxima[j] = best;
    }
    double best = 0.0;
    for (double v : maxima) best = std::max(best, v);
    return best;
}

double recovery_bound(double mu) {
    if (mu <= 0.0) throw std::domain_error("recovery_bound: mu must be positive");
    return 0.5 * (1.0 + 1.0 / mu);
}

double pilot_coherence_fast(const std::vector<int>& placement,
                            const std::vector<double>& weights,
                            const ChannelModelConfig& cfg, const CoherenceParams& params) {
    params.validate();
    if (placement.size() != weights.size())
        throw ValidationError("pilot_coherence_fast: placement/weights size mismatch");
    double weight_sum = 0.0;
    for (double w : weights) weight_sum += w;
    if (weight_sum <= 0.0)
        throw ValidationError("pilot_coherence_fast: total pilot power must be positive");

    double num = 0.0;
    double den = 0.0;
    for (int z = 1; z < cfg.paths; ++z) {
        cdouble acc(0.0, 0.0);
        for (size_t p = 0; p < placement.size(); ++p)
            acc += weights[p] *
                   unit_phasor(-kTwoPi * z * (placement[p] - 1) /
                               static_cast<double>(cfg.freq_bins));
        const double g = std::abs(acc) / weight_sum;
        if (g >= params.delta) {
            const double multiplicity = cfg.paths - z;  // pairs with v - u == z
            num += multiplicity * g;
            den += multiplicity;
        }
    }
    return den == 0.0 ? 0.0 : num / den;
}

double pilot_coherence_fast(const PilotPattern& pattern, const ChannelModelConfig& cfg,
                            const CoherenceParams& params) {
    return pilot_coherence_fast(pattern.placement, pattern.realized_powers(), cfg, params);
}

namespace reference {

double average_coherence_serial(const MatrixXcd& matrix, const CoherenceParams& params) {
    params.validate();
    const Eigen::Index cols = matrix.cols();
    if (cols < 2) throw ValidationError("coherence: need at least two columns");
    const MatrixXcd m = normalized_columns(matrix, params.normalize_columns);
    double total = 0.0;
    long count = 0;
    for (Eigen::Index i = 0; i < cols; ++i) {
        for (Eigen::Index j = i + 1; j < cols; ++j) {
            const double g = std::abs(m.col(i).dot(m.col(j)));
            if (g >= params.delta) {
                total += g;
                ++count;
            }
        }
    }
    return count == 0 ? 0.0 : total / static_cast<double>(count);
}

}  // namespace reference

}  // namespace hstcs
