#include "hstcs/estimators.hpp"

#include <algorithm>

namespace hstcs {

EstimateResult omp_estimate(const PilotObservation& obs, const OmpOptions& options) {
    const Eigen::Index cols = obs.A.cols();
    const int max_atoms = std::min<Eigen::Index>(
        std::min<Eigen::Index>(options.max_sparsity, cols), obs.A.rows());
    EstimateResult result;
    result.b_hat = VectorXcd::Zero(cols);

    VectorXd column_norms(cols);
    for (Eigen::Index j = 0; j < cols; ++j) column_norms(j) = obs.A.col(j).norm();

    VectorXcd residual = obs.y;
    std::vector<int> support;
    VectorXcd coeffs;
    for (int it = 0; it < max_atoms; ++it) {
        if (options.residual_tol >= 0.0 && residual.norm() <= options.residual_tol) break;
        int best = -1;
        double best_score = -1.0;
        for (Eigen::Index j = 0; j < cols; ++j) {
            if (std::find(support.begin(), support.end(), j) != support.end()) continue;
            if (column_norms(j) == 0.0) continue;
            const double score = std::abs(obs.A.col(j).dot(residual)) / column_norms(j);
            if (score > best_score) {
                best_score = score;
                best = static_cast<int>(j);
            }
        }
        if (best < 0) break;
        support.push_back(best);

        MatrixXcd sub(obs.A.rows(), support.size());
        for (size_t s = 0; s < support.size(); ++s) sub.col(s) = obs.A.col(support[s]);
        Eigen::ColPivHouseholderQR<MatrixXcd> qr(sub);
        if (qr.rank() < static_cast<Eigen::Index>(support.size())) {
            // rank-deficient selection, refit with a small ridge
            const MatrixXcd gram = sub.adjoint() * sub +
                                   1e-12 * MatrixXcd::Identity(support.size(), support.size());
            coeffs = gram.ldlt().solve(sub.adjoint() * obs.y);
            result.regularized = true;
        } else {
            coeffs = qr.solve(obs.y);
        }
        residual = obs.y - sub * coeffs;
    }
    for (size_t s = 0; s < support.size(); ++s) result.b_hat(support[s]) = coeffs(s);
    std::sort(support.begin(), support.end());
    result.support = std::move(support);
    result.residual_norm = residual.norm();
    return result;
}

double bp_default_epsilon(int pilots, double noise_var) {
    if (noise_var <= 0.0) return 0.0;
    const double p = static_cast<double>(pilots);
    return std::sqrt(p * noise_var) * (1.0 + 2.0 * std::sqrt(2.0) / std::sqrt(2.0 * p));
}

BpdnSolver::BpdnSolver(const MatrixXcd& a)
    : a_(a), svd_(a, Eigen::ComputeThinU | Eigen::ComputeThinV) {}

VectorXcd BpdnSolver::project_ball(const VectorXcd& v, const VectorXcd& y, double epsilon,
                                   const VectorXcd& uy, double out_of_range_norm) const {
    if ((a_ * v - y).norm() <= epsilon) return v;
    const VectorXd& sv = svd_.singularValues();
    const VectorXcd w = svd_.matrixV().adjoint() * v;

    if (epsilon <= out_of_range_norm + 1e-14) {
        // affine projection onto {A b = closest attainable}; exact for eps = 0
        VectorXcd wp = w;
        for (Eigen::Index i = 0; i < sv.size(); ++i)
            wp(i) = sv(i) > 1e-13 * sv(0) ? uy(i) / sv(i) : w(i);
        return v + svd_.matrixV() * (wp - w);
    }

    // residual^2(lam) = sum |sv_i w_i - uy_i|^2 / (1 + lam sv_i^2)^2 + rho0^2,
    // monotone decreasing in lam; bisection to machine precision
    VectorXd num(sv.size());
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        num(i) = std::norm(sv(i) * w(i) - uy(i));
    const double target = epsilon * epsilon - out_of_range_norm * out_of_range_norm;
    auto in_range_residual2 = [&](double lam) {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < sv.size(); ++i) {
            const double denom = 1.0 + lam * sv(i) * sv(i);
            acc += num(i) / (denom * denom);
        }
        return acc;
    };
    double lo = 0.0, hi = 1.0;
    while (in_range_residual2(hi) > target) hi *= 2.0;
    for (int it = 0; it < 200 && (hi - lo) > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (in_range_residual2(mid) > target ? lo : hi) = mid;
    }
    VectorXcd wp(sv.size());
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        wp(i) = (w(i) + hi * sv(i) * uy(i)) / (1.0 + hi * sv(i) * sv(i));
    return v + svd_.matrixV() * (wp - w);
}

EstimateResult BpdnSolver::solve(const VectorXcd& y, double epsilon,
                                 const BpOptions& options) const {
    const Eigen::Index cols = a_.cols();
    const VectorXcd uy = svd_.matrixU().adjoint() * y;
    const double out_of_range =
        std::sqrt(std::max(y.squaredNorm() - uy.squaredNorm(), 0.0));

    auto shrink = [&](const VectorXcd& t, double kappa) {
        VectorXcd out(t.size());
        for (Eigen::Index i = 0; i < t.size(); ++i) {
            const double mag = std::abs(t(i));
            out(i) = mag <= kappa ? cdouble(0.0, 0.0) : t(i) * ((mag - kappa) / mag);
        }
        return out;
    };

    VectorXcd z = VectorXcd::Zero(cols);
    VectorXcd u = VectorXcd::Zero(cols);
    VectorXcd b = z;
    bool converged = false;
    const double scale = std::max(1.0, y.norm());
    for (int it = 0; it < options.max_iterations; ++it) {
        b = project_ball(z - u, y, epsilon, uy, out_of_range);
        const VectorXcd z_old = z;
        z = shrink(b + u, 1.0 / options.rho);
        u += b - z;
        const double primal = (b - z).norm();
        const double dual = options.rho * (z - z_old).norm();
        if (primal <= 1e-4 * options.tolerance * scale &&
            dual <= 1e-4 * options.tolerance * scale) {
            converged = true;
            break;
        }
    }

    EstimateResult result;
    result.b_hat = z;
    for (Eigen::Index i = 0; i < cols; ++i)
        if (z(i) != cdouble(0.0, 0.0)) result.support.push_back(static_cast<int>(i));
    result.residual_norm = (y - a_ * z).norm();
    result.converged = converged && result.residual_norm <= epsilon + options.tolerance;
    return result;
}

EstimateResult bp_estimate(const PilotObservation& obs, double epsilon,
                           const BpOptions& options) {
    if (epsilon < 0.0) throw ValidationError("bp_estimate: epsilon must be >= 0");
    BpdnSolver solver(obs.A);
    return solver.solve(obs.y, epsilon, options);
}

VectorXcd ls_estimate(const VectorXcd& y_pilots, const PilotPattern& pattern,
                      int subcarriers) {
    const int pilots = pattern.pilot_count();
    if (y_pilots.size() != pilots)
        throw ValidationError("ls_estimate: observation length mismatch");
    VectorXcd at_pilots(pilots);
    for (int p = 0; p < pilots; ++p) {
        if (pattern.symbols(p) == cdouble(0.0, 0.0))
            throw ValidationError("ls_estimate: zero pilot symbol");
        at_pilots(p) = y_pilots(p) / pattern.symbols(p);
    }
    VectorXcd out(subcarriers);
    int seg = 0;
    for (int k = 1; k <= subcarriers; ++k) {
        while (seg + 1 < pilots && pattern.placement[seg + 1] <= k) ++seg;
        if (k <= pattern.placement.front()) {
            out(k - 1) = at_pilots(0);
        } else if (k >= pattern.placement.back()) {
            out(k - 1) = at_pilots(pilots - 1);
        } else {
            const int k0 = pattern.placement[seg];
            const int k1 = pattern.placement[seg + 1];
            const double t = static_cast<double>(k - k0) / static_cast<double>(k1 - k0);
            out(k - 1) = (1.0 - t) * at_pilots(seg) + t * at_pilots(seg + 1);
        }
    }
    return out;
}

VectorXcd lmmse_estimate(const VectorXcd& y_pilots, const PilotPattern& pattern,
                         const VectorXd& delay_power_profile, double noise_var,
                         int subcarriers) {
    const int pilots = pattern.pilot_count();
    if (y_pilots.size() != pilots)
        throw ValidationError("lmmse_estimate: observation length mismatch");
    VectorXcd h_ls(pilots);
    for (int p = 0; p < pilots; ++p) {
        if (pattern.symbols(p) == cdouble(0.0, 0.0))
            throw ValidationError("lmmse_estimate: zero pilot symbol");
        h_ls(p) = y_pilots(p) / pattern.symbols(p);
    }

    // frequency correlation from the delay profile: R(dk) = sum_l p_l e^{-j2pi l dk / K}
    const int profile_len = static_cast<int>(delay_power_profile.size());
    std::vector<cdouble> corr(subcarriers);
    for (int dk = 0; dk < subcarriers; ++dk) {
        cdouble acc(0.0, 0.0);
        for (int l = 0; l < profile_len; ++l)
            acc += delay_power_profile(l) *
                   unit_phasor(-kTwoPi * l * dk / static_cast<double>(subcarriers));
        corr[dk] = acc;
    }
    auto r_of = [&](int k, int kp) {  // 1-based subcarrier indices
        int dk = (k - kp) % subcarriers;
        if (dk < 0) dk += subcarriers;
        return corr[dk];
    };

    MatrixXcd r_pp(pilots, pilots);
    for (int i = 0; i < pilots; ++i)
        for (int j = 0; j < pilots; ++j)
            r_pp(i, j) = r_of(pattern.placement[i], pattern.placement[j]);

    VectorXcd weights;
    if (noise_var > 0.0) {
        for (int p = 0; p < pilots; ++p)
            r_pp(p, p) += noise_var / std::norm(pattern.symbols(p));
        Eigen::LDLT<MatrixXcd> ldlt(r_pp);
        if (ldlt.info() != Eigen::Success)
            throw std::runtime_error("lmmse_estimate: singular pilot covariance");
        weights = ldlt.solve(h_ls);
    } else {
        // noiseless limit: pseudo-inverse solve
        Eigen::CompleteOrthogonalDecomposition<MatrixXcd> cod(r_pp);
        weights = cod.solve(h_ls);
    }
    VectorXcd out(subcarriers);
    for (int k = 1; k <= subcarriers; ++k) {
        cdouble acc(0.0, 0.0);
        for (int p = 0; p < pilots; ++p) acc += r_of(k, pattern.placement[p]) * weights(p);
        out(k - 1) = acc;
    }
    return out;
}

VectorXcd coeffs_to_channel(const VectorXcd& b_hat, int x, int symbol_index,
                            const ChannelModelConfig& cfg) {
    if (std::abs(x) > cfg.doppler_half)
        throw std::domain_error("coeffs_to_channel: |x| > M");
    const cdouble doppler =
        unit_phasor(kTwoPi * x * symbol_index / cfg.symbols_per_packet);
    VectorXcd out(cfg.subcarriers);
    for (int k = 0; k < cfg.subcarriers; ++k) {
        cdouble acc(0.0, 0.0);
        for (Eigen::Index l = 0; l < b_hat.size(); ++l) {
            if (b_hat(l) == cdouble(0.0, 0.0)) continue;
            acc += b_hat(l) * unit_phasor(-kTwoPi * static_cast<double>(l) * k /
                                          static_cast<double>(cfg.freq_bins));
        }
        out(k) = acc * doppler;
    }
    return out;
}

}  // namespace hstcs
