#pragma once

#include "hstcs/channel_model.hpp"
#include "hstcs/common.hpp"
#include "hstcs/pilot_pattern.hpp"

namespace hstcs {

// Pilot-domain observation y = X_d(p) Phi_x b_x + d + w.
struct PilotObservation {
    VectorXcd y;       // received pilots, length P
    MatrixXcd A;       // X_d(p) * Phi_x, P x L
    double noise_var = 0.0;
    int x = 0;
};

struct EstimateResult {
    VectorXcd b_hat;            // length L
    std::vector<int> support;   // indices of nonzeros in b_hat
    double residual_norm = 0.0;
    bool converged = true;
    bool regularized = false;   // OMP fell back to a ridge refit
};

struct OmpOptions {
    int max_sparsity = 6;
    double residual_tol = -1.0;  // stop early when ||r|| <= tol (ignored if < 0)
};

// Orthogonal matching pursuit with a least-squares refit per iteration.
EstimateResult omp_estimate(const PilotObservation& obs, const OmpOptions& options);

struct BpOptions {
    int max_iterations = 10000;
    double tolerance = 1e-6;  // optimality/feasibility slack
    double rho = 1.0;         // ADMM penalty
};

// Noise-scaled default radius for the residual ball.
double bp_default_epsilon(int pilots, double noise_var);

// Basis-pursuit denoising, min ||b||_1 s.t. ||y - A b||_2 <= epsilon, solved
// with ADMM; the constraint projection uses a cached SVD of A and a 1-D
// safeguarded search on the Lagrange multiplier. epsilon = 0 degenerates to
// the affine (noiseless basis pursuit) projection.
class BpdnSolver {
public:
    explicit BpdnSolver(const MatrixXcd& a);
    EstimateResult solve(const VectorXcd& y, double epsilon, const BpOptions& options) const;

private:
    VectorXcd project_ball(const VectorXcd& v, const VectorXcd& y, double epsilon,
                           const VectorXcd& uy, double out_of_range_norm) const;

    MatrixXcd a_;
    Eigen::JacobiSVD<MatrixXcd> svd_;
};

EstimateResult bp_estimate(const PilotObservation& obs, double epsilon,
                           const BpOptions& options = {});

// Conventional least squares: per-pilot division plus linear interpolation of
// real/imag parts over all K subcarriers (constant beyond the edge pilots).
VectorXcd ls_estimate(const VectorXcd& y_pilots, const PilotPattern& pattern,
                      int subcarriers);

// Wiener filtering of the LS pilot estimates using the delay power profile:
// H_hat = R_hp (R_pp + sigma^2 diag(1/E))^{-1} H_LS. A zero noise variance is
// handled with a pseudo-inverse solve.
VectorXcd lmmse_estimate(const VectorXcd& y_pilots, const PilotPattern& pattern,
                         const VectorXd& delay_power_profile, double noise_var,
                         int subcarriers);

// Expands delay-domain coefficients to the K-point diagonal response,
// H(k) = e^{j 2 pi x n / N_t} sum_l b_l e^{-j 2 pi l (k-1) / N_f}.
VectorXcd coeffs_to_channel(const VectorXcd& b_hat, int x, int symbol_index,
                            const ChannelModelConfig& cfg);

}  // namespace hstcs
