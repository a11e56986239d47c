#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mkmimo/asymptotics.hpp"
#include "mkmimo/capacity.hpp"
#include "mkmimo/channel_sampler.hpp"
#include "mkmimo/corr_models.hpp"

namespace mkmimo {

// One experimental curve: a sweep axis, a per-point metric (KS distance or
// outage probability), matching standard errors, and optional per-point
// auxiliary values. Lengths always agree; aux may be empty.
struct SweepResult {
  std::vector<double> parameters;
  std::vector<double> metrics;
  std::vector<double> std_errors;
  std::vector<double> aux;
  std::uint64_t n_trials = 0;
  std::uint64_t seed = 0;
  std::optional<std::size_t> argmin;  // index of the smallest metric, when meaningful
  std::string warning;                // non-fatal diagnostics; empty when clean
  std::string note;                   // methodological note on the construction
};

// Diagnostics for the Gaussian-limit conditions on the keyhole gains:
// cube_sum -> 0 is sufficient for asymptotic normality in M, max_gain -> 0
// is necessary.
struct GainDiagnostics {
  double cube_sum = 0.0;  // sum_k |a_k|^3
  double max_gain = 0.0;  // max_k |a_k|
};

GainDiagnostics gain_diagnostics(const KeyholeGains& gains);

// Spectrum summary of the gain-averaged correlation C = sum_k |a_k|^2
// (R_tk^T kron R_rk), whose non-singularity drives the full-rank limit.
// nonsingular iff c_min_eig > 1e-10 * c_max_eig. The reported lower bound is
// sum_k |a_k|^2 lambda_min(R_tk) lambda_min(R_rk) <= c_min_eig.
struct CorrSingularity {
  double c_min_eig = 0.0;
  double c_max_eig = 0.0;
  double min_eig_lower_bound = 0.0;
  bool nonsingular = false;
};

CorrSingularity average_corr_singularity(const KeyholeGains& gains,
                                         const std::vector<CorrelationMatrix>& tx_corr,
                                         const std::vector<CorrelationMatrix>& rx_corr);

// Monte Carlo check of the quadratic-form moments: beta = ||R^{1/2} g||^2 with
// g i.i.d. CN(0,1) has E[beta/n] = tr(R)/n and Var[beta/n] = ||R||^2/n^2.
struct MomentCheck {
  double emp_mean = 0.0;
  double emp_var = 0.0;
  double pred_mean = 0.0;
  double pred_var = 0.0;
  std::uint64_t n_trials = 0;
};

MomentCheck lemma_a1_check(const CorrelationMatrix& r, std::uint64_t n_trials, std::uint64_t seed);

// Analytic-vs-empirical mean-squared-deviation pair; std_error is the Monte
// Carlo standard error of the empirical mean.
struct DeviationCheck {
  double analytic = 0.0;
  double empirical = 0.0;
  double std_error = 0.0;
  std::uint64_t n_trials = 0;
};

// E || H^H H / n - I ||^2 for H with independent columns h_m ~ CN(0, R_m);
// analytic value n^-2 sum_m sum_k tr[R_m R_k].
DeviationCheck lemma_a2_deviation(const std::vector<CorrelationMatrix>& r_list,
                                  std::uint64_t n_trials, std::uint64_t seed);

// E || H H^H / n_t - R_r ||^2 for Kronecker-correlated H = R_r^{1/2} X R_t^{1/2};
// analytic value (n_r ||R_t|| / n_t)^2.
DeviationCheck lemma_a3_deviation(const CorrelationMatrix& r_t, const CorrelationMatrix& r_r,
                                  std::uint64_t n_trials, std::uint64_t seed);

// Empirical CDF of the equivalent-Rayleigh capacity
//   C = ln det(I + (snr/n_r) H_r Q H_r^H),  Q = A A^H,
// with H_r drawn column-wise from the per-keyhole Rx correlations on streams
// disjoint from every channel sampler (rx_reference tags).
EmpiricalCdf equivalent_rayleigh_reference_cdf(const KeyholeGains& gains,
                                               const std::vector<CorrelationMatrix>& rx_corr,
                                               double snr, std::uint64_t n_trials,
                                               std::uint64_t seed);

// Tx-array sweep: for each n_t, the KS distance between the multi-keyhole
// capacity CDF (Tx correlation tx_model(n_t) shared by all keyholes) and the
// equivalent-Rayleigh reference above, which does not depend on n_t and is
// simulated once with an independently derived seed.
SweepResult theorem1_sweep(const KeyholeGains& gains,
                           const std::vector<CorrelationMatrix>& rx_corr, double snr,
                           const std::vector<Eigen::Index>& n_t_list,
                           const std::function<CorrelationMatrix(Eigen::Index)>& tx_model,
                           std::uint64_t n_trials, std::uint64_t seed);

// Keyhole-count sweep at fixed n_t, n_r with equal gains and shared Tx/Rx
// correlations: for each M, the KS distance to the Kronecker-Rayleigh
// reference CDF (independently derived seed); aux holds cube_sum = 1/sqrt(M).
SweepResult theorem2_sweep(const CorrelationMatrix& r_t, const CorrelationMatrix& r_r, double snr,
                           const std::vector<Eigen::Index>& m_list, std::uint64_t n_trials,
                           std::uint64_t seed);

// Active-antenna sweep of the semi-correlated channel (R_t = I): for each k,
// the Monte Carlo outage probability at the given rate under the Tx
// covariance Q* = (n_t/k) diag(1..1,0..0) with k ones (trace n_t). Common
// random numbers across k; metrics are outage probabilities, std_errors are
// binomial standard errors, aux holds the concentration measure
// ||Q*||/n_t = 1/sqrt(k), argmin marks the minimizing k.
SweepResult telatar_sweep(Eigen::Index n_t, Eigen::Index n_r, const KeyholeGains& gains,
                          const std::vector<CorrelationMatrix>& rx_corr, double snr, double rate,
                          const std::vector<Eigen::Index>& k_list, std::uint64_t n_trials,
                          std::uint64_t seed);

// Rate whose Gaussian-approximation outage probability equals eps for the
// uncorrelated equal-gain channel: mu - sigma * Q^{-1}(eps) from the exact
// moments (rank-deficient family when M < min(n_t, n_r), full-rank family
// otherwise).
double telatar_rate_for_epsilon(Eigen::Index n_t, Eigen::Index n_r, Eigen::Index m, double snr,
                                double eps);

// KS distance between Monte Carlo capacities and the closed-form Gaussian
// N(mu, sigma^2) of the matching channel family.
struct GaussianityCheck {
  double ks = 0.0;
  GaussianApprox approx;
  std::uint64_t n_trials = 0;
};

// Full-rank case with equal gains 1/sqrt(M) and correlations shared by all
// keyholes. When M >= n_t the exact Wishart reparameterization is used, so
// cost does not grow with M; otherwise the direct sampler runs.
GaussianityCheck frmk_gaussianity(const CorrelationMatrix& r_t, const CorrelationMatrix& r_r,
                                  Eigen::Index m, double snr, std::uint64_t n_trials,
                                  std::uint64_t seed);

// Rank-deficient case for an arbitrary channel spec.
GaussianityCheck rdmk_gaussianity(const ChannelSpec& spec, std::uint64_t n_trials,
                                  std::uint64_t seed);

}  // namespace mkmimo
