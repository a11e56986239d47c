#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mkmimo/channel_sampler.hpp"

namespace mkmimo {

// Instantaneous capacity of one realization, in nats:
//   C = ln det(I + (snr / (n_t n_r)) H H^H)
// computed from the Hermitian eigenvalues of the smaller Gram matrix of H
// (never from a raw determinant, which cancels catastrophically at high SNR).
double instantaneous_capacity(const ChannelMatrix& h, double snr);

// Factored multi-keyhole capacity from the per-keyhole Tx/Rx vectors
// (h_t, h_r are n_t x M and n_r x M; A = diag of the gains):
//   C = ln det(I + snr * B_r A B_t A^H),  B_t = H_t^H H_t / n_t,
//                                         B_r = H_r^H H_r / n_r.
// Evaluated as eigenvalues of B_r^{1/2} (A B_t A^H) B_r^{1/2}; agrees with
// instantaneous_capacity on the assembled H to 1e-10 relative.
double keyhole_capacity_factored(const Eigen::MatrixXcd& h_t, const Eigen::MatrixXcd& h_r,
                                 const KeyholeGains& gains, double snr);

// Same channel driven with a Tx input covariance q (n_t x n_t, trace n_t):
//   C = ln det(I + (snr / (n_t n_r)) H Q H^H)
// via the factored form with B_t replaced by H_t^H Q H_t / n_t. q = I
// reduces to keyhole_capacity_factored.
double keyhole_capacity_tx_covariance(const Eigen::MatrixXcd& h_t, const Eigen::MatrixXcd& h_r,
                                      const KeyholeGains& gains, const Eigen::MatrixXcd& q,
                                      double snr);

// Capacity of the equivalent Rayleigh channel with Rx factor h_r (n_r x M)
// and Tx covariance q (M x M PSD):
//   C = ln det(I + (snr / n_r) H_r Q H_r^H).
// Throws a domain error when q is not PSD.
double equivalent_rayleigh_capacity(const Eigen::MatrixXcd& h_r, const Eigen::MatrixXcd& q,
                                    double snr, Eigen::Index n_r);

// Right-continuous empirical CDF: F(x) = (#samples <= x) / N, so F equals
// k/N at the k-th sorted value.
class EmpiricalCdf {
 public:
  explicit EmpiricalCdf(std::vector<double> samples);

  double operator()(double x) const;
  const std::vector<double>& sorted_values() const { return values_; }
  std::size_t size() const { return values_.size(); }

 private:
  std::vector<double> values_;
};

// Monte Carlo capacity draws plus the provenance needed to reproduce them.
struct CapacitySamples {
  std::vector<double> values;  // nats, indexed by trial
  std::uint64_t seed = 0;
  std::uint64_t n_trials = 0;
  std::string spec_digest;
};

// Kronecker-Rayleigh counterpart of ChannelSpec for the Monte Carlo drivers.
struct RayleighSpec {
  CorrelationMatrix r_t;
  CorrelationMatrix r_r;
  double snr = 0.0;
};

// Deterministic in (spec, seed, n_trials) — trials run on independent RNG
// streams, are fanned out across workers, and land in trial order, so the
// result is identical for any worker count. The multi-keyhole driver uses
// the factored capacity path when M < min(n_t, n_r) and the assembled-H path
// otherwise (the two agree to 1e-10; the choice is a pure function of the
// spec).
CapacitySamples monte_carlo_capacity(const ChannelSpec& spec, std::uint64_t n_trials,
                                     std::uint64_t seed);
CapacitySamples monte_carlo_capacity(const RayleighSpec& spec, std::uint64_t n_trials,
                                     std::uint64_t seed);

EmpiricalCdf monte_carlo_cdf(const ChannelSpec& spec, std::uint64_t n_trials, std::uint64_t seed);
EmpiricalCdf monte_carlo_cdf(const RayleighSpec& spec, std::uint64_t n_trials, std::uint64_t seed);

// Kolmogorov-Smirnov sup-distance, evaluated on both sides of every step.
double ks_distance(const EmpiricalCdf& samples, const EmpiricalCdf& reference);
double ks_distance(const EmpiricalCdf& samples, const std::function<double(double)>& reference_cdf);

// Scale of KS fluctuations between two empirical CDFs of sizes n and m:
// sqrt((n + m) / (n m)).
double ks_standard_error(std::size_t n, std::size_t m);

// Stable 16-hex-digit identifier of the generating spec (dimensions, gains,
// correlation entries, SNR), used to stamp CapacitySamples provenance.
std::string spec_digest(const ChannelSpec& spec);
std::string spec_digest(const RayleighSpec& spec);

}  // namespace mkmimo
