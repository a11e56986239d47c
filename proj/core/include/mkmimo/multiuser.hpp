#pragma once

#include <cstdint>
#include <vector>

#include "mkmimo/asymptotics.hpp"
#include "mkmimo/channel_sampler.hpp"

namespace mkmimo {

// Opportunistic scheduling of k_users users whose capacities are i.i.d.
// N(mu, sigma^2): leading extreme-value term mu + sigma sqrt(2 ln K).
struct ScheduledThroughput {
  double total = 0.0;  // nats per channel use
  double gain = 0.0;   // sigma sqrt(2 ln K), the gain over round-robin
};

ScheduledThroughput scheduled_throughput(double mu, double sigma, std::uint64_t k_users);

// Relay network with M keyhole nodes at per-node SNR gamma1: the capacity
// moments are the rank-deficient ones at total SNR gamma0 = gamma1 * M, fed
// through scheduled_throughput.
ScheduledThroughput relay_throughput(const KeyholeGains& gains, const std::vector<double>& psi_t,
                                     const std::vector<double>& psi_r, double gamma1,
                                     std::uint64_t k_users, Regime regime,
                                     GainExponent exponent = GainExponent::quartic);

// Closed forms for the uncorrelated equal-gain network:
//   low SNR:  M gamma1 + gamma1 sqrt(2 M (1/n_t + 1/n_r) ln K)
//   high SNR: M ln(gamma1) + sqrt(2 M (1/n_t + 1/n_r) ln K)
double relay_throughput_low_snr(Eigen::Index m, Eigen::Index n_t, Eigen::Index n_r, double gamma1,
                                std::uint64_t k_users);
double relay_throughput_high_snr(Eigen::Index m, Eigen::Index n_t, Eigen::Index n_r, double gamma1,
                                 std::uint64_t k_users);

// Quantized-rate feedback: list spacing v (normalized to the mean capacity)
// and outage target P_0 below 1/2.
struct FeedbackSpec {
  double granularity = 0.0;    // v > 0
  double outage_target = 0.0;  // P_0 in (0, 1/2)
};

// Log-estimate of the feedback length, b = ln((2 sigma / (v mu)) Q^{-1}(P_0)),
// in nats. Very coarse lists make it negative; it is returned as-is with the
// diagnostic flag set, since this is a log-estimate rather than a count.
struct FeedbackBits {
  double nats = 0.0;
  bool negative = false;
};

FeedbackBits feedback_bits(double mu, double sigma, const FeedbackSpec& spec);

// Brute-force oracle for scheduled_throughput: the mean over n_reps
// repetitions of the max of k_users i.i.d. N(mu, sigma^2) draws, one scalar
// stream per repetition.
double scheduled_throughput_oracle(double mu, double sigma, std::uint64_t k_users,
                                   std::uint64_t n_reps, std::uint64_t seed);

}  // namespace mkmimo
