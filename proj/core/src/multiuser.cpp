#include "mkmimo/multiuser.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "mkmimo/parallel.hpp"
#include "mkmimo/rng.hpp"

namespace mkmimo {
namespace {

double scheduling_gain_factor(std::uint64_t k_users) {
  if (k_users < 1) {
    throw std::invalid_argument("k_users must be >= 1");
  }
  return std::sqrt(2.0 * std::log(static_cast<double>(k_users)));
}

void check_relay_dims(Eigen::Index m, Eigen::Index n_t, Eigen::Index n_r) {
  if (m < 1 || n_t < 1 || n_r < 1) {
    throw std::invalid_argument("m, n_t, and n_r must be >= 1");
  }
}

}  // namespace

ScheduledThroughput scheduled_throughput(double mu, double sigma, std::uint64_t k_users) {
  if (!(sigma >= 0.0)) {
    throw std::invalid_argument("sigma must be >= 0");
  }
  ScheduledThroughput out;
  out.gain = sigma * scheduling_gain_factor(k_users);
  out.total = mu + out.gain;
  return out;
}

ScheduledThroughput relay_throughput(const KeyholeGains& gains, const std::vector<double>& psi_t,
                                     const std::vector<double>& psi_r, double gamma1,
                                     std::uint64_t k_users, Regime regime,
                                     GainExponent exponent) {
  const double gamma0 = gamma1 * static_cast<double>(gains.count());
  const GaussianApprox approx = rdmk_moments(gains, psi_t, psi_r, gamma0, regime, exponent);
  return scheduled_throughput(approx.mu, std::sqrt(approx.sigma2), k_users);
}

double relay_throughput_low_snr(Eigen::Index m, Eigen::Index n_t, Eigen::Index n_r, double gamma1,
                                std::uint64_t k_users) {
  check_relay_dims(m, n_t, n_r);
  const double spread = static_cast<double>(m) *
                        (1.0 / static_cast<double>(n_t) + 1.0 / static_cast<double>(n_r));
  return static_cast<double>(m) * gamma1 +
         gamma1 * std::sqrt(spread) * scheduling_gain_factor(k_users);
}

double relay_throughput_high_snr(Eigen::Index m, Eigen::Index n_t, Eigen::Index n_r, double gamma1,
                                 std::uint64_t k_users) {
  check_relay_dims(m, n_t, n_r);
  if (!(gamma1 > 0.0)) {
    throw std::domain_error("the high-SNR regime requires gamma1 > 0");
  }
  const double spread = static_cast<double>(m) *
                        (1.0 / static_cast<double>(n_t) + 1.0 / static_cast<double>(n_r));
  return static_cast<double>(m) * std::log(gamma1) +
         std::sqrt(spread) * scheduling_gain_factor(k_users);
}

FeedbackBits feedback_bits(double mu, double sigma, const FeedbackSpec& spec) {
  if (!(spec.granularity > 0.0)) {
    throw std::invalid_argument("granularity must be > 0");
  }
  if (!(spec.outage_target > 0.0 && spec.outage_target < 1.0)) {
    throw std::domain_error("outage_target must lie in (0, 1)");
  }
  if (spec.outage_target >= 0.5) {
    throw std::domain_error("outage_target must be below 1/2: Q^{-1} is nonpositive there");
  }
  const double argument =
      2.0 * sigma * q_inverse(spec.outage_target) / (spec.granularity * mu);
  if (!(argument > 0.0) || !std::isfinite(argument)) {
    throw std::domain_error("feedback log argument must be positive and finite");
  }
  FeedbackBits out;
  out.nats = std::log(argument);
  out.negative = out.nats < 0.0;
  return out;
}

double scheduled_throughput_oracle(double mu, double sigma, std::uint64_t k_users,
                                   std::uint64_t n_reps, std::uint64_t seed) {
  if (k_users < 1) {
    throw std::invalid_argument("k_users must be >= 1");
  }
  if (n_reps < 1) {
    throw std::invalid_argument("n_reps must be >= 1");
  }
  if (!(sigma >= 0.0)) {
    throw std::invalid_argument("sigma must be >= 0");
  }
  std::vector<double> maxima(n_reps);
  parallel_for(0, n_reps, [&](std::uint64_t rep) {
    RandomStream stream(seed, rep, stream_tag::scalar);
    double best = -std::numeric_limits<double>::infinity();
    for (std::uint64_t u = 0; u < k_users; ++u) {
      best = std::max(best, mu + sigma * stream.next_gaussian());
    }
    maxima[rep] = best;
  });
  return std::accumulate(maxima.begin(), maxima.end(), 0.0) / static_cast<double>(n_reps);
}

}  // namespace mkmimo
