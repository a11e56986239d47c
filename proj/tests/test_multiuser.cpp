#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "mkmimo/multiuser.hpp"

using namespace mkmimo;

TEST_CASE("scheduled throughput closed form") {
  const ScheduledThroughput one = scheduled_throughput(2.0, 0.5, 1);
  CHECK(one.total == 2.0);
  CHECK(one.gain == 0.0);

  const ScheduledThroughput many = scheduled_throughput(2.0, 0.5, 100);
  CHECK(many.total == doctest::Approx(3.5174271293851467).epsilon(1e-15));
  CHECK(many.gain == doctest::Approx(1.5174271293851465).epsilon(1e-15));

  CHECK_THROWS_AS(scheduled_throughput(2.0, -0.1, 10), std::invalid_argument);
  CHECK_THROWS_AS(scheduled_throughput(2.0, 0.5, 0), std::invalid_argument);
}

TEST_CASE("scheduling formula sharpens with the user count") {
  // The extreme-value term is the leading asymptotic in K, so its relative
  // error against a brute-force max-of-K oracle shrinks as K grows.
  const double mu = 2.0;
  const double sigma = 0.5;
  const double oracle_small = scheduled_throughput_oracle(mu, sigma, 100, 500, 77);
  const double oracle_large = scheduled_throughput_oracle(mu, sigma, 10000, 500, 77);
  const double err_small =
      std::abs(scheduled_throughput(mu, sigma, 100).total - oracle_small) / oracle_small;
  const double err_large =
      std::abs(scheduled_throughput(mu, sigma, 10000).total - oracle_large) / oracle_large;
  CHECK(err_large < err_small);
  CHECK(err_small < 0.15);

  // Deterministic in (seed, n_reps).
  CHECK(scheduled_throughput_oracle(mu, sigma, 100, 500, 77) == oracle_small);
}

TEST_CASE("relay network throughput") {
  const Eigen::Index m = 4;
  const Eigen::Index n_t = 2;
  const Eigen::Index n_r = 4;
  const std::vector<double> psi_t(m, 1.0 / static_cast<double>(n_t));
  const std::vector<double> psi_r(m, 1.0 / static_cast<double>(n_r));
  const KeyholeGains gains = KeyholeGains::equal(m);

  // Single user, exact regime: the mean capacity of M parallel pipes.
  const ScheduledThroughput single =
      relay_throughput(gains, psi_t, psi_r, 0.7, 1, Regime::exact);
  CHECK(single.total == doctest::Approx(4.0 * std::log1p(0.7)).epsilon(1e-14));
  CHECK(single.gain == 0.0);

  // Regime closed forms match the generic path exactly.
  const double gamma1 = 1e-3;
  const ScheduledThroughput low =
      relay_throughput(gains, psi_t, psi_r, gamma1, 50, Regime::low_snr);
  CHECK(low.total == doctest::Approx(relay_throughput_low_snr(m, n_t, n_r, gamma1, 50))
                         .epsilon(1e-12));
  const ScheduledThroughput high =
      relay_throughput(gains, psi_t, psi_r, 2.0, 50, Regime::high_snr);
  CHECK(high.total == doctest::Approx(relay_throughput_high_snr(m, n_t, n_r, 2.0, 50))
                          .epsilon(1e-12));

  CHECK_THROWS_AS(relay_throughput_high_snr(m, n_t, n_r, 0.0, 50), std::domain_error);
}

TEST_CASE("relay throughput monotonicity") {
  const KeyholeGains gains = KeyholeGains::equal(2);

  // More antennas concentrate the capacity: the scheduling gain fades.
  double prev = relay_throughput(gains, {0.5, 0.5}, {0.5, 0.5}, 1.0, 10, Regime::exact).total;
  for (double n : {4.0, 8.0, 16.0}) {
    const std::vector<double> psi(2, 1.0 / n);
    const double cur = relay_throughput(gains, psi, psi, 1.0, 10, Regime::exact).total;
    CHECK(cur < prev);
    prev = cur;
  }

  // Stronger correlation widens the distribution and helps the scheduler.
  prev = 0.0;
  for (double psi_val : {0.1, 0.3, 0.5, 1.0}) {
    const std::vector<double> psi(2, psi_val);
    const double cur = relay_throughput(gains, psi, psi, 1.0, 10, Regime::exact).total;
    CHECK(cur > prev);
    prev = cur;
  }
}

TEST_CASE("feedback length estimate") {
  // Spacing chosen to land exactly on the break-even point b = 0.
  const double v0 = 2.0 * 0.1 * q_inverse(0.01);
  const FeedbackBits zero = feedback_bits(1.0, 0.1, {v0, 0.01});
  CHECK(zero.nats == 0.0);
  CHECK_FALSE(zero.negative);

  const FeedbackBits ref = feedback_bits(1.0, 0.1, {0.05, 0.01});
  CHECK(ref.nats == doctest::Approx(2.2305939629505).epsilon(1e-12));
  CHECK_FALSE(ref.negative);

  // Very coarse lists drive the log-estimate negative; flagged, not clamped.
  const FeedbackBits coarse = feedback_bits(1.0, 0.1, {10.0, 0.01});
  CHECK(coarse.nats < 0.0);
  CHECK(coarse.negative);

  // Finer lists cost more; stricter outage targets cost more.
  double prev = std::numeric_limits<double>::infinity();
  for (double v : {0.01, 0.02, 0.05, 0.1}) {
    const double cur = feedback_bits(1.0, 0.1, {v, 0.01}).nats;
    CHECK(cur < prev);
    prev = cur;
  }
  prev = -std::numeric_limits<double>::infinity();
  for (double p0 : {0.2, 0.1, 0.01, 0.001}) {
    // Walked from loose to strict targets: cost rises as p0 falls.
    const double cur = feedback_bits(1.0, 0.1, {0.05, p0}).nats;
    CHECK(cur > prev);
    prev = cur;
  }

  CHECK_THROWS_AS(feedback_bits(1.0, 0.1, {0.05, 0.5}), std::domain_error);
  CHECK_THROWS_AS(feedback_bits(1.0, 0.1, {0.05, 0.7}), std::domain_error);
  CHECK_THROWS_AS(feedback_bits(1.0, 0.1, {0.05, 0.0}), std::domain_error);
  CHECK_THROWS_AS(feedback_bits(1.0, 0.1, {0.0, 0.01}), std::invalid_argument);
  CHECK_THROWS_AS(feedback_bits(1.0, 0.1, {-0.1, 0.01}), std::invalid_argument);
  CHECK_THROWS_AS(feedback_bits(0.0, 0.1, {0.05, 0.01}), std::domain_error);
  CHECK_THROWS_AS(feedback_bits(1.0, 0.0, {0.05, 0.01}), std::domain_error);
}
