#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "mkmimo/asymptotics.hpp"

using namespace mkmimo;

namespace {

const CorrelationMatrix kExp2 = make_corr(CorrKind::exponential, 2, 0.5);

}  // namespace

TEST_CASE("q function and inverse") {
  CHECK(q_function(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(q_function(1.0) == doctest::Approx(0.15865525393145707).epsilon(1e-12));
  CHECK(q_function(3.5) == doctest::Approx(0.00023262907903552504).epsilon(1e-12));
  CHECK(q_inverse(0.05) == doctest::Approx(1.6448536269514726).epsilon(1e-10));
  CHECK(q_inverse(0.1) == doctest::Approx(1.2815515655446008).epsilon(1e-10));
  for (double x = -6.0; x <= 6.0; x += 0.37) {
    CHECK(q_inverse(q_function(x)) == doctest::Approx(x).epsilon(1e-9));
  }
  CHECK_THROWS_AS(q_inverse(0.0), std::domain_error);
  CHECK_THROWS_AS(q_inverse(1.0), std::domain_error);
}

TEST_CASE("psi measure") {
  CHECK(psi_measure(make_corr(CorrKind::identity, 8, 0.0)) ==
        doctest::Approx(0.125).epsilon(1e-15));
  CHECK(psi_measure(kExp2) == doctest::Approx(0.625).epsilon(1e-15));
}

TEST_CASE("full-rank moments") {
  const GaussianApprox exact = frmk_moments(kExp2, kExp2, 10.0, 2, 2, Regime::exact);
  CHECK(exact.mu == doctest::Approx(3.392829131991639).epsilon(1e-12));
  CHECK(exact.sigma2 == doctest::Approx(0.8054692465221382).epsilon(1e-12));
  CHECK(exact.channel_class == ChannelClass::frmk);

  const GaussianApprox low = frmk_moments(kExp2, kExp2, 0.01, 2, 2, Regime::low_snr);
  CHECK(low.mu == doctest::Approx(0.01).epsilon(1e-15));
  CHECK(low.sigma2 == doctest::Approx(0.01 * 0.01 * 0.625 * 0.625).epsilon(1e-12));

  CHECK_THROWS_AS(frmk_moments(kExp2, kExp2, 10.0, 2, 2, Regime::high_snr),
                  std::invalid_argument);
  CHECK_THROWS_AS(frmk_moments(kExp2, kExp2, 10.0, 3, 2, Regime::exact), std::invalid_argument);
  CHECK_THROWS_AS(frmk_moments(kExp2, kExp2, -1.0, 2, 2, Regime::exact), std::domain_error);
}

TEST_CASE("rank-deficient moments") {
  const KeyholeGains gains = KeyholeGains::equal(2);
  const std::vector<double> psi_t{0.5, 0.5}, psi_r{0.5, 0.5};

  const GaussianApprox exact = rdmk_moments(gains, psi_t, psi_r, 10.0, Regime::exact);
  CHECK(exact.mu == doctest::Approx(3.58351893845611).epsilon(1e-12));
  CHECK(exact.sigma2 == doctest::Approx(1.388888888888889).epsilon(1e-12));
  CHECK(exact.channel_class == ChannelClass::rdmk);

  const GaussianApprox low_q =
      rdmk_moments(gains, psi_t, psi_r, 0.1, Regime::low_snr, GainExponent::quartic);
  const GaussianApprox low_p =
      rdmk_moments(gains, psi_t, psi_r, 0.1, Regime::low_snr, GainExponent::as_printed);
  CHECK(low_q.mu == doctest::Approx(0.1).epsilon(1e-15));
  // |a|^4 halves the variance relative to |a|^2 for two equal gains.
  CHECK(low_p.sigma2 == doctest::Approx(2.0 * low_q.sigma2).epsilon(1e-12));
  CHECK(low_q.sigma2 == doctest::Approx(0.01 * 0.5).epsilon(1e-12));

  const GaussianApprox high = rdmk_moments(gains, psi_t, psi_r, 100.0, Regime::high_snr);
  CHECK(high.mu == doctest::Approx(2.0 * std::log(50.0)).epsilon(1e-12));
  CHECK(high.sigma2 == doctest::Approx(2.0).epsilon(1e-12));

  CHECK_THROWS_AS(rdmk_moments(gains, psi_t, psi_r, 0.0, Regime::high_snr), std::domain_error);
  Eigen::VectorXcd with_zero(2);
  with_zero << 1.0, 0.0;
  CHECK_THROWS_AS(rdmk_moments(KeyholeGains(with_zero), psi_t, psi_r, 10.0, Regime::high_snr),
                  std::domain_error);
  CHECK_THROWS_AS(rdmk_moments(gains, {0.5}, psi_r, 10.0, Regime::exact), std::invalid_argument);
  CHECK_THROWS_AS(rdmk_moments(gains, {0.5, 1.5}, psi_r, 10.0, Regime::exact),
                  std::invalid_argument);
}

TEST_CASE("outage probability queries") {
  GaussianApprox approx;
  approx.mu = 2.0;
  approx.sigma2 = 0.25;
  OutageContext context;

  CHECK(gaussian_outage_prob(approx, OutageQuery::rate(2.0), context) ==
        doctest::Approx(0.5).epsilon(1e-12));
  CHECK(gaussian_outage_prob(approx, OutageQuery::rate(1.5), context) ==
        doctest::Approx(0.15865525393145707).epsilon(1e-10));

  GaussianApprox point = approx;
  point.sigma2 = 0.0;
  CHECK(gaussian_outage_prob(point, OutageQuery::rate(1.0), context) == 0.0);
  CHECK(gaussian_outage_prob(point, OutageQuery::rate(3.0), context) == 1.0);
  CHECK(gaussian_outage_prob(point, OutageQuery::rate(2.0), context) == 0.5);

  // Full-rank multiplexing form.
  approx.channel_class = ChannelClass::frmk;
  context.n_t = 4;
  context.n_r = 4;
  context.psi_t = 0.25;
  context.psi_r = 0.25;
  CHECK(gaussian_outage_prob(approx, OutageQuery::multiplexing(0.5), context) ==
        doctest::Approx(0.00023262907903552504).epsilon(1e-10));

  // Rank-deficient multiplexing form with quartic weights.
  GaussianApprox rd = approx;
  rd.channel_class = ChannelClass::rdmk;
  OutageContext rd_context;
  rd_context.gains = KeyholeGains::equal(2);
  rd_context.psi_t_list = {0.5, 0.5};
  rd_context.psi_r_list = {0.5, 0.5};
  const double spread = 2.0 * 0.25 * 1.0;  // sum |a|^4 (psi_t + psi_r)
  const double expected = q_function((1.0 - 0.5 / 2.0) / std::sqrt(spread));
  CHECK(gaussian_outage_prob(rd, OutageQuery::multiplexing(0.5), rd_context) ==
        doctest::Approx(expected).epsilon(1e-12));

  CHECK_THROWS_AS(gaussian_outage_prob(approx, OutageQuery::epsilon(0.1), context),
                  std::invalid_argument);
  CHECK_THROWS_AS(OutageQuery::epsilon(0.0), std::domain_error);
  CHECK_THROWS_AS(OutageQuery::epsilon(1.0), std::domain_error);
}

TEST_CASE("outage capacity and closed forms") {
  GaussianApprox approx;
  approx.mu = 2.0;
  approx.sigma2 = 0.25;
  const OutageCapacity c = outage_capacity_eps(approx, 0.1);
  CHECK(c.nats == doctest::Approx(1.3592242172276996).epsilon(1e-10));
  CHECK_FALSE(c.floored);

  GaussianApprox tiny;
  tiny.mu = 0.1;
  tiny.sigma2 = 1.0;
  const OutageCapacity floored = outage_capacity_eps(tiny, 0.1);
  CHECK(floored.nats == 0.0);
  CHECK(floored.floored);

  // The low-SNR closed forms coincide with outage_capacity_eps applied to the
  // low-SNR moments.
  const GaussianApprox low = frmk_moments(kExp2, kExp2, 0.05, 2, 2, Regime::low_snr);
  const OutageCapacity via_moments = outage_capacity_eps(low, 0.2);
  const OutageCapacity closed = outage_capacity_low_snr_frmk(0.05, 0.625, 0.625, 0.2);
  CHECK(closed.nats == doctest::Approx(via_moments.nats).epsilon(1e-12));

  const KeyholeGains gains = KeyholeGains::equal(2);
  const std::vector<double> psi{0.5, 0.5};
  const GaussianApprox rd_low = rdmk_moments(gains, psi, psi, 0.05, Regime::low_snr);
  const OutageCapacity rd_via = outage_capacity_eps(rd_low, 0.2);
  const OutageCapacity rd_closed = outage_capacity_low_snr_rdmk(gains, psi, psi, 0.05, 0.2);
  CHECK(rd_closed.nats == doctest::Approx(rd_via.nats).epsilon(1e-12));

  CHECK_THROWS_AS(outage_capacity_eps(approx, 0.0), std::domain_error);
  CHECK_THROWS_AS(outage_capacity_low_snr_frmk(0.05, 0.0, 0.5, 0.1), std::invalid_argument);
}
