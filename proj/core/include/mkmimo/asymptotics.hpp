#pragma once

#include <optional>
#include <vector>

#include "mkmimo/channel_sampler.hpp"

namespace mkmimo {

enum class Regime { exact, low_snr, high_snr };
enum class ChannelClass { frmk, rdmk };

// Weight on the keyhole powers inside the low-SNR variance. The quartic
// weight |a_k|^4 follows from expanding the exact-regime variance and is the
// default; the squared weight |a_k|^2 is kept behind this flag for
// compatibility with the legacy printed form.
enum class GainExponent { quartic, as_printed };

// Gaussian approximation N(mu, sigma2) of the capacity distribution, tagged
// with the regime and channel family it was derived for. Units: mu in nats,
// sigma2 in nats^2.
struct GaussianApprox {
  double mu = 0.0;
  double sigma2 = 0.0;
  Regime regime = Regime::exact;
  ChannelClass channel_class = ChannelClass::frmk;
};

// Correlation/imbalance figure Psi = ||R||_F^2 / n^2, in (0, 1].
double psi_measure(const CorrelationMatrix& r);

// Full-rank family moments.
//   exact:   mu = ln det(I + (snr/n_r) R_r),
//            sigma2 = n_t^-2 ||R_t||^2 * sum_k (x_k / (1 + x_k))^2 with
//            x_k = snr * lambda_k(R_r) / n_r;
//   low_snr: mu = snr, sigma2 = snr^2 * Psi_t * Psi_r.
// The high-SNR regime is not defined for this family and throws.
GaussianApprox frmk_moments(const CorrelationMatrix& r_t, const CorrelationMatrix& r_r,
                            double snr, Eigen::Index n_t, Eigen::Index n_r, Regime regime);

// Rank-deficient family moments from per-keyhole gains and Psi figures.
//   exact:    mu = sum_k ln(1 + |a_k|^2 snr),
//             sigma2 = sum_k (|a_k|^2 snr / (1 + |a_k|^2 snr))^2 (Psi_tk + Psi_rk);
//   low_snr:  mu = snr, sigma2 = snr^2 sum_k w_k (Psi_tk + Psi_rk) with
//             w_k = |a_k|^4 (or |a_k|^2 under GainExponent::as_printed);
//   high_snr: mu = M ln snr + sum_k ln |a_k|^2, sigma2 = sum_k (Psi_tk + Psi_rk);
//             throws a domain error on any zero gain or snr <= 0.
GaussianApprox rdmk_moments(const KeyholeGains& gains, const std::vector<double>& psi_t,
                            const std::vector<double>& psi_r, double snr, Regime regime,
                            GainExponent exponent = GainExponent::quartic);

// One of three outage query forms: a target rate in nats, an outage level
// epsilon in (0,1), or a multiplexing fraction r >= 0 (rate expressed as a
// fraction of mean capacity per spatial degree of freedom).
class OutageQuery {
 public:
  enum class Kind { rate, epsilon, multiplexing };

  static OutageQuery rate(double nats);
  static OutageQuery epsilon(double eps);
  static OutageQuery multiplexing(double fraction);

  Kind kind() const { return kind_; }
  double value() const { return value_; }

 private:
  OutageQuery(Kind kind, double value) : kind_(kind), value_(value) {}
  Kind kind_;
  double value_ = 0.0;
};

// Side inputs needed by the normalized multiplexing-fraction forms.
struct OutageContext {
  Eigen::Index n_t = 0;
  Eigen::Index n_r = 0;
  // Full-rank family inputs.
  double psi_t = 0.0;
  double psi_r = 0.0;
  // Rank-deficient family inputs.
  std::optional<KeyholeGains> gains;
  std::vector<double> psi_t_list;
  std::vector<double> psi_r_list;
  GainExponent exponent = GainExponent::quartic;
};

// Outage probability under the Gaussian approximation.
//   rate query:          Q((mu - R) / sigma); degenerate sigma = 0 returns
//                        the point-mass value (0, 1, or 1/2 at R = mu).
//   multiplexing query:  the SNR-free normalized forms
//                        FRMK: Q((1 - r/min(n_t, n_r)) / sqrt(Psi_t Psi_r)),
//                        RDMK: Q((1 - r/M) / sqrt(sum_k w_k (Psi_tk + Psi_rk))).
// Epsilon queries belong to outage_capacity_eps and throw here.
double gaussian_outage_prob(const GaussianApprox& approx, const OutageQuery& query,
                            const OutageContext& context);

// Largest rate with outage probability at most epsilon, floored at zero
// (capacity is nonnegative while the Gaussian approximation is not).
struct OutageCapacity {
  double nats = 0.0;
  bool floored = false;  // set when the raw formula went negative
};

// C_eps = mu - sigma * Qinv(eps); requires eps in (0, 1).
OutageCapacity outage_capacity_eps(const GaussianApprox& approx, double eps);

// Low-SNR closed forms: snr * (1 - sqrt(Psi_t Psi_r) * Qinv(eps)) for the
// full-rank family, and the rank-deficient analogue with
// sum_k w_k (Psi_tk + Psi_rk) under the root.
OutageCapacity outage_capacity_low_snr_frmk(double snr, double psi_t, double psi_r, double eps);
OutageCapacity outage_capacity_low_snr_rdmk(const KeyholeGains& gains,
                                            const std::vector<double>& psi_t,
                                            const std::vector<double>& psi_r, double snr,
                                            double eps,
                                            GainExponent exponent = GainExponent::quartic);

// Right tail of the standard normal and its inverse. q_inverse is a
// monotone bisection refined by one Newton step: |Q(q_inverse(p)) - p| <= 1e-12.
double q_function(double x);
double q_inverse(double p);

}  // namespace mkmimo
