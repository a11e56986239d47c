#include "mkmimo/asymptotics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace mkmimo {
namespace {

void check_snr(double snr) {
  if (!(snr >= 0.0) || !std::isfinite(snr)) {
    throw std::domain_error("snr must be finite and >= 0");
  }
}

void check_psi_lists(const KeyholeGains& gains, const std::vector<double>& psi_t,
                     const std::vector<double>& psi_r) {
  const std::size_t m = static_cast<std::size_t>(gains.count());
  if (psi_t.size() != m || psi_r.size() != m) {
    throw std::invalid_argument("psi lists must have one entry per keyhole");
  }
  for (std::size_t k = 0; k < m; ++k) {
    if (!(psi_t[k] > 0.0 && psi_t[k] <= 1.0) || !(psi_r[k] > 0.0 && psi_r[k] <= 1.0)) {
      throw std::invalid_argument("psi values must lie in (0, 1]");
    }
  }
}

double gain_weight(double power, GainExponent exponent) {
  return exponent == GainExponent::quartic ? power * power : power;
}

// sum_k w_k (Psi_tk + Psi_rk), the quantity under the root of the
// rank-deficient low-SNR forms.
double rdmk_low_snr_psi_sum(const KeyholeGains& gains, const std::vector<double>& psi_t,
                            const std::vector<double>& psi_r, GainExponent exponent) {
  double sum = 0.0;
  for (Eigen::Index k = 0; k < gains.count(); ++k) {
    const double power = std::norm(gains.amplitudes()(k));
    sum += gain_weight(power, exponent) * (psi_t[static_cast<std::size_t>(k)] +
                                           psi_r[static_cast<std::size_t>(k)]);
  }
  return sum;
}

double standard_normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

}  // namespace

double psi_measure(const CorrelationMatrix& r) {
  const double n = static_cast<double>(r.size());
  return r.matrix().squaredNorm() / (n * n);
}

GaussianApprox frmk_moments(const CorrelationMatrix& r_t, const CorrelationMatrix& r_r,
                            double snr, Eigen::Index n_t, Eigen::Index n_r, Regime regime) {
  if (r_t.size() != n_t || r_r.size() != n_r) {
    throw std::invalid_argument("correlation matrix sizes must match n_t and n_r");
  }
  check_snr(snr);
  GaussianApprox approx;
  approx.regime = regime;
  approx.channel_class = ChannelClass::frmk;
  switch (regime) {
    case Regime::exact: {
      const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(r_r.matrix(),
                                                                   Eigen::EigenvaluesOnly);
      double mu = 0.0;
      double mode_sum = 0.0;
      for (Eigen::Index i = 0; i < n_r; ++i) {
        const double x = snr * std::max(solver.eigenvalues()(i), 0.0) / static_cast<double>(n_r);
        mu += std::log1p(x);
        const double ratio = x / (1.0 + x);
        mode_sum += ratio * ratio;
      }
      approx.mu = mu;
      approx.sigma2 = r_t.matrix().squaredNorm() /
                      (static_cast<double>(n_t) * static_cast<double>(n_t)) * mode_sum;
      break;
    }
    case Regime::low_snr:
      approx.mu = snr;
      approx.sigma2 = snr * snr * psi_measure(r_t) * psi_measure(r_r);
      break;
    case Regime::high_snr:
      throw std::invalid_argument("the high-SNR regime is not defined for the full-rank family");
  }
  return approx;
}

GaussianApprox rdmk_moments(const KeyholeGains& gains, const std::vector<double>& psi_t,
                            const std::vector<double>& psi_r, double snr, Regime regime,
                            GainExponent exponent) {
  check_psi_lists(gains, psi_t, psi_r);
  check_snr(snr);
  GaussianApprox approx;
  approx.regime = regime;
  approx.channel_class = ChannelClass::rdmk;
  const Eigen::Index m = gains.count();
  switch (regime) {
    case Regime::exact: {
      double mu = 0.0;
      double sigma2 = 0.0;
      for (Eigen::Index k = 0; k < m; ++k) {
        const double x = std::norm(gains.amplitudes()(k)) * snr;
        mu += std::log1p(x);
        const double ratio = x / (1.0 + x);
        sigma2 += ratio * ratio * (psi_t[static_cast<std::size_t>(k)] +
                                   psi_r[static_cast<std::size_t>(k)]);
      }
      approx.mu = mu;
      approx.sigma2 = sigma2;
      break;
    }
    case Regime::low_snr:
      approx.mu = snr;
      approx.sigma2 = snr * snr * rdmk_low_snr_psi_sum(gains, psi_t, psi_r, exponent);
      break;
    case Regime::high_snr: {
      if (!(snr > 0.0)) {
        throw std::domain_error("the high-SNR regime requires snr > 0");
      }
      double mu = static_cast<double>(m) * std::log(snr);
      double sigma2 = 0.0;
      for (Eigen::Index k = 0; k < m; ++k) {
        const double power = std::norm(gains.amplitudes()(k));
        if (power <= 0.0) {
          throw std::domain_error("zero keyhole gain: ln|a_k|^2 diverges in the high-SNR regime");
        }
        mu += std::log(power);
        sigma2 += psi_t[static_cast<std::size_t>(k)] + psi_r[static_cast<std::size_t>(k)];
      }
      approx.mu = mu;
      approx.sigma2 = sigma2;
      break;
    }
  }
  return approx;
}

OutageQuery OutageQuery::rate(double nats) {
  if (!std::isfinite(nats)) {
    throw std::invalid_argument("rate query must be finite");
  }
  return OutageQuery(Kind::rate, nats);
}

OutageQuery OutageQuery::epsilon(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) {
    throw std::domain_error("epsilon must lie in (0, 1)");
  }
  return OutageQuery(Kind::epsilon, eps);
}

OutageQuery OutageQuery::multiplexing(double fraction) {
  if (!(fraction >= 0.0) || !std::isfinite(fraction)) {
    throw std::invalid_argument("multiplexing fraction must be finite and >= 0");
  }
  return OutageQuery(Kind::multiplexing, fraction);
}

double gaussian_outage_prob(const GaussianApprox& approx, const OutageQuery& query,
                            const OutageContext& context) {
  switch (query.kind()) {
    case OutageQuery::Kind::rate: {
      const double rate = query.value();
      if (approx.sigma2 < 0.0) {
        throw std::domain_error("negative variance in Gaussian approximation");
      }
      if (approx.sigma2 == 0.0) {
        // Degenerate point mass at mu.
        if (rate < approx.mu) {
          return 0.0;
        }
        return rate > approx.mu ? 1.0 : 0.5;
      }
      return q_function((approx.mu - rate) / std::sqrt(approx.sigma2));
    }
    case OutageQuery::Kind::multiplexing: {
      const double r = query.value();
      if (approx.channel_class == ChannelClass::frmk) {
        if (context.n_t < 1 || context.n_r < 1) {
          throw std::invalid_argument("multiplexing query requires n_t and n_r in the context");
        }
        if (!(context.psi_t > 0.0) || !(context.psi_r > 0.0)) {
          throw std::invalid_argument("multiplexing query requires positive psi_t and psi_r");
        }
        const double dof = static_cast<double>(std::min(context.n_t, context.n_r));
        return q_function((1.0 - r / dof) / std::sqrt(context.psi_t * context.psi_r));
      }
      if (!context.gains.has_value()) {
        throw std::invalid_argument("multiplexing query requires keyhole gains in the context");
      }
      const KeyholeGains& gains = *context.gains;
      check_psi_lists(gains, context.psi_t_list, context.psi_r_list);
      const double spread =
          rdmk_low_snr_psi_sum(gains, context.psi_t_list, context.psi_r_list, context.exponent);
      const double dof = static_cast<double>(gains.count());
      return q_function((1.0 - r / dof) / std::sqrt(spread));
    }
    case OutageQuery::Kind::epsilon:
      throw std::invalid_argument("epsilon queries are answered by outage_capacity_eps");
  }
  throw std::logic_error("unreachable outage query kind");
}

OutageCapacity outage_capacity_eps(const GaussianApprox& approx, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) {
    throw std::domain_error("eps must lie in (0, 1)");
  }
  if (approx.sigma2 < 0.0) {
    throw std::domain_error("negative variance in Gaussian approximation");
  }
  const double raw = approx.mu - std::sqrt(approx.sigma2) * q_inverse(eps);
  if (raw < 0.0) {
    return OutageCapacity{0.0, true};
  }
  return OutageCapacity{raw, false};
}

OutageCapacity outage_capacity_low_snr_frmk(double snr, double psi_t, double psi_r, double eps) {
  check_snr(snr);
  if (!(psi_t > 0.0 && psi_t <= 1.0) || !(psi_r > 0.0 && psi_r <= 1.0)) {
    throw std::invalid_argument("psi values must lie in (0, 1]");
  }
  if (!(eps > 0.0 && eps < 1.0)) {
    throw std::domain_error("eps must lie in (0, 1)");
  }
  const double raw = snr * (1.0 - std::sqrt(psi_t * psi_r) * q_inverse(eps));
  if (raw < 0.0) {
    return OutageCapacity{0.0, true};
  }
  return OutageCapacity{raw, false};
}

OutageCapacity outage_capacity_low_snr_rdmk(const KeyholeGains& gains,
                                            const std::vector<double>& psi_t,
                                            const std::vector<double>& psi_r, double snr,
                                            double eps, GainExponent exponent) {
  check_psi_lists(gains, psi_t, psi_r);
  check_snr(snr);
  if (!(eps > 0.0 && eps < 1.0)) {
    throw std::domain_error("eps must lie in (0, 1)");
  }
  const double spread = rdmk_low_snr_psi_sum(gains, psi_t, psi_r, exponent);
  const double raw = snr * (1.0 - std::sqrt(spread) * q_inverse(eps));
  if (raw < 0.0) {
    return OutageCapacity{0.0, true};
  }
  return OutageCapacity{raw, false};
}

double q_function(double x) {
  return 0.5 * std::erfc(x / std::numbers::sqrt2);
}

double q_inverse(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("q_inverse requires p in (0, 1)");
  }
  // Q is strictly decreasing; bisect until the interval stops shrinking.
  double lo = -40.0;
  double hi = 40.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) {
      break;
    }
    if (q_function(mid) > p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  double x = 0.5 * (lo + hi);
  // One Newton polish: Q'(x) = -phi(x).
  const double pdf = standard_normal_pdf(x);
  if (pdf > 0.0) {
    const double step = (q_function(x) - p) / pdf;
    if (std::isfinite(step)) {
      x += step;
    }
  }
  return x;
}

}  // namespace mkmimo
