#include "mkmimo/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <stdexcept>
#include <utility>

#include "mkmimo/parallel.hpp"

namespace mkmimo {
namespace {

// sum_i ln(1 + scale * lambda_i) over the eigenvalues of the Hermitian part
// of gram, with tiny negative eigenvalues (rounding noise) clamped to zero.
double log_det_capacity(const Eigen::MatrixXcd& gram, double scale) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(gram, Eigen::EigenvaluesOnly);
  double nats = 0.0;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    nats += std::log1p(scale * std::max(solver.eigenvalues()(i), 0.0));
  }
  return nats;
}

// Gram matrix on the smaller side of a (possibly rectangular) factor.
Eigen::MatrixXcd smaller_gram(const Eigen::MatrixXcd& g) {
  if (g.rows() <= g.cols()) {
    return g * g.adjoint();
  }
  return g.adjoint() * g;
}

void check_snr(double snr) {
  if (!(snr >= 0.0) || !std::isfinite(snr)) {
    throw std::domain_error("snr must be finite and >= 0");
  }
}

class Fnv1a {
 public:
  void bytes(const void* data, std::size_t size) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < size; ++i) {
      hash_ ^= p[i];
      hash_ *= 1099511628211ULL;
    }
  }
  void push(double v) { bytes(&v, sizeof v); }
  void push(std::uint64_t v) { bytes(&v, sizeof v); }
  void push(const Eigen::MatrixXcd& m) {
    push(static_cast<std::uint64_t>(m.rows()));
    push(static_cast<std::uint64_t>(m.cols()));
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      for (Eigen::Index i = 0; i < m.rows(); ++i) {
        push(m(i, j).real());
        push(m(i, j).imag());
      }
    }
  }
  std::string hex() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash_));
    return buf;
  }

 private:
  std::uint64_t hash_ = 1469598103934665603ULL;
};

}  // namespace

double instantaneous_capacity(const ChannelMatrix& h, double snr) {
  if (h.rows() == 0 || h.cols() == 0) {
    throw std::invalid_argument("instantaneous_capacity requires a non-empty channel matrix");
  }
  if (!h.allFinite()) {
    throw std::domain_error("channel matrix has non-finite entries");
  }
  check_snr(snr);
  const double scale = snr / (static_cast<double>(h.rows()) * static_cast<double>(h.cols()));
  return log_det_capacity(smaller_gram(h), scale);
}

double keyhole_capacity_factored(const Eigen::MatrixXcd& h_t, const Eigen::MatrixXcd& h_r,
                                 const KeyholeGains& gains, double snr) {
  return keyhole_capacity_tx_covariance(
      h_t, h_r, gains, Eigen::MatrixXcd::Identity(h_t.rows(), h_t.rows()), snr);
}

double keyhole_capacity_tx_covariance(const Eigen::MatrixXcd& h_t, const Eigen::MatrixXcd& h_r,
                                      const KeyholeGains& gains, const Eigen::MatrixXcd& q,
                                      double snr) {
  const Eigen::Index m = gains.count();
  if (h_t.cols() != m || h_r.cols() != m) {
    throw std::invalid_argument("factor matrices must have one column per keyhole");
  }
  if (h_t.rows() == 0 || h_r.rows() == 0) {
    throw std::invalid_argument("factor matrices must be non-empty");
  }
  if (q.rows() != h_t.rows() || q.cols() != h_t.rows()) {
    throw std::invalid_argument("Tx covariance size does not match n_t");
  }
  check_snr(snr);
  const double n_t = static_cast<double>(h_t.rows());
  const double n_r = static_cast<double>(h_r.rows());

  const Eigen::MatrixXcd b_t = (h_t.adjoint() * q * h_t) / n_t;
  const Eigen::MatrixXcd b_r = (h_r.adjoint() * h_r) / n_r;
  const Eigen::VectorXcd& a = gains.amplitudes();
  // (A B_t A^H)(i,j) = a_i B_t(i,j) conj(a_j)
  const Eigen::MatrixXcd abta = b_t.cwiseProduct(a * a.adjoint());
  const Eigen::MatrixXcd s = hermitian_psd_sqrt(b_r);
  return log_det_capacity(s * abta * s, snr);
}

double equivalent_rayleigh_capacity(const Eigen::MatrixXcd& h_r, const Eigen::MatrixXcd& q,
                                    double snr, Eigen::Index n_r) {
  if (h_r.rows() == 0 || h_r.cols() == 0) {
    throw std::invalid_argument("equivalent_rayleigh_capacity requires a non-empty Rx factor");
  }
  if (n_r != h_r.rows()) {
    throw std::invalid_argument("n_r does not match the Rx factor row count");
  }
  if (q.rows() != h_r.cols() || q.cols() != h_r.cols()) {
    throw std::invalid_argument("Tx covariance size does not match the keyhole count");
  }
  check_snr(snr);
  const Eigen::MatrixXcd q_root = hermitian_psd_sqrt(q);  // throws when q is not PSD
  return log_det_capacity(smaller_gram(h_r * q_root), snr / static_cast<double>(n_r));
}

EmpiricalCdf::EmpiricalCdf(std::vector<double> samples) : values_(std::move(samples)) {
  if (values_.empty()) {
    throw std::invalid_argument("empirical CDF requires at least one sample");
  }
  for (const double v : values_) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("empirical CDF samples must be finite");
    }
  }
  std::sort(values_.begin(), values_.end());
}

double EmpiricalCdf::operator()(double x) const {
  const auto it = std::upper_bound(values_.begin(), values_.end(), x);
  return static_cast<double>(it - values_.begin()) / static_cast<double>(values_.size());
}

CapacitySamples monte_carlo_capacity(const ChannelSpec& spec, std::uint64_t n_trials,
                                     std::uint64_t seed) {
  if (n_trials < 1) {
    throw std::invalid_argument("monte_carlo_capacity requires n_trials >= 1");
  }
  const KeyholeSampler sampler(spec);
  // Pure function of the spec, so results do not depend on the caller: the
  // factored path avoids assembling H when the keyhole side is smaller.
  const bool factored = spec.gains.count() < std::min(spec.n_t, spec.n_r);
  std::vector<double> values(n_trials);
  parallel_for(0, n_trials, [&](std::uint64_t trial) {
    if (factored) {
      const KeyholeSampler::Factors f = sampler.sample_factors(seed, trial);
      values[trial] = keyhole_capacity_factored(f.h_t, f.h_r, spec.gains, spec.snr);
    } else {
      values[trial] = instantaneous_capacity(sampler.sample(seed, trial), spec.snr);
    }
  });
  return CapacitySamples{std::move(values), seed, n_trials, spec_digest(spec)};
}

CapacitySamples monte_carlo_capacity(const RayleighSpec& spec, std::uint64_t n_trials,
                                     std::uint64_t seed) {
  if (n_trials < 1) {
    throw std::invalid_argument("monte_carlo_capacity requires n_trials >= 1");
  }
  const RayleighSampler sampler(spec.r_t, spec.r_r);
  check_snr(spec.snr);
  std::vector<double> values(n_trials);
  parallel_for(0, n_trials, [&](std::uint64_t trial) {
    values[trial] = instantaneous_capacity(sampler.sample(seed, trial), spec.snr);
  });
  return CapacitySamples{std::move(values), seed, n_trials, spec_digest(spec)};
}

EmpiricalCdf monte_carlo_cdf(const ChannelSpec& spec, std::uint64_t n_trials, std::uint64_t seed) {
  return EmpiricalCdf(monte_carlo_capacity(spec, n_trials, seed).values);
}

EmpiricalCdf monte_carlo_cdf(const RayleighSpec& spec, std::uint64_t n_trials, std::uint64_t seed) {
  return EmpiricalCdf(monte_carlo_capacity(spec, n_trials, seed).values);
}

double ks_distance(const EmpiricalCdf& samples, const EmpiricalCdf& reference) {
  const std::vector<double>& x = samples.sorted_values();
  const std::vector<double>& y = reference.sorted_values();
  const double nx = static_cast<double>(x.size());
  const double ny = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double dist = 0.0;
  while (i < x.size() || j < y.size()) {
    double v;
    if (i < x.size() && j < y.size()) {
      v = std::min(x[i], y[j]);
    } else if (i < x.size()) {
      v = x[i];
    } else {
      v = y[j];
    }
    while (i < x.size() && x[i] == v) {
      ++i;
    }
    while (j < y.size() && y[j] == v) {
      ++j;
    }
    dist = std::max(dist, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
  }
  return dist;
}

double ks_distance(const EmpiricalCdf& samples,
                   const std::function<double(double)>& reference_cdf) {
  if (!reference_cdf) {
    throw std::invalid_argument("ks_distance requires a reference CDF");
  }
  const std::vector<double>& x = samples.sorted_values();
  const double n = static_cast<double>(x.size());
  double dist = 0.0;
  std::size_t i = 0;
  while (i < x.size()) {
    std::size_t j = i;
    while (j < x.size() && x[j] == x[i]) {
      ++j;
    }
    const double ref = reference_cdf(x[i]);
    // Compare against the empirical value on both sides of the step.
    dist = std::max(dist, std::abs(static_cast<double>(i) / n - ref));
    dist = std::max(dist, std::abs(static_cast<double>(j) / n - ref));
    i = j;
  }
  return dist;
}

double ks_standard_error(std::size_t n, std::size_t m) {
  if (n == 0 || m == 0) {
    throw std::invalid_argument("ks_standard_error requires non-empty samples");
  }
  const double dn = static_cast<double>(n);
  const double dm = static_cast<double>(m);
  return std::sqrt((dn + dm) / (dn * dm));
}

std::string spec_digest(const ChannelSpec& spec) {
  Fnv1a f;
  f.push(static_cast<std::uint64_t>(0x4b));  // marker: keyhole spec
  f.push(static_cast<std::uint64_t>(spec.n_t));
  f.push(static_cast<std::uint64_t>(spec.n_r));
  f.push(static_cast<std::uint64_t>(spec.gains.count()));
  f.push(spec.snr);
  for (Eigen::Index k = 0; k < spec.gains.count(); ++k) {
    f.push(spec.gains.amplitudes()(k).real());
    f.push(spec.gains.amplitudes()(k).imag());
  }
  for (const CorrelationMatrix& c : spec.tx_corr) {
    f.push(c.matrix());
  }
  for (const CorrelationMatrix& c : spec.rx_corr) {
    f.push(c.matrix());
  }
  return f.hex();
}

std::string spec_digest(const RayleighSpec& spec) {
  Fnv1a f;
  f.push(static_cast<std::uint64_t>(0x52));  // marker: Rayleigh spec
  f.push(spec.snr);
  f.push(spec.r_t.matrix());
  f.push(spec.r_r.matrix());
  return f.hex();
}

}  // namespace mkmimo
