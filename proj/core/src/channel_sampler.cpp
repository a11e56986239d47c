#include "mkmimo/channel_sampler.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace mkmimo {
namespace {

void fill_cgaussian(Eigen::Ref<Eigen::VectorXcd> out, RandomStream& stream) {
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    out(i) = stream.next_cgaussian();
  }
}

// Dedupe correlation roots: many specs share one matrix across keyholes.
void build_roots(const std::vector<CorrelationMatrix>& corr, std::vector<Eigen::MatrixXcd>& roots,
                 std::vector<std::size_t>& root_of, std::vector<bool>& is_identity) {
  std::vector<const Eigen::MatrixXcd*> distinct;
  root_of.reserve(corr.size());
  for (const CorrelationMatrix& c : corr) {
    std::size_t idx = distinct.size();
    for (std::size_t j = 0; j < distinct.size(); ++j) {
      if (distinct[j]->rows() == c.matrix().rows() &&
          (distinct[j]->array() == c.matrix().array()).all()) {
        idx = j;
        break;
      }
    }
    if (idx == distinct.size()) {
      distinct.push_back(&c.matrix());
    }
    root_of.push_back(idx);
  }
  roots.reserve(distinct.size());
  is_identity.reserve(distinct.size());
  for (const Eigen::MatrixXcd* m : distinct) {
    const bool identity = m->isIdentity(0.0);
    is_identity.push_back(identity);
    roots.push_back(identity ? *m : hermitian_psd_sqrt(*m));
  }
}

}  // namespace

KeyholeGains::KeyholeGains(Eigen::VectorXcd a) : a_(std::move(a)) {
  if (a_.size() == 0) {
    throw std::invalid_argument("keyhole gains must be non-empty");
  }
  const double power = a_.squaredNorm();
  if (!(std::abs(power - 1.0) <= 1e-9)) {
    throw std::invalid_argument("keyhole gain power sum " + std::to_string(power) +
                                " deviates from 1");
  }
}

KeyholeGains::KeyholeGains(Eigen::VectorXcd a, Unchecked) : a_(std::move(a)) {}

KeyholeGains KeyholeGains::equal(Eigen::Index m) {
  if (m <= 0) {
    throw std::invalid_argument("keyhole count must be >= 1");
  }
  return KeyholeGains(Eigen::VectorXcd::Constant(m, 1.0 / std::sqrt(static_cast<double>(m))));
}

KeyholeGains KeyholeGains::unchecked(Eigen::VectorXcd a) {
  return KeyholeGains(std::move(a), Unchecked{});
}

void validate_spec(const ChannelSpec& spec) {
  if (spec.n_t <= 0 || spec.n_r <= 0) {
    throw std::invalid_argument("channel spec requires n_t >= 1 and n_r >= 1");
  }
  const std::size_t m = static_cast<std::size_t>(spec.gains.count());
  if (spec.tx_corr.size() != m || spec.rx_corr.size() != m) {
    throw std::invalid_argument("channel spec requires one Tx and one Rx correlation matrix per keyhole");
  }
  for (std::size_t k = 0; k < m; ++k) {
    if (spec.tx_corr[k].size() != spec.n_t) {
      throw std::invalid_argument("tx_corr[" + std::to_string(k) + "] size does not match n_t");
    }
    if (spec.rx_corr[k].size() != spec.n_r) {
      throw std::invalid_argument("rx_corr[" + std::to_string(k) + "] size does not match n_r");
    }
  }
  if (!(spec.snr >= 0.0) || !std::isfinite(spec.snr)) {
    throw std::invalid_argument("channel spec requires finite snr >= 0");
  }
}

ChannelSpec make_shared_corr_spec(Eigen::Index n_t, Eigen::Index n_r, const KeyholeGains& gains,
                                  const CorrelationMatrix& tx, const CorrelationMatrix& rx,
                                  double snr) {
  const std::size_t m = static_cast<std::size_t>(gains.count());
  ChannelSpec spec{n_t, n_r, gains, std::vector<CorrelationMatrix>(m, tx),
                   std::vector<CorrelationMatrix>(m, rx), snr};
  validate_spec(spec);
  return spec;
}

KeyholeSampler::KeyholeSampler(ChannelSpec spec) : spec_(std::move(spec)) {
  validate_spec(spec_);
  build_roots(spec_.tx_corr, tx_roots_, tx_root_of_, tx_root_identity_);
  build_roots(spec_.rx_corr, rx_roots_, rx_root_of_, rx_root_identity_);
}

KeyholeSampler::Factors KeyholeSampler::sample_factors(std::uint64_t seed,
                                                       std::uint64_t trial) const {
  const Eigen::Index m = spec_.gains.count();
  Factors f{Eigen::MatrixXcd(spec_.n_t, m), Eigen::MatrixXcd(spec_.n_r, m)};
  Eigen::VectorXcd g(std::max(spec_.n_t, spec_.n_r));
  for (Eigen::Index k = 0; k < m; ++k) {
    const std::uint32_t kk = static_cast<std::uint32_t>(k);
    RandomStream tx_stream(seed, trial, stream_tag::tx_keyhole + kk);
    fill_cgaussian(g.head(spec_.n_t), tx_stream);
    const std::size_t ti = tx_root_of_[static_cast<std::size_t>(k)];
    if (tx_root_identity_[ti]) {
      f.h_t.col(k) = g.head(spec_.n_t);
    } else {
      f.h_t.col(k).noalias() = tx_roots_[ti] * g.head(spec_.n_t);
    }
    RandomStream rx_stream(seed, trial, stream_tag::rx_keyhole + kk);
    fill_cgaussian(g.head(spec_.n_r), rx_stream);
    const std::size_t ri = rx_root_of_[static_cast<std::size_t>(k)];
    if (rx_root_identity_[ri]) {
      f.h_r.col(k) = g.head(spec_.n_r);
    } else {
      f.h_r.col(k).noalias() = rx_roots_[ri] * g.head(spec_.n_r);
    }
  }
  return f;
}

ChannelMatrix KeyholeSampler::sample(std::uint64_t seed, std::uint64_t trial) const {
  const Factors f = sample_factors(seed, trial);
  return (f.h_r * spec_.gains.amplitudes().asDiagonal()) * f.h_t.adjoint();
}

ChannelMatrix sample_keyhole(const ChannelSpec& spec, std::uint64_t seed, std::uint64_t trial) {
  return KeyholeSampler(spec).sample(seed, trial);
}

RayleighSampler::RayleighSampler(const CorrelationMatrix& r_t, const CorrelationMatrix& r_r)
    : tx_root_(hermitian_psd_sqrt(r_t.matrix())), rx_root_(hermitian_psd_sqrt(r_r.matrix())) {}

ChannelMatrix RayleighSampler::sample(std::uint64_t seed, std::uint64_t trial) const {
  Eigen::MatrixXcd x(n_r(), n_t());
  RandomStream stream(seed, trial, stream_tag::iid_matrix);
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    fill_cgaussian(x.col(j), stream);
  }
  return rx_root_ * x * tx_root_;
}

ChannelMatrix sample_rayleigh(const CorrelationMatrix& r_t, const CorrelationMatrix& r_r,
                              std::uint64_t seed, std::uint64_t trial) {
  return RayleighSampler(r_t, r_r).sample(seed, trial);
}

ChannelMatrix sample_keyhole_wishart(Eigen::Index n_t, Eigen::Index n_r, Eigen::Index m,
                                     const Eigen::MatrixXcd& tx_root,
                                     const Eigen::MatrixXcd& rx_root, std::uint64_t seed,
                                     std::uint64_t trial) {
  if (n_t <= 0 || n_r <= 0 || m < n_t) {
    throw std::invalid_argument("sample_keyhole_wishart requires n_t >= 1, n_r >= 1 and M >= n_t");
  }
  if (tx_root.rows() != n_t || tx_root.cols() != n_t || rx_root.rows() != n_r ||
      rx_root.cols() != n_r) {
    throw std::invalid_argument("sample_keyhole_wishart correlation roots have wrong size");
  }

  // Bartlett factor of the complex Wishart(M, I_{n_t}): column j carries a
  // sqrt(Gamma(M - j, 1)) diagonal entry and CN(0,1) sub-diagonal entries.
  Eigen::MatrixXcd l = Eigen::MatrixXcd::Zero(n_t, n_t);
  RandomStream diag_stream(seed, trial, stream_tag::wishart_diag);
  RandomStream lower_stream(seed, trial, stream_tag::wishart_lower);
  for (Eigen::Index j = 0; j < n_t; ++j) {
    l(j, j) = std::sqrt(diag_stream.next_gamma(static_cast<double>(m - j)));
    for (Eigen::Index i = j + 1; i < n_t; ++i) {
      l(i, j) = lower_stream.next_cgaussian();
    }
  }

  Eigen::MatrixXcd z(n_r, n_t);
  RandomStream iid_stream(seed, trial, stream_tag::wishart_iid);
  for (Eigen::Index j = 0; j < n_t; ++j) {
    fill_cgaussian(z.col(j), iid_stream);
  }

  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  Eigen::MatrixXcd x = z * l.adjoint() * scale;
  return rx_root * x * tx_root;
}

}  // namespace mkmimo
