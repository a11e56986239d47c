#pragma once

#include <cstdint>
#include <vector>

#include "mkmimo/corr_models.hpp"
#include "mkmimo/rng.hpp"

namespace mkmimo {

// Complex keyhole amplitude gains a_1..a_M, normalized so that the total
// keyhole power sum |a_1|^2 + ... + |a_M|^2 equals 1 (within 1e-9).
class KeyholeGains {
 public:
  explicit KeyholeGains(Eigen::VectorXcd a);

  // Equal power split: a_k = 1/sqrt(M).
  static KeyholeGains equal(Eigen::Index m);

  // Bypasses the power-sum check (error-path tests only).
  static KeyholeGains unchecked(Eigen::VectorXcd a);

  Eigen::Index count() const { return a_.size(); }
  const Eigen::VectorXcd& amplitudes() const { return a_; }

 private:
  struct Unchecked {};
  KeyholeGains(Eigen::VectorXcd a, Unchecked);

  Eigen::VectorXcd a_;
};

// Full description of one multi-keyhole channel: antenna counts, keyhole
// gains, one Tx and one Rx correlation matrix per keyhole, and the total
// linear Rx SNR (gamma0).
struct ChannelSpec {
  Eigen::Index n_t = 0;
  Eigen::Index n_r = 0;
  KeyholeGains gains;
  std::vector<CorrelationMatrix> tx_corr;  // M entries, each n_t x n_t
  std::vector<CorrelationMatrix> rx_corr;  // M entries, each n_r x n_r
  double snr = 0.0;
};

// Throws std::invalid_argument when list lengths or matrix sizes are
// inconsistent or the SNR is negative/non-finite.
void validate_spec(const ChannelSpec& spec);

// Convenience constructor for the common case of one Tx and one Rx
// correlation matrix shared by all keyholes.
ChannelSpec make_shared_corr_spec(Eigen::Index n_t, Eigen::Index n_r, const KeyholeGains& gains,
                                  const CorrelationMatrix& tx, const CorrelationMatrix& rx,
                                  double snr);

using ChannelMatrix = Eigen::MatrixXcd;

// Draws multi-keyhole channels: H = sum_k a_k h_rk h_tk^H with
// h_tk = R_tk^{1/2} g_tk and h_rk = R_rk^{1/2} g_rk, g i.i.d. CN(0,1).
// Correlation square roots are computed once at construction, so this is the
// form to use inside Monte Carlo loops. Every draw is a pure function of
// (seed, trial): keyhole k consumes the streams tagged tx_keyhole + k and
// rx_keyhole + k, filling each g vector top-down.
class KeyholeSampler {
 public:
  explicit KeyholeSampler(ChannelSpec spec);

  struct Factors {
    Eigen::MatrixXcd h_t;  // n_t x M, column k = h_tk
    Eigen::MatrixXcd h_r;  // n_r x M, column k = h_rk
  };

  Factors sample_factors(std::uint64_t seed, std::uint64_t trial) const;
  ChannelMatrix sample(std::uint64_t seed, std::uint64_t trial) const;

  const ChannelSpec& spec() const { return spec_; }

 private:
  ChannelSpec spec_;
  // Distinct correlation roots plus a per-keyhole index into them, so that
  // specs with thousands of identical keyholes don't store repeated roots.
  std::vector<Eigen::MatrixXcd> tx_roots_, rx_roots_;
  std::vector<std::size_t> tx_root_of_, rx_root_of_;
  std::vector<bool> tx_root_identity_, rx_root_identity_;
};

// One-shot draw (builds the sampler internally; bit-identical to it).
ChannelMatrix sample_keyhole(const ChannelSpec& spec, std::uint64_t seed, std::uint64_t trial);

// Kronecker-correlated Rayleigh channel H = R_r^{1/2} X R_t^{1/2} with X
// i.i.d. CN(0,1), filled column-major from the iid_matrix stream.
class RayleighSampler {
 public:
  RayleighSampler(const CorrelationMatrix& r_t, const CorrelationMatrix& r_r);

  ChannelMatrix sample(std::uint64_t seed, std::uint64_t trial) const;

  Eigen::Index n_t() const { return tx_root_.rows(); }
  Eigen::Index n_r() const { return rx_root_.rows(); }

 private:
  Eigen::MatrixXcd tx_root_, rx_root_;
};

// One-shot draw (builds the sampler internally; bit-identical to it).
ChannelMatrix sample_rayleigh(const CorrelationMatrix& r_t, const CorrelationMatrix& r_r,
                              std::uint64_t seed, std::uint64_t trial);

// Distribution-equivalent fast draw for the special case of equal gains and
// correlation shared across keyholes, requiring M >= n_t. Conditioned on the
// Tx factor G_t, the rows of G_r G_t^H are i.i.d. CN(0, G_t G_t^H), and
// G_t G_t^H is Wishart with M degrees of freedom, so
//   G_r A G_t^H  =d  Z L^H / sqrt(M)
// with L the (complex Bartlett) lower-triangular Wishart factor and Z i.i.d.
// CN(0,1). This replaces the O(M (n_t + n_r)) Gaussian draws of the direct
// sampler with O(n_t^2 + n_t n_r) draws — exact in distribution, not an
// approximation. Draws come from the wishart_* streams.
ChannelMatrix sample_keyhole_wishart(Eigen::Index n_t, Eigen::Index n_r, Eigen::Index m,
                                     const Eigen::MatrixXcd& tx_root,
                                     const Eigen::MatrixXcd& rx_root, std::uint64_t seed,
                                     std::uint64_t trial);

}  // namespace mkmimo
