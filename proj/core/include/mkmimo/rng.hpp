#pragma once

#include <array>
#include <complex>
#include <cstdint>

namespace mkmimo {

// Philox4x32-10 counter-based block function (the widely used Random123
// constants). Maps a 128-bit counter and a 64-bit key to 128 pseudo-random
// bits. Because outputs for distinct counters are independent, random
// streams can be split by address instead of by state, which is what makes
// parallel Monte Carlo reproducible regardless of worker count.
using Philox4x32Ctr = std::array<std::uint32_t, 4>;
using Philox4x32Key = std::array<std::uint32_t, 2>;

Philox4x32Ctr philox4x32(Philox4x32Ctr ctr, Philox4x32Key key);

// Stream tags partition the per-trial counter space between consumers.
// Additive tags (e.g. tx_keyhole + k) must stay within their 24-bit range.
namespace stream_tag {
inline constexpr std::uint32_t tx_keyhole = 0x01000000;    // + keyhole index
inline constexpr std::uint32_t rx_keyhole = 0x02000000;    // + keyhole index
inline constexpr std::uint32_t iid_matrix = 0x03000000;
inline constexpr std::uint32_t rx_reference = 0x04000000;  // + keyhole index
inline constexpr std::uint32_t column = 0x05000000;        // + column index
inline constexpr std::uint32_t wishart_diag = 0x06000000;
inline constexpr std::uint32_t wishart_lower = 0x06000001;
inline constexpr std::uint32_t wishart_iid = 0x06000002;
inline constexpr std::uint32_t scalar = 0x07000000;
}  // namespace stream_tag

// A single random stream addressed by (seed, trial, tag). Streams with
// different addresses are statistically independent, and a given address
// always reproduces the same sequence, so Monte Carlo trials can run in any
// order on any number of threads. Draws within one stream are sequential.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t trial, std::uint32_t tag);

  std::uint64_t next_u64();

  // Uniform on (0, 1] — never zero, so logarithms stay finite.
  double next_uniform();

  // Standard normal N(0, 1) via Box-Muller; pairs are cached.
  double next_gaussian();

  // Circular-symmetric complex Gaussian CN(0, 1): E|z|^2 = 1, i.e. real and
  // imaginary parts are independent N(0, 1/2).
  std::complex<double> next_cgaussian();

  // Gamma(shape, 1) via Marsaglia-Tsang squeeze; requires shape >= 1.
  double next_gamma(double shape);

 private:
  Philox4x32Key key_;
  std::uint32_t tag_;
  std::uint64_t trial_;
  std::uint64_t block_ = 0;
  std::uint64_t pending_u64_ = 0;
  double pending_gaussian_ = 0.0;
  bool has_pending_u64_ = false;
  bool has_pending_gaussian_ = false;
};

// Deterministically derives an unrelated sub-seed (splitmix64 finalizer),
// used to give reference simulations seeds independent of the test channel.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt);

}  // namespace mkmimo
