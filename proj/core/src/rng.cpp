#include "mkmimo/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mkmimo {
namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(product >> 32);
  lo = static_cast<std::uint32_t>(product);
}

}  // namespace

Philox4x32Ctr philox4x32(Philox4x32Ctr ctr, Philox4x32Key key) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t trial, std::uint32_t tag)
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
      tag_(tag),
      trial_(trial) {}

std::uint64_t RandomStream::next_u64() {
  if (has_pending_u64_) {
    has_pending_u64_ = false;
    return pending_u64_;
  }
  if (block_ >> 32) {
    throw std::length_error("random stream exhausted (2^32 blocks consumed)");
  }
  const Philox4x32Ctr out = philox4x32({static_cast<std::uint32_t>(block_), tag_,
                                        static_cast<std::uint32_t>(trial_),
                                        static_cast<std::uint32_t>(trial_ >> 32)},
                                       key_);
  ++block_;
  pending_u64_ = (static_cast<std::uint64_t>(out[3]) << 32) | out[2];
  has_pending_u64_ = true;
  return (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
}

double RandomStream::next_uniform() {
  // 53 random bits; +1 shifts the range from [0, 1) to (0, 1].
  return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double RandomStream::next_gaussian() {
  if (has_pending_gaussian_) {
    has_pending_gaussian_ = false;
    return pending_gaussian_;
  }
  const double u1 = next_uniform();
  const double u2 = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;  // [0, 1)
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  pending_gaussian_ = radius * std::sin(angle);
  has_pending_gaussian_ = true;
  return radius * std::cos(angle);
}

std::complex<double> RandomStream::next_cgaussian() {
  const double re = next_gaussian();
  const double im = next_gaussian();
  // Scale so that E|z|^2 = 1 (real/imaginary parts each N(0, 1/2)).
  return {re * std::numbers::sqrt2 / 2.0, im * std::numbers::sqrt2 / 2.0};
}

double RandomStream::next_gamma(double shape) {
  if (!(shape >= 1.0)) {
    throw std::invalid_argument("next_gamma requires shape >= 1");
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = next_gaussian();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = next_uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) {
      return d * v;
    }
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) {
      return d * v;
    }
  }
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + (salt + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace mkmimo
