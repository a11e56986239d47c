#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "mkmimo/asymptotics.hpp"
#include "mkmimo/channel_sampler.hpp"
#include "mkmimo/corr_models.hpp"

namespace mkmimo::cli {

using json = nlohmann::json;

// Schema violation; the message carries a JSON-pointer-style location so the
// offending key is named (e.g. "config error at /params/n_t: required key
// missing").
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& path, const std::string& what)
      : std::runtime_error("config error at " + (path.empty() ? "/" : path) + ": " + what) {}
};

// Parses the file; parse failures surface as ConfigError with the byte
// position nlohmann reports.
json load_config(const std::string& file);

// Object/key plumbing. `path` is the JSON-pointer prefix of `obj`.
const json& require_key(const json& obj, const std::string& path, const std::string& key);
void require_object(const json& v, const std::string& path);
void reject_unknown_keys(const json& obj, const std::string& path,
                         const std::vector<std::string>& allowed);

double get_real(const json& obj, const std::string& path, const std::string& key);
double get_real_or(const json& obj, const std::string& path, const std::string& key,
                   double fallback);
std::int64_t get_index(const json& obj, const std::string& path, const std::string& key);
std::uint64_t get_uint(const json& obj, const std::string& path, const std::string& key);
std::uint64_t get_uint_or(const json& obj, const std::string& path, const std::string& key,
                          std::uint64_t fallback);
std::string get_string(const json& obj, const std::string& path, const std::string& key);

// Scalars and lists.
std::complex<double> parse_complex(const json& v, const std::string& path);
std::vector<std::int64_t> parse_index_list(const json& v, const std::string& path);
std::vector<std::uint64_t> parse_uint_list(const json& v, const std::string& path);
double parse_finite_real(const json& v, const std::string& path);

CorrKind parse_corr_kind(const json& v, const std::string& path);

// Correlation model reference {"kind": ..., "r": ...}, instantiated at a
// size supplied by the channel context (r optional for "identity").
struct CorrModel {
  CorrKind kind = CorrKind::identity;
  std::complex<double> r;

  CorrelationMatrix instantiate(Eigen::Index n, const std::string& path) const;
};

CorrModel parse_corr_model(const json& v, const std::string& path);

// Self-sized correlation object {"kind": ..., "n": ..., "r": ...}.
CorrelationMatrix parse_sized_corr(const json& v, const std::string& path);

// Keyhole gains: {"equal": M} or {"values": [c, ...]} with c a number or an
// [re, im] pair; the power normalization is validated on construction.
KeyholeGains parse_gains(const json& v, const std::string& path);

// Per-keyhole correlation input: a single model object shared by all m
// keyholes, or an array of m model objects; every entry instantiated at n.
std::vector<CorrelationMatrix> parse_corr_list(const json& v, const std::string& path,
                                               Eigen::Index n, Eigen::Index m);

// SNR grid: {"values": [...]} or {"from", "to", "points", "scale"} with
// scale "linear" (default) or "log".
std::vector<double> parse_snr_grid(const json& v, const std::string& path);

// Psi figures: array whose entries are numbers or self-sized correlation
// objects (mapped through the squared-norm measure).
std::vector<double> parse_psi_list(const json& v, const std::string& path);

Regime parse_regime(const json& v, const std::string& path);
GainExponent parse_exponent(const json& v, const std::string& path);

}  // namespace mkmimo::cli
