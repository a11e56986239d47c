#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "mkmimo/asymptotics.hpp"

namespace mkmimo::cli {
namespace {

std::string child(const std::string& path, const std::string& key) { return path + "/" + key; }

// Domain failures thrown while *building* a typed value from config input are
// config errors, not numeric ones: the offending value came from the file.
template <typename Fn>
auto lift(const std::string& path, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(path, e.what());
  }
}

}  // namespace

json load_config(const std::string& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ConfigError("", "cannot open config file " + file);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("", e.what());
  }
}

const json& require_key(const json& obj, const std::string& path, const std::string& key) {
  require_object(obj, path);
  const auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError(child(path, key), "required key missing");
  return *it;
}

void require_object(const json& v, const std::string& path) {
  if (!v.is_object()) throw ConfigError(path, "expected an object");
}

void reject_unknown_keys(const json& obj, const std::string& path,
                         const std::vector<std::string>& allowed) {
  require_object(obj, path);
  for (const auto& item : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
      throw ConfigError(child(path, item.key()), "unknown key");
    }
  }
}

double parse_finite_real(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(path, "expected a finite number");
  return x;
}

double get_real(const json& obj, const std::string& path, const std::string& key) {
  return parse_finite_real(require_key(obj, path, key), child(path, key));
}

double get_real_or(const json& obj, const std::string& path, const std::string& key,
                   double fallback) {
  require_object(obj, path);
  if (!obj.contains(key)) return fallback;
  return get_real(obj, path, key);
}

std::int64_t get_index(const json& obj, const std::string& path, const std::string& key) {
  const json& v = require_key(obj, path, key);
  if (!v.is_number_integer()) throw ConfigError(child(path, key), "expected an integer");
  return v.get<std::int64_t>();
}

std::uint64_t get_uint(const json& obj, const std::string& path, const std::string& key) {
  const json& v = require_key(obj, path, key);
  if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
    throw ConfigError(child(path, key), "expected a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

std::uint64_t get_uint_or(const json& obj, const std::string& path, const std::string& key,
                          std::uint64_t fallback) {
  require_object(obj, path);
  if (!obj.contains(key)) return fallback;
  return get_uint(obj, path, key);
}

std::string get_string(const json& obj, const std::string& path, const std::string& key) {
  const json& v = require_key(obj, path, key);
  if (!v.is_string()) throw ConfigError(child(path, key), "expected a string");
  return v.get<std::string>();
}

std::complex<double> parse_complex(const json& v, const std::string& path) {
  if (v.is_number()) return {parse_finite_real(v, path), 0.0};
  if (v.is_array() && v.size() == 2) {
    return {parse_finite_real(v[0], path + "/0"), parse_finite_real(v[1], path + "/1")};
  }
  throw ConfigError(path, "expected a number or an [re, im] pair");
}

std::vector<std::int64_t> parse_index_list(const json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) throw ConfigError(path, "expected a non-empty array");
  std::vector<std::int64_t> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string p = path + "/" + std::to_string(i);
    if (!v[i].is_number_integer()) throw ConfigError(p, "expected an integer");
    out.push_back(v[i].get<std::int64_t>());
  }
  return out;
}

std::vector<std::uint64_t> parse_uint_list(const json& v, const std::string& path) {
  std::vector<std::uint64_t> out;
  for (const std::int64_t x : parse_index_list(v, path)) {
    if (x < 0) throw ConfigError(path, "expected non-negative integers");
    out.push_back(static_cast<std::uint64_t>(x));
  }
  return out;
}

CorrKind parse_corr_kind(const json& v, const std::string& path) {
  if (!v.is_string()) throw ConfigError(path, "expected a string");
  const std::string s = v.get<std::string>();
  if (s == "identity") return CorrKind::identity;
  if (s == "exponential") return CorrKind::exponential;
  if (s == "quadratic_exponential") return CorrKind::quadratic_exponential;
  if (s == "uniform") return CorrKind::uniform;
  throw ConfigError(path, "unknown correlation kind " + s);
}

CorrelationMatrix CorrModel::instantiate(Eigen::Index n, const std::string& path) const {
  return lift(path, [&] { return make_corr(kind, n, r); });
}

CorrModel parse_corr_model(const json& v, const std::string& path) {
  reject_unknown_keys(v, path, {"kind", "r"});
  CorrModel model;
  model.kind = parse_corr_kind(require_key(v, path, "kind"), child(path, "kind"));
  if (v.contains("r")) {
    model.r = parse_complex(v["r"], child(path, "r"));
  } else if (model.kind != CorrKind::identity) {
    throw ConfigError(child(path, "r"), "required key missing");
  }
  return model;
}

CorrelationMatrix parse_sized_corr(const json& v, const std::string& path) {
  reject_unknown_keys(v, path, {"kind", "n", "r"});
  const std::int64_t n = get_index(v, path, "n");
  if (n < 1) throw ConfigError(child(path, "n"), "expected a positive integer");
  CorrModel model;
  model.kind = parse_corr_kind(require_key(v, path, "kind"), child(path, "kind"));
  if (v.contains("r")) {
    model.r = parse_complex(v["r"], child(path, "r"));
  } else if (model.kind != CorrKind::identity) {
    throw ConfigError(child(path, "r"), "required key missing");
  }
  return model.instantiate(n, path);
}

KeyholeGains parse_gains(const json& v, const std::string& path) {
  reject_unknown_keys(v, path, {"equal", "values"});
  const bool has_equal = v.contains("equal");
  const bool has_values = v.contains("values");
  if (has_equal == has_values) {
    throw ConfigError(path, "expected exactly one of \"equal\" and \"values\"");
  }
  if (has_equal) {
    const std::int64_t m = get_index(v, path, "equal");
    return lift(child(path, "equal"), [&] { return KeyholeGains::equal(m); });
  }
  const json& values = v["values"];
  if (!values.is_array() || values.empty()) {
    throw ConfigError(child(path, "values"), "expected a non-empty array");
  }
  Eigen::VectorXcd a(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) {
    a[static_cast<Eigen::Index>(i)] =
        parse_complex(values[i], child(path, "values") + "/" + std::to_string(i));
  }
  return lift(child(path, "values"), [&] { return KeyholeGains(a); });
}

std::vector<CorrelationMatrix> parse_corr_list(const json& v, const std::string& path,
                                               Eigen::Index n, Eigen::Index m) {
  std::vector<CorrelationMatrix> out;
  if (v.is_array()) {
    if (static_cast<Eigen::Index>(v.size()) != m) {
      throw ConfigError(path, "expected one entry per keyhole (" + std::to_string(m) + ")");
    }
    for (std::size_t i = 0; i < v.size(); ++i) {
      const std::string p = path + "/" + std::to_string(i);
      out.push_back(parse_corr_model(v[i], p).instantiate(n, p));
    }
    return out;
  }
  const CorrelationMatrix shared = parse_corr_model(v, path).instantiate(n, path);
  out.assign(static_cast<std::size_t>(m), shared);
  return out;
}

std::vector<double> parse_snr_grid(const json& v, const std::string& path) {
  require_object(v, path);
  if (v.contains("values")) {
    reject_unknown_keys(v, path, {"values"});
    const json& values = v["values"];
    if (!values.is_array() || values.empty()) {
      throw ConfigError(child(path, "values"), "expected a non-empty array");
    }
    std::vector<double> out;
    out.reserve(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
      out.push_back(parse_finite_real(values[i], child(path, "values") + "/" + std::to_string(i)));
    }
    return out;
  }
  reject_unknown_keys(v, path, {"from", "to", "points", "scale"});
  const double from = get_real(v, path, "from");
  const double to = get_real(v, path, "to");
  const std::uint64_t points = get_uint(v, path, "points");
  if (points < 1) throw ConfigError(child(path, "points"), "expected a positive integer");
  std::string scale = "linear";
  if (v.contains("scale")) scale = get_string(v, path, "scale");
  if (scale != "linear" && scale != "log") {
    throw ConfigError(child(path, "scale"), "expected \"linear\" or \"log\"");
  }
  if (scale == "log" && (from <= 0.0 || to <= 0.0)) {
    throw ConfigError(path, "log scale requires positive endpoints");
  }
  std::vector<double> out;
  out.reserve(points);
  if (points == 1) {
    out.push_back(from);
    return out;
  }
  for (std::uint64_t i = 0; i < points; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(points - 1);
    if (scale == "linear") {
      out.push_back(from + (to - from) * t);
    } else {
      out.push_back(std::exp(std::log(from) + (std::log(to) - std::log(from)) * t));
    }
  }
  return out;
}

std::vector<double> parse_psi_list(const json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) throw ConfigError(path, "expected a non-empty array");
  std::vector<double> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string p = path + "/" + std::to_string(i);
    if (v[i].is_number()) {
      const double psi = parse_finite_real(v[i], p);
      if (psi <= 0.0 || psi > 1.0) throw ConfigError(p, "expected a measure in (0, 1]");
      out.push_back(psi);
    } else if (v[i].is_object()) {
      out.push_back(psi_measure(parse_sized_corr(v[i], p)));
    } else {
      throw ConfigError(p, "expected a number or a correlation object");
    }
  }
  return out;
}

Regime parse_regime(const json& v, const std::string& path) {
  if (!v.is_string()) throw ConfigError(path, "expected a string");
  const std::string s = v.get<std::string>();
  if (s == "exact") return Regime::exact;
  if (s == "low_snr") return Regime::low_snr;
  if (s == "high_snr") return Regime::high_snr;
  throw ConfigError(path, "unknown regime " + s);
}

GainExponent parse_exponent(const json& v, const std::string& path) {
  if (!v.is_string()) throw ConfigError(path, "expected a string");
  const std::string s = v.get<std::string>();
  if (s == "quartic") return GainExponent::quartic;
  if (s == "as_printed") return GainExponent::as_printed;
  throw ConfigError(path, "unknown gain exponent " + s);
}

}  // namespace mkmimo::cli
