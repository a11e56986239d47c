#include "experiments.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "config.hpp"
#include "emit.hpp"
#include "mkmimo/asymptotics.hpp"
#include "mkmimo/capacity.hpp"
#include "mkmimo/channel_sampler.hpp"
#include "mkmimo/convergence_lab.hpp"
#include "mkmimo/corr_measure.hpp"
#include "mkmimo/corr_models.hpp"
#include "mkmimo/multiuser.hpp"

namespace mkmimo::cli {
namespace {

constexpr const char* kParams = "/params";

// Exceptions raised while interpreting config values are config errors; the
// numerics only run once the inputs are fully built.
template <typename Fn>
auto build(const std::string& path, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(path, e.what());
  }
}

std::string sub(const std::string& key) { return std::string(kParams) + "/" + key; }

Eigen::Index require_dim(const json& p, const std::string& key) {
  const std::int64_t n = get_index(p, kParams, key);
  if (n < 1) throw ConfigError(sub(key), "expected a positive integer");
  return static_cast<Eigen::Index>(n);
}

std::vector<Eigen::Index> require_dim_list(const json& p, const std::string& key) {
  std::vector<Eigen::Index> out;
  for (const std::int64_t v : parse_index_list(require_key(p, kParams, key), sub(key))) {
    if (v < 1) throw ConfigError(sub(key), "expected positive integers");
    out.push_back(static_cast<Eigen::Index>(v));
  }
  return out;
}

double require_snr(const json& p, const std::string& key = "snr") {
  const double snr = get_real(p, kParams, key);
  if (snr < 0.0) throw ConfigError(sub(key), "expected a non-negative number");
  return snr;
}

double require_epsilon(const json& p, const std::string& key) {
  const double eps = get_real(p, kParams, key);
  if (!(eps > 0.0 && eps < 1.0)) throw ConfigError(sub(key), "expected a value in (0, 1)");
  return eps;
}

std::pair<double, double> mean_var(const std::vector<double>& values) {
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (const double v : values) mean += v;
  mean /= n;
  double var = 0.0;
  for (const double v : values) var += (v - mean) * (v - mean);
  var /= std::max(1.0, n - 1.0);
  return {mean, var};
}

std::string or_none(const std::string& s) { return s.empty() ? "none" : s; }

// ---------------------------------------------------------------- sample

void run_sample(const json& p, std::uint64_t trials, std::uint64_t seed, Report& rep) {
  reject_unknown_keys(p, kParams, {"n_t", "n_r", "gains", "tx_corr", "rx_corr", "snr"});
  const Eigen::Index n_t = require_dim(p, "n_t");
  const Eigen::Index n_r = require_dim(p, "n_r");
  KeyholeGains gains = parse_gains(require_key(p, kParams, "gains"), sub("gains"));
  const Eigen::Index m = gains.count();
  ChannelSpec spec{n_t,
                   n_r,
                   std::move(gains),
                   parse_corr_list(require_key(p, kParams, "tx_corr"), sub("tx_corr"), n_t, m),
                   parse_corr_list(require_key(p, kParams, "rx_corr"), sub("rx_corr"), n_r, m),
                   require_snr(p)};
  build(kParams, [&] {
    validate_spec(spec);
    return 0;
  });

  const CapacitySamples samples = monte_carlo_capacity(spec, trials, seed);
  std::vector<double> sorted = samples.values;
  std::sort(sorted.begin(), sorted.end());

  std::vector<double> cdf(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    cdf[i] = static_cast<double>(i + 1) / static_cast<double>(sorted.size());
  }
  rep.add_column("capacity", Unit::nats).values = std::move(sorted);
  rep.add_column("cdf", Unit::none).values = std::move(cdf);

  const auto [mean, var] = mean_var(samples.values);
  rep.add_text("spec_digest", samples.spec_digest);
  rep.add_real("empirical_mean", Unit::nats, mean);
  rep.add_real("empirical_var", Unit::nats2, var);
}

// ---------------------------------------------------------------- outage

void run_outage(const json& p, std::uint64_t trials, std::uint64_t seed, Report& rep) {
  reject_unknown_keys(p, kParams,
                      {"n_t_list", "n_r", "gains", "tx_corr", "rx_corr", "snr", "grid_points"});
  const std::vector<Eigen::Index> n_t_list = require_dim_list(p, "n_t_list");
  for (std::size_t i = 1; i < n_t_list.size(); ++i) {
    if (std::find(n_t_list.begin(), n_t_list.begin() + static_cast<std::ptrdiff_t>(i),
                  n_t_list[i]) != n_t_list.begin() + static_cast<std::ptrdiff_t>(i)) {
      throw ConfigError(sub("n_t_list"), "expected distinct entries");
    }
  }
  const Eigen::Index n_r = require_dim(p, "n_r");
  const KeyholeGains gains = parse_gains(require_key(p, kParams, "gains"), sub("gains"));
  const Eigen::Index m = gains.count();
  const CorrModel tx_model = parse_corr_model(require_key(p, kParams, "tx_corr"), sub("tx_corr"));
  const CorrelationMatrix rx =
      parse_corr_model(require_key(p, kParams, "rx_corr"), sub("rx_corr"))
          .instantiate(n_r, sub("rx_corr"));
  const double snr = require_snr(p);
  const std::uint64_t grid_points = get_uint_or(p, kParams, "grid_points", 200);
  if (grid_points < 2) throw ConfigError(sub("grid_points"), "expected at least 2");

  std::vector<EmpiricalCdf> curves;
  curves.reserve(n_t_list.size());
  for (const Eigen::Index n_t : n_t_list) {
    ChannelSpec spec = build(kParams, [&] {
      return make_shared_corr_spec(n_t, n_r, gains, tx_model.instantiate(n_t, sub("tx_corr")), rx,
                                   snr);
    });
    curves.emplace_back(monte_carlo_capacity(spec, trials, seed).values);
  }
  const EmpiricalCdf reference = equivalent_rayleigh_reference_cdf(
      gains, std::vector<CorrelationMatrix>(static_cast<std::size_t>(m), rx), snr, trials, seed);

  double lo = reference.sorted_values().front();
  double hi = reference.sorted_values().back();
  for (const EmpiricalCdf& c : curves) {
    lo = std::min(lo, c.sorted_values().front());
    hi = std::max(hi, c.sorted_values().back());
  }

  std::vector<double> rate(grid_points);
  for (std::uint64_t i = 0; i < grid_points; ++i) {
    rate[i] = hi > lo
                  ? lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(grid_points - 1)
                  : lo;
  }
  rep.add_column("rate", Unit::nats).values = rate;
  for (std::size_t j = 0; j < curves.size(); ++j) {
    std::vector<double> values(grid_points);
    for (std::uint64_t i = 0; i < grid_points; ++i) values[i] = curves[j](rate[i]);
    rep.add_column("cdf_nt" + std::to_string(n_t_list[j]), Unit::none).values = std::move(values);
  }
  std::vector<double> ref_values(grid_points);
  for (std::uint64_t i = 0; i < grid_points; ++i) ref_values[i] = reference(rate[i]);
  rep.add_column("cdf_equivalent", Unit::none).values = std::move(ref_values);

  for (std::size_t j = 0; j < curves.size(); ++j) {
    rep.add_real("ks_nt" + std::to_string(n_t_list[j]), Unit::none,
                 ks_distance(curves[j], reference));
  }
  rep.add_real("ks_se", Unit::none, ks_standard_error(trials, trials));
}

// ---------------------------------------------------------------- approx

void run_approx_frmk(const json& p, Report& rep) {
  reject_unknown_keys(p, kParams, {"family", "n_t", "n_r", "tx_corr", "rx_corr", "snr_grid",
                                   "rate", "epsilon", "multiplexing"});
  const Eigen::Index n_t = require_dim(p, "n_t");
  const Eigen::Index n_r = require_dim(p, "n_r");
  const CorrelationMatrix tx =
      parse_corr_model(require_key(p, kParams, "tx_corr"), sub("tx_corr"))
          .instantiate(n_t, sub("tx_corr"));
  const CorrelationMatrix rx =
      parse_corr_model(require_key(p, kParams, "rx_corr"), sub("rx_corr"))
          .instantiate(n_r, sub("rx_corr"));
  const std::vector<double> grid =
      parse_snr_grid(require_key(p, kParams, "snr_grid"), sub("snr_grid"));
  for (const double g : grid) {
    if (g < 0.0) throw ConfigError(sub("snr_grid"), "expected non-negative snr values");
  }
  const double psi_t = psi_measure(tx);
  const double psi_r = psi_measure(rx);

  std::optional<double> rate;
  if (p.contains("rate")) rate = get_real(p, kParams, "rate");
  std::optional<double> eps;
  if (p.contains("epsilon")) eps = require_epsilon(p, "epsilon");
  std::optional<double> mux;
  if (p.contains("multiplexing")) {
    mux = get_real(p, kParams, "multiplexing");
    if (*mux < 0.0) throw ConfigError(sub("multiplexing"), "expected a non-negative number");
  }

  OutageContext ctx;
  ctx.n_t = n_t;
  ctx.n_r = n_r;
  ctx.psi_t = psi_t;
  ctx.psi_r = psi_r;

  std::vector<double> mu14, s15, mu16, s17, p18, c35, f35, c36, f36;
  for (const double g : grid) {
    const GaussianApprox exact = frmk_moments(tx, rx, g, n_t, n_r, Regime::exact);
    const GaussianApprox low = frmk_moments(tx, rx, g, n_t, n_r, Regime::low_snr);
    mu14.push_back(exact.mu);
    s15.push_back(exact.sigma2);
    mu16.push_back(low.mu);
    s17.push_back(low.sigma2);
    if (rate) p18.push_back(gaussian_outage_prob(exact, OutageQuery::rate(*rate), ctx));
    if (eps) {
      const OutageCapacity ce = outage_capacity_eps(exact, *eps);
      c35.push_back(ce.nats);
      f35.push_back(ce.floored ? 1.0 : 0.0);
      const OutageCapacity cl = outage_capacity_low_snr_frmk(g, psi_t, psi_r, *eps);
      c36.push_back(cl.nats);
      f36.push_back(cl.floored ? 1.0 : 0.0);
    }
  }

  rep.add_column("gamma0", Unit::none).values = grid;
  rep.add_column("eq14_mu", Unit::nats).values = std::move(mu14);
  rep.add_column("eq15_sigma2", Unit::nats2).values = std::move(s15);
  rep.add_column("eq16_mu_low_snr", Unit::nats).values = std::move(mu16);
  rep.add_column("eq17_sigma2_low_snr", Unit::nats2).values = std::move(s17);
  if (rate) rep.add_column("eq18_outage_prob", Unit::none).values = std::move(p18);
  if (eps) {
    rep.add_column("eq35_c_eps", Unit::nats).values = std::move(c35);
    rep.add_column("eq35_floored", Unit::none, true).values = std::move(f35);
    rep.add_column("eq36_c_eps_low_snr", Unit::nats).values = std::move(c36);
    rep.add_column("eq36_floored", Unit::none, true).values = std::move(f36);
  }

  rep.add_text("family", "frmk");
  rep.add_real("psi_t", Unit::none, psi_t);
  rep.add_real("psi_r", Unit::none, psi_r);
  if (mux) {
    const GaussianApprox exact = frmk_moments(tx, rx, grid.front(), n_t, n_r, Regime::exact);
    rep.add_real("eq19_outage_prob", Unit::none,
                 gaussian_outage_prob(exact, OutageQuery::multiplexing(*mux), ctx));
  }
}

void run_approx_rdmk(const json& p, Report& rep) {
  reject_unknown_keys(p, kParams, {"family", "gains", "psi_t", "psi_r", "snr_grid", "exponent",
                                   "rate", "epsilon", "multiplexing"});
  const KeyholeGains gains = parse_gains(require_key(p, kParams, "gains"), sub("gains"));
  const std::size_t m = static_cast<std::size_t>(gains.count());
  const std::vector<double> psi_t = parse_psi_list(require_key(p, kParams, "psi_t"), sub("psi_t"));
  const std::vector<double> psi_r = parse_psi_list(require_key(p, kParams, "psi_r"), sub("psi_r"));
  if (psi_t.size() != m) {
    throw ConfigError(sub("psi_t"), "expected one entry per keyhole (" + std::to_string(m) + ")");
  }
  if (psi_r.size() != m) {
    throw ConfigError(sub("psi_r"), "expected one entry per keyhole (" + std::to_string(m) + ")");
  }
  const std::vector<double> grid =
      parse_snr_grid(require_key(p, kParams, "snr_grid"), sub("snr_grid"));
  for (const double g : grid) {
    if (g < 0.0) throw ConfigError(sub("snr_grid"), "expected non-negative snr values");
  }
  GainExponent exponent = GainExponent::quartic;
  if (p.contains("exponent")) exponent = parse_exponent(p["exponent"], sub("exponent"));

  std::optional<double> rate;
  if (p.contains("rate")) rate = get_real(p, kParams, "rate");
  std::optional<double> eps;
  if (p.contains("epsilon")) eps = require_epsilon(p, "epsilon");
  std::optional<double> mux;
  if (p.contains("multiplexing")) {
    mux = get_real(p, kParams, "multiplexing");
    if (*mux < 0.0) throw ConfigError(sub("multiplexing"), "expected a non-negative number");
  }

  const bool include_high = gains.amplitudes().cwiseAbs().minCoeff() > 0.0 &&
                            std::all_of(grid.begin(), grid.end(), [](double g) { return g > 0.0; });

  OutageContext ctx;
  ctx.gains = gains;
  ctx.psi_t_list = psi_t;
  ctx.psi_r_list = psi_r;
  ctx.exponent = exponent;

  std::vector<double> mu20, s21, s22, mu23, s23, p18, c35, f35, c37, f37;
  for (const double g : grid) {
    const GaussianApprox exact = rdmk_moments(gains, psi_t, psi_r, g, Regime::exact, exponent);
    const GaussianApprox low = rdmk_moments(gains, psi_t, psi_r, g, Regime::low_snr, exponent);
    mu20.push_back(exact.mu);
    s21.push_back(exact.sigma2);
    s22.push_back(low.sigma2);
    if (include_high) {
      const GaussianApprox high = rdmk_moments(gains, psi_t, psi_r, g, Regime::high_snr, exponent);
      mu23.push_back(high.mu);
      s23.push_back(high.sigma2);
    }
    if (rate) p18.push_back(gaussian_outage_prob(exact, OutageQuery::rate(*rate), ctx));
    if (eps) {
      const OutageCapacity ce = outage_capacity_eps(exact, *eps);
      c35.push_back(ce.nats);
      f35.push_back(ce.floored ? 1.0 : 0.0);
      const OutageCapacity cl = outage_capacity_low_snr_rdmk(gains, psi_t, psi_r, g, *eps, exponent);
      c37.push_back(cl.nats);
      f37.push_back(cl.floored ? 1.0 : 0.0);
    }
  }

  rep.add_column("gamma0", Unit::none).values = grid;
  rep.add_column("eq20_mu", Unit::nats).values = std::move(mu20);
  rep.add_column("eq21_sigma2", Unit::nats2).values = std::move(s21);
  rep.add_column("eq22_sigma2_low_snr", Unit::nats2).values = std::move(s22);
  if (include_high) {
    rep.add_column("eq23_mu_high_snr", Unit::nats).values = std::move(mu23);
    rep.add_column("eq23_sigma2_high_snr", Unit::nats2).values = std::move(s23);
  }
  if (rate) rep.add_column("eq18_outage_prob", Unit::none).values = std::move(p18);
  if (eps) {
    rep.add_column("eq35_c_eps", Unit::nats).values = std::move(c35);
    rep.add_column("eq35_floored", Unit::none, true).values = std::move(f35);
    rep.add_column("eq37_c_eps_low_snr", Unit::nats).values = std::move(c37);
    rep.add_column("eq37_floored", Unit::none, true).values = std::move(f37);
  }

  rep.add_text("family", "rdmk");
  if (!include_high) {
    rep.add_text("note", "eq23 omitted: high-snr closed form requires positive snr and gains");
  }
  if (mux) {
    const GaussianApprox exact =
        rdmk_moments(gains, psi_t, psi_r, grid.front(), Regime::exact, exponent);
    rep.add_real("eq24_outage_prob", Unit::none,
                 gaussian_outage_prob(exact, OutageQuery::multiplexing(*mux), ctx));
  }
}

void run_approx(const json& p, Report& rep) {
  const std::string family = get_string(p, kParams, "family");
  if (family == "frmk") {
    run_approx_frmk(p, rep);
  } else if (family == "rdmk") {
    run_approx_rdmk(p, rep);
  } else {
    throw ConfigError(sub("family"), "expected \"frmk\" or \"rdmk\"");
  }
}

// ---------------------------------------------------------------- measure

void run_measure(const json& p, Report& rep) {
  reject_unknown_keys(p, kParams, {"kind", "r", "n", "n_list"});
  const CorrKind kind = parse_corr_kind(require_key(p, kParams, "kind"), sub("kind"));
  std::complex<double> r{0.0, 0.0};
  if (p.contains("r")) {
    r = parse_complex(p["r"], sub("r"));
  } else if (kind != CorrKind::identity) {
    throw ConfigError(sub("r"), "required key missing");
  }
  const bool has_n = p.contains("n");
  const bool has_list = p.contains("n_list");
  if (has_n == has_list) {
    throw ConfigError(kParams, "expected exactly one of \"n\" and \"n_list\"");
  }
  const std::vector<Eigen::Index> n_list =
      has_n ? std::vector<Eigen::Index>{require_dim(p, "n")} : require_dim_list(p, "n_list");

  const bool exponential = kind == CorrKind::exponential;
  std::vector<double> ns, r25, k29, p28, o27, psi, a34;
  CorrDecomposition last;
  for (const Eigen::Index n : n_list) {
    const CorrelationMatrix corr = build(kParams, [&] { return make_corr(kind, n, r); });
    const CorrDecomposition d = decompose(corr);
    ns.push_back(static_cast<double>(n));
    r25.push_back(d.r_measure);
    k29.push_back(d.k_measure);
    p28.push_back(d.p_measure);
    o27.push_back(std::fabs(d.r_measure * d.r_measure - d.k_measure * d.k_measure -
                            d.p_measure * d.p_measure) /
                  (d.r_measure * d.r_measure));
    psi.push_back(psi_measure(corr));
    if (exponential) a34.push_back(exp_model_asymptotic_measure(n, r));
    last = d;
  }

  rep.add_column("n", Unit::none, true).values = std::move(ns);
  rep.add_column("eq25_r_measure", Unit::none).values = std::move(r25);
  rep.add_column("eq29_k_measure", Unit::none).values = std::move(k29);
  rep.add_column("eq28_p_measure", Unit::none).values = std::move(p28);
  rep.add_column("eq27_orthogonality_residual", Unit::none).values = std::move(o27);
  rep.add_column("psi", Unit::none).values = std::move(psi);
  if (exponential) rep.add_column("eq34_asymptotic_measure", Unit::none).values = std::move(a34);

  const double n = static_cast<double>(n_list.back());
  const double root = 1.0 / std::sqrt(n);
  const auto status = [](double x, double lo, double hi) {
    return x >= lo - 1e-12 && x <= hi + 1e-12 ? "within bounds" : "violated";
  };
  const double residual = std::fabs(last.r_measure * last.r_measure -
                                    last.k_measure * last.k_measure -
                                    last.p_measure * last.p_measure) /
                          (last.r_measure * last.r_measure);
  rep.add_int("n", n_list.back());
  rep.add_real("eq25_r_measure", Unit::none, last.r_measure);
  rep.add_real("eq25_lower_bound", Unit::none, root);
  rep.add_real("eq25_upper_bound", Unit::none, 1.0);
  rep.add_text("eq25_status", status(last.r_measure, root, 1.0));
  rep.add_real("eq28_p_measure", Unit::none, last.p_measure);
  rep.add_real("eq28_lower_bound", Unit::none, 0.0);
  rep.add_real("eq28_upper_bound", Unit::none, std::sqrt(1.0 - 1.0 / n));
  rep.add_text("eq28_status", status(last.p_measure, 0.0, std::sqrt(1.0 - 1.0 / n)));
  rep.add_real("eq29_k_measure", Unit::none, last.k_measure);
  rep.add_real("eq29_lower_bound", Unit::none, root);
  rep.add_real("eq29_upper_bound", Unit::none, 1.0);
  rep.add_text("eq29_status", status(last.k_measure, root, 1.0));
  rep.add_real("eq27_orthogonality_residual", Unit::none, residual);
  rep.add_text("eq27_status", residual <= 1e-12 ? "orthogonal" : "violated");
}

// ---------------------------------------------------------------- converge

void run_converge(const json& p, std::uint64_t trials, std::uint64_t seed, Report& rep) {
  const std::string check = get_string(p, kParams, "check");

  if (check == "theorem1") {
    reject_unknown_keys(p, kParams,
                        {"check", "n_t_list", "n_r", "gains", "rx_corr", "tx_model", "snr"});
    const std::vector<Eigen::Index> n_t_list = require_dim_list(p, "n_t_list");
    const Eigen::Index n_r = require_dim(p, "n_r");
    const KeyholeGains gains = parse_gains(require_key(p, kParams, "gains"), sub("gains"));
    const CorrelationMatrix rx =
        parse_corr_model(require_key(p, kParams, "rx_corr"), sub("rx_corr"))
            .instantiate(n_r, sub("rx_corr"));
    const CorrModel tx_model =
        parse_corr_model(require_key(p, kParams, "tx_model"), sub("tx_model"));
    const double snr = require_snr(p);
    const std::vector<CorrelationMatrix> rx_list(static_cast<std::size_t>(gains.count()), rx);
    const auto model = [&tx_model](Eigen::Index n) {
      return tx_model.instantiate(n, sub("tx_model"));
    };
    const SweepResult sweep =
        theorem1_sweep(gains, rx_list, snr, n_t_list, model, trials, seed);
    rep.add_column("n_t", Unit::none, true).values = sweep.parameters;
    rep.add_column("eq6_ks", Unit::none).values = sweep.metrics;
    rep.add_column("ks_se", Unit::none).values = sweep.std_errors;
    rep.add_text("note", or_none(sweep.note));
    rep.add_text("warning", or_none(sweep.warning));
    return;
  }

  if (check == "theorem2") {
    reject_unknown_keys(p, kParams,
                        {"check", "n_t", "n_r", "tx_corr", "rx_corr", "snr", "m_list"});
    const Eigen::Index n_t = require_dim(p, "n_t");
    const Eigen::Index n_r = require_dim(p, "n_r");
    const CorrelationMatrix tx =
        parse_corr_model(require_key(p, kParams, "tx_corr"), sub("tx_corr"))
            .instantiate(n_t, sub("tx_corr"));
    const CorrelationMatrix rx =
        parse_corr_model(require_key(p, kParams, "rx_corr"), sub("rx_corr"))
            .instantiate(n_r, sub("rx_corr"));
    const double snr = require_snr(p);
    const std::vector<Eigen::Index> m_list = require_dim_list(p, "m_list");
    const SweepResult sweep = theorem2_sweep(tx, rx, snr, m_list, trials, seed);
    std::vector<double> scaled(sweep.metrics.size());
    for (std::size_t i = 0; i < sweep.metrics.size(); ++i) {
      scaled[i] = sweep.metrics[i] * std::sqrt(sweep.parameters[i]);
    }
    rep.add_column("m", Unit::none, true).values = sweep.parameters;
    rep.add_column("eq8_cube_sum", Unit::none).values = sweep.aux;
    rep.add_column("eq13_ks", Unit::none).values = sweep.metrics;
    rep.add_column("ks_se", Unit::none).values = sweep.std_errors;
    rep.add_column("ks_times_sqrt_m", Unit::none).values = std::move(scaled);
    rep.add_text("note", or_none(sweep.note));
    rep.add_text("warning", or_none(sweep.warning));
    return;
  }

  if (check == "lemma_a1") {
    reject_unknown_keys(p, kParams, {"check", "corr"});
    const CorrelationMatrix corr = parse_sized_corr(require_key(p, kParams, "corr"), sub("corr"));
    const MomentCheck res = lemma_a1_check(corr, trials, seed);
    rep.add_column("lemmaA1_pred_mean", Unit::none).values = {res.pred_mean};
    rep.add_column("lemmaA1_pred_var", Unit::none).values = {res.pred_var};
    rep.add_column("empirical_mean", Unit::none).values = {res.emp_mean};
    rep.add_column("empirical_var", Unit::none).values = {res.emp_var};
    return;
  }

  if (check == "lemma_a2") {
    reject_unknown_keys(p, kParams, {"check", "corr_list"});
    const json& list = require_key(p, kParams, "corr_list");
    if (!list.is_array() || list.empty()) {
      throw ConfigError(sub("corr_list"), "expected a non-empty array");
    }
    std::vector<CorrelationMatrix> corr_list;
    for (std::size_t i = 0; i < list.size(); ++i) {
      corr_list.push_back(parse_sized_corr(list[i], sub("corr_list") + "/" + std::to_string(i)));
      if (corr_list.back().size() != corr_list.front().size()) {
        throw ConfigError(sub("corr_list"), "expected matrices of one common size");
      }
    }
    const DeviationCheck res = lemma_a2_deviation(corr_list, trials, seed);
    rep.add_column("eqA4_analytic", Unit::none).values = {res.analytic};
    rep.add_column("empirical", Unit::none).values = {res.empirical};
    rep.add_column("std_error", Unit::none).values = {res.std_error};
    return;
  }

  if (check == "lemma_a3") {
    reject_unknown_keys(p, kParams, {"check", "tx_corr", "rx_corr"});
    const CorrelationMatrix tx =
        parse_sized_corr(require_key(p, kParams, "tx_corr"), sub("tx_corr"));
    const CorrelationMatrix rx =
        parse_sized_corr(require_key(p, kParams, "rx_corr"), sub("rx_corr"));
    const DeviationCheck res = lemma_a3_deviation(tx, rx, trials, seed);
    rep.add_column("eqA27_analytic", Unit::none).values = {res.analytic};
    rep.add_column("empirical", Unit::none).values = {res.empirical};
    rep.add_column("std_error", Unit::none).values = {res.std_error};
    return;
  }

  throw ConfigError(sub("check"),
                    "expected one of theorem1, theorem2, lemma_a1, lemma_a2, lemma_a3");
}

// ---------------------------------------------------------------- telatar

void run_telatar(const json& p, std::uint64_t trials, std::uint64_t seed, Report& rep) {
  reject_unknown_keys(p, kParams,
                      {"n_t", "n_r", "gains", "rx_corr", "snr", "k_list", "rate", "epsilon"});
  const Eigen::Index n_t = require_dim(p, "n_t");
  const Eigen::Index n_r = require_dim(p, "n_r");
  const KeyholeGains gains = parse_gains(require_key(p, kParams, "gains"), sub("gains"));
  const CorrelationMatrix rx =
      parse_corr_model(require_key(p, kParams, "rx_corr"), sub("rx_corr"))
          .instantiate(n_r, sub("rx_corr"));
  const double snr = require_snr(p);
  const std::vector<Eigen::Index> k_list = require_dim_list(p, "k_list");
  for (const Eigen::Index k : k_list) {
    if (k > n_t) throw ConfigError(sub("k_list"), "entries must not exceed n_t");
  }

  const bool has_rate = p.contains("rate");
  const bool has_eps = p.contains("epsilon");
  if (has_rate == has_eps) {
    throw ConfigError(kParams, "expected exactly one of \"rate\" and \"epsilon\"");
  }
  double rate = 0.0;
  if (has_rate) {
    rate = get_real(p, kParams, "rate");
  } else {
    const double eps = require_epsilon(p, "epsilon");
    rate = build(sub("epsilon"), [&] {
      return telatar_rate_for_epsilon(n_t, n_r, gains.count(), snr, eps);
    });
  }

  const std::vector<CorrelationMatrix> rx_list(static_cast<std::size_t>(gains.count()), rx);
  const SweepResult sweep =
      telatar_sweep(n_t, n_r, gains, rx_list, snr, rate, k_list, trials, seed);

  rep.add_column("k", Unit::none, true).values = sweep.parameters;
  rep.add_column("eq38_measure", Unit::none).values = sweep.aux;
  rep.add_column("pout_mc", Unit::none).values = sweep.metrics;
  rep.add_column("pout_se", Unit::none).values = sweep.std_errors;

  rep.add_real("rate", Unit::nats, rate);
  rep.add_text("rate_source", has_rate ? "config" : "epsilon");
  if (sweep.argmin) {
    rep.add_int("argmin_k", static_cast<std::uint64_t>(sweep.parameters[*sweep.argmin]));
  } else {
    rep.add_text("argmin_k", "none");
  }
  rep.add_text("warning", or_none(sweep.warning));
}

// ---------------------------------------------------------------- schedule

void run_schedule(const json& p, std::uint64_t seed, Report& rep) {
  reject_unknown_keys(p, kParams, {"mu", "sigma", "k_users", "relay", "feedback", "oracle"});
  const double mu = get_real(p, kParams, "mu");
  const double sigma = get_real(p, kParams, "sigma");
  if (sigma < 0.0) throw ConfigError(sub("sigma"), "expected a non-negative number");
  const std::vector<std::uint64_t> k_users =
      parse_uint_list(require_key(p, kParams, "k_users"), sub("k_users"));
  for (const std::uint64_t k : k_users) {
    if (k < 1) throw ConfigError(sub("k_users"), "expected positive user counts");
  }

  std::vector<double> total, gain;
  for (const std::uint64_t k : k_users) {
    const ScheduledThroughput st = scheduled_throughput(mu, sigma, k);
    total.push_back(st.total);
    gain.push_back(st.gain);
  }

  std::optional<std::vector<double>> relay_total, relay_low, relay_high;
  std::string relay_note;
  if (p.contains("relay")) {
    const json& relay = p["relay"];
    const std::string rp = sub("relay");
    reject_unknown_keys(relay, rp,
                        {"m", "n_t", "n_r", "gamma1", "regime", "exponent", "psi_t", "psi_r"});
    const std::int64_t m_raw = get_index(relay, rp, "m");
    if (m_raw < 1) throw ConfigError(rp + "/m", "expected a positive integer");
    const Eigen::Index m = static_cast<Eigen::Index>(m_raw);
    const std::int64_t n_t = get_index(relay, rp, "n_t");
    const std::int64_t n_r = get_index(relay, rp, "n_r");
    if (n_t < 1) throw ConfigError(rp + "/n_t", "expected a positive integer");
    if (n_r < 1) throw ConfigError(rp + "/n_r", "expected a positive integer");
    const double gamma1 = get_real(relay, rp, "gamma1");
    if (gamma1 < 0.0) throw ConfigError(rp + "/gamma1", "expected a non-negative number");
    Regime regime = Regime::exact;
    if (relay.contains("regime")) regime = parse_regime(relay["regime"], rp + "/regime");
    GainExponent exponent = GainExponent::quartic;
    if (relay.contains("exponent")) exponent = parse_exponent(relay["exponent"], rp + "/exponent");

    const bool uncorrelated = !relay.contains("psi_t") && !relay.contains("psi_r");
    std::vector<double> psi_t(static_cast<std::size_t>(m), 1.0 / static_cast<double>(n_t));
    std::vector<double> psi_r(static_cast<std::size_t>(m), 1.0 / static_cast<double>(n_r));
    if (relay.contains("psi_t")) psi_t = parse_psi_list(relay["psi_t"], rp + "/psi_t");
    if (relay.contains("psi_r")) psi_r = parse_psi_list(relay["psi_r"], rp + "/psi_r");
    if (psi_t.size() != static_cast<std::size_t>(m) || psi_r.size() != static_cast<std::size_t>(m)) {
      throw ConfigError(rp, "psi lists need one entry per relay node");
    }
    const KeyholeGains gains = KeyholeGains::equal(m);

    relay_total.emplace();
    if (uncorrelated) {
      relay_low.emplace();
      if (gamma1 > 0.0) {
        relay_high.emplace();
      } else {
        relay_note = "eq42 omitted: high-snr closed form requires positive gamma1";
      }
    }
    for (const std::uint64_t k : k_users) {
      relay_total->push_back(
          relay_throughput(gains, psi_t, psi_r, gamma1, k, regime, exponent).total);
      if (relay_low) relay_low->push_back(relay_throughput_low_snr(m, n_t, n_r, gamma1, k));
      if (relay_high) relay_high->push_back(relay_throughput_high_snr(m, n_t, n_r, gamma1, k));
    }
  }

  std::optional<std::vector<double>> oracle_mean;
  if (p.contains("oracle")) {
    const json& oracle = p["oracle"];
    reject_unknown_keys(oracle, sub("oracle"), {"n_reps"});
    const std::uint64_t n_reps = get_uint(oracle, sub("oracle"), "n_reps");
    if (n_reps < 1) throw ConfigError(sub("oracle") + "/n_reps", "expected a positive integer");
    oracle_mean.emplace();
    for (const std::uint64_t k : k_users) {
      oracle_mean->push_back(scheduled_throughput_oracle(mu, sigma, k, n_reps, seed));
    }
  }

  std::vector<double> k_col(k_users.begin(), k_users.end());
  rep.add_column("k_users", Unit::none, true).values = std::move(k_col);
  rep.add_column("eq39_throughput", Unit::nats).values = std::move(total);
  rep.add_column("eq39_gain", Unit::nats).values = std::move(gain);
  if (relay_total) rep.add_column("eq40_relay", Unit::nats).values = std::move(*relay_total);
  if (relay_low) rep.add_column("eq41_relay_low", Unit::nats).values = std::move(*relay_low);
  if (relay_high) rep.add_column("eq42_relay_high", Unit::nats).values = std::move(*relay_high);
  if (oracle_mean) rep.add_column("oracle_mean", Unit::nats).values = std::move(*oracle_mean);

  rep.add_real("mu", Unit::nats, mu);
  rep.add_real("sigma", Unit::nats, sigma);
  if (!relay_note.empty()) rep.add_text("note", relay_note);

  if (p.contains("feedback")) {
    const json& fb = p["feedback"];
    reject_unknown_keys(fb, sub("feedback"), {"granularity", "outage_target"});
    FeedbackSpec spec;
    spec.granularity = get_real(fb, sub("feedback"), "granularity");
    if (spec.granularity <= 0.0) {
      throw ConfigError(sub("feedback") + "/granularity", "expected a positive number");
    }
    spec.outage_target = get_real(fb, sub("feedback"), "outage_target");
    if (!(spec.outage_target > 0.0 && spec.outage_target < 1.0)) {
      throw ConfigError(sub("feedback") + "/outage_target", "expected a value in (0, 1)");
    }
    const FeedbackBits bits = feedback_bits(mu, sigma, spec);
    rep.add_real("eq43_feedback", Unit::nats, bits.nats);
    rep.add_text("eq43_negative", bits.negative ? "true" : "false");
  }
}

}  // namespace

void run_experiment(const RunOptions& options) {
  json cfg = load_config(options.config_path);
  reject_unknown_keys(cfg, "", {"experiment", "seed", "trials", "out", "params"});
  const std::string kind = get_string(cfg, "", "experiment");
  if (kind != options.experiment) {
    throw ConfigError("/experiment", "config declares \"" + kind + "\" but the subcommand is \"" +
                                         options.experiment + "\"");
  }
  if (options.seed) cfg["seed"] = *options.seed;
  if (options.trials) cfg["trials"] = *options.trials;
  if (options.out) cfg["out"] = *options.out;

  const std::uint64_t seed = get_uint_or(cfg, "", "seed", 1);
  const std::uint64_t trials = get_uint_or(cfg, "", "trials", 10000);
  if (trials < 1) throw ConfigError("/trials", "expected a positive integer");
  if (!cfg.contains("out")) throw ConfigError("/out", "required key missing (or pass --out)");
  const std::string out_base = get_string(cfg, "", "out");
  if (out_base.empty()) throw ConfigError("/out", "expected a non-empty path");
  const json& params = require_key(cfg, "", "params");
  require_object(params, kParams);

  json digest_source = cfg;
  digest_source.erase("out");  // the digest identifies the numbers, not their destination
  const std::string canonical = digest_source.dump();

  Report report;
  report.add_text("experiment", kind);
  report.add_text("config_digest", fnv1a_hex(canonical));
  report.add_text("config", canonical);
  report.add_int("seed", seed);
  report.add_int("n_trials", trials);

  if (kind == "sample") {
    run_sample(params, trials, seed, report);
  } else if (kind == "outage") {
    run_outage(params, trials, seed, report);
  } else if (kind == "approx") {
    run_approx(params, report);
  } else if (kind == "measure") {
    run_measure(params, report);
  } else if (kind == "converge") {
    run_converge(params, trials, seed, report);
  } else if (kind == "telatar") {
    run_telatar(params, trials, seed, report);
  } else if (kind == "schedule") {
    run_schedule(params, seed, report);
  } else {
    throw ConfigError("/experiment", "unknown experiment " + kind);
  }

  write_report(report, out_base, options.bits);
}

}  // namespace mkmimo::cli
