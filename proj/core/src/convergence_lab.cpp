#include "mkmimo/convergence_lab.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "mkmimo/parallel.hpp"
#include "mkmimo/rng.hpp"

namespace mkmimo {
namespace {

// Reference simulations run on a seed derived from the experiment seed, so
// they stay independent of the channel draws even where tags overlap.
constexpr std::uint64_t kReferenceSeedSalt = 0x726566636466ull;

void check_trials(std::uint64_t n_trials) {
  if (n_trials < 1) {
    throw std::invalid_argument("n_trials must be >= 1");
  }
}

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
  double var = 0.0;
};

MeanSe mean_and_se(const std::vector<double>& v) {
  MeanSe out;
  const double n = static_cast<double>(v.size());
  out.mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) {
      const double d = x - out.mean;
      ss += d * d;
    }
    out.var = ss / (n - 1.0);
    out.se = std::sqrt(out.var / n);
  }
  return out;
}

void fill_cvector(Eigen::Ref<Eigen::VectorXcd> v, RandomStream& stream) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    v(i) = stream.next_cgaussian();
  }
}

// Capacity samples of the equal-gain shared-correlation channel through the
// Wishart reparameterization (requires m >= n_t).
std::vector<double> wishart_capacity_samples(Eigen::Index n_t, Eigen::Index n_r, Eigen::Index m,
                                             const CorrelationMatrix& r_t,
                                             const CorrelationMatrix& r_r, double snr,
                                             std::uint64_t n_trials, std::uint64_t seed) {
  const Eigen::MatrixXcd tx_root = psd_sqrt(r_t).root;
  const Eigen::MatrixXcd rx_root = psd_sqrt(r_r).root;
  std::vector<double> values(n_trials);
  parallel_for(0, n_trials, [&](std::uint64_t t) {
    const ChannelMatrix h = sample_keyhole_wishart(n_t, n_r, m, tx_root, rx_root, seed, t);
    values[t] = instantaneous_capacity(h, snr);
  });
  return values;
}

std::function<double(double)> gaussian_cdf(const GaussianApprox& approx) {
  const double mu = approx.mu;
  const double sigma = std::sqrt(approx.sigma2);
  if (sigma > 0.0) {
    return [mu, sigma](double x) { return q_function((mu - x) / sigma); };
  }
  return [mu](double x) { return x < mu ? 0.0 : 1.0; };
}

}  // namespace

GainDiagnostics gain_diagnostics(const KeyholeGains& gains) {
  GainDiagnostics d;
  for (Eigen::Index k = 0; k < gains.count(); ++k) {
    const double a = std::abs(gains.amplitudes()(k));
    d.cube_sum += a * a * a;
    d.max_gain = std::max(d.max_gain, a);
  }
  return d;
}

CorrSingularity average_corr_singularity(const KeyholeGains& gains,
                                         const std::vector<CorrelationMatrix>& tx_corr,
                                         const std::vector<CorrelationMatrix>& rx_corr) {
  const std::size_t m = static_cast<std::size_t>(gains.count());
  if (tx_corr.size() != m || rx_corr.size() != m) {
    throw std::invalid_argument("correlation lists must have one entry per keyhole");
  }
  const Eigen::Index n_t = tx_corr.front().size();
  const Eigen::Index n_r = rx_corr.front().size();
  for (std::size_t k = 0; k < m; ++k) {
    if (tx_corr[k].size() != n_t || rx_corr[k].size() != n_r) {
      throw std::invalid_argument("correlation matrices must share a common size per side");
    }
  }
  Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(n_t * n_r, n_t * n_r);
  CorrSingularity out;
  for (std::size_t k = 0; k < m; ++k) {
    const double w = std::norm(gains.amplitudes()(static_cast<Eigen::Index>(k)));
    const Eigen::MatrixXcd& tx = tx_corr[k].matrix();
    const Eigen::MatrixXcd& rx = rx_corr[k].matrix();
    // kron(tx^T, rx): block (i, j) is tx(j, i) * rx.
    for (Eigen::Index i = 0; i < n_t; ++i) {
      for (Eigen::Index j = 0; j < n_t; ++j) {
        c.block(i * n_r, j * n_r, n_r, n_r) += (w * tx(j, i)) * rx;
      }
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> st(tx, Eigen::EigenvaluesOnly);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> sr(rx, Eigen::EigenvaluesOnly);
    out.min_eig_lower_bound += w * st.eigenvalues()(0) * sr.eigenvalues()(0);
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> sc(c, Eigen::EigenvaluesOnly);
  out.c_min_eig = sc.eigenvalues()(0);
  out.c_max_eig = sc.eigenvalues()(n_t * n_r - 1);
  out.nonsingular = out.c_min_eig > 1e-10 * out.c_max_eig;
  return out;
}

MomentCheck lemma_a1_check(const CorrelationMatrix& r, std::uint64_t n_trials,
                           std::uint64_t seed) {
  check_trials(n_trials);
  const Eigen::Index n = r.size();
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(r.matrix(),
                                                               Eigen::EigenvaluesOnly);
  const Eigen::VectorXd lambda = solver.eigenvalues();
  std::vector<double> values(n_trials);
  parallel_for(0, n_trials, [&](std::uint64_t t) {
    RandomStream stream(seed, t, stream_tag::iid_matrix);
    double beta = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      beta += lambda(i) * std::norm(stream.next_cgaussian());
    }
    values[t] = beta / static_cast<double>(n);
  });
  const MeanSe stats = mean_and_se(values);
  MomentCheck check;
  check.emp_mean = stats.mean;
  check.emp_var = stats.var;
  check.pred_mean = r.matrix().trace().real() / static_cast<double>(n);
  check.pred_var = r.matrix().squaredNorm() / (static_cast<double>(n) * static_cast<double>(n));
  check.n_trials = n_trials;
  return check;
}

DeviationCheck lemma_a2_deviation(const std::vector<CorrelationMatrix>& r_list,
                                  std::uint64_t n_trials, std::uint64_t seed) {
  check_trials(n_trials);
  if (r_list.empty()) {
    throw std::invalid_argument("r_list must be non-empty");
  }
  const Eigen::Index n = r_list.front().size();
  const Eigen::Index m = static_cast<Eigen::Index>(r_list.size());
  std::vector<Eigen::MatrixXcd> roots;
  std::vector<bool> identity;
  for (const CorrelationMatrix& r : r_list) {
    if (r.size() != n) {
      throw std::invalid_argument("r_list matrices must share one size");
    }
    roots.push_back(psd_sqrt(r).root);
    identity.push_back(r.matrix().isIdentity(0.0));
  }
  DeviationCheck check;
  for (const CorrelationMatrix& ra : r_list) {
    for (const CorrelationMatrix& rb : r_list) {
      check.analytic += (ra.matrix() * rb.matrix()).trace().real();
    }
  }
  check.analytic /= static_cast<double>(n) * static_cast<double>(n);

  std::vector<double> values(n_trials);
  parallel_for(0, n_trials, [&](std::uint64_t t) {
    Eigen::MatrixXcd h(n, m);
    Eigen::VectorXcd g(n);
    for (Eigen::Index col = 0; col < m; ++col) {
      RandomStream stream(seed, t, stream_tag::column + static_cast<std::uint32_t>(col));
      fill_cvector(g, stream);
      if (identity[static_cast<std::size_t>(col)]) {
        h.col(col) = g;
      } else {
        h.col(col).noalias() = roots[static_cast<std::size_t>(col)] * g;
      }
    }
    Eigen::MatrixXcd d = (h.adjoint() * h) / static_cast<double>(n);
    d.diagonal().array() -= 1.0;
    values[t] = d.squaredNorm();
  });
  const MeanSe stats = mean_and_se(values);
  check.empirical = stats.mean;
  check.std_error = stats.se;
  check.n_trials = n_trials;
  return check;
}

DeviationCheck lemma_a3_deviation(const CorrelationMatrix& r_t, const CorrelationMatrix& r_r,
                                  std::uint64_t n_trials, std::uint64_t seed) {
  check_trials(n_trials);
  const Eigen::Index n_t = r_t.size();
  const Eigen::Index n_r = r_r.size();
  const Eigen::MatrixXcd tx_root = psd_sqrt(r_t).root;
  const Eigen::MatrixXcd rx_root = psd_sqrt(r_r).root;
  const bool tx_identity = r_t.matrix().isIdentity(0.0);
  const bool rx_identity = r_r.matrix().isIdentity(0.0);

  DeviationCheck check;
  const double ratio = static_cast<double>(n_r) / static_cast<double>(n_t);
  check.analytic = ratio * ratio * r_t.matrix().squaredNorm();

  std::vector<double> values(n_trials);
  parallel_for(0, n_trials, [&](std::uint64_t t) {
    RandomStream stream(seed, t, stream_tag::iid_matrix);
    Eigen::MatrixXcd x(n_r, n_t);
    for (Eigen::Index col = 0; col < n_t; ++col) {
      fill_cvector(x.col(col), stream);
    }
    Eigen::MatrixXcd h = std::move(x);
    if (!rx_identity) {
      h = rx_root * h;
    }
    if (!tx_identity) {
      h = h * tx_root;
    }
    const Eigen::MatrixXcd d = (h * h.adjoint()) / static_cast<double>(n_t) - r_r.matrix();
    values[t] = d.squaredNorm();
  });
  const MeanSe stats = mean_and_se(values);
  check.empirical = stats.mean;
  check.std_error = stats.se;
  check.n_trials = n_trials;
  return check;
}

EmpiricalCdf equivalent_rayleigh_reference_cdf(const KeyholeGains& gains,
                                               const std::vector<CorrelationMatrix>& rx_corr,
                                               double snr, std::uint64_t n_trials,
                                               std::uint64_t seed) {
  check_trials(n_trials);
  const Eigen::Index m = gains.count();
  if (rx_corr.size() != static_cast<std::size_t>(m)) {
    throw std::invalid_argument("rx_corr must have one entry per keyhole");
  }
  const Eigen::Index n_r = rx_corr.front().size();
  std::vector<Eigen::MatrixXcd> roots;
  std::vector<bool> identity;
  for (const CorrelationMatrix& r : rx_corr) {
    if (r.size() != n_r) {
      throw std::invalid_argument("rx_corr matrices must share one size");
    }
    roots.push_back(psd_sqrt(r).root);
    identity.push_back(r.matrix().isIdentity(0.0));
  }
  Eigen::MatrixXcd q = Eigen::MatrixXcd::Zero(m, m);
  for (Eigen::Index k = 0; k < m; ++k) {
    q(k, k) = std::norm(gains.amplitudes()(k));
  }
  std::vector<double> values(n_trials);
  parallel_for(0, n_trials, [&](std::uint64_t t) {
    Eigen::MatrixXcd h_r(n_r, m);
    Eigen::VectorXcd g(n_r);
    for (Eigen::Index k = 0; k < m; ++k) {
      RandomStream stream(seed, t, stream_tag::rx_reference + static_cast<std::uint32_t>(k));
      fill_cvector(g, stream);
      if (identity[static_cast<std::size_t>(k)]) {
        h_r.col(k) = g;
      } else {
        h_r.col(k).noalias() = roots[static_cast<std::size_t>(k)] * g;
      }
    }
    values[t] = equivalent_rayleigh_capacity(h_r, q, snr, n_r);
  });
  return EmpiricalCdf(std::move(values));
}

SweepResult theorem1_sweep(const KeyholeGains& gains,
                           const std::vector<CorrelationMatrix>& rx_corr, double snr,
                           const std::vector<Eigen::Index>& n_t_list,
                           const std::function<CorrelationMatrix(Eigen::Index)>& tx_model,
                           std::uint64_t n_trials, std::uint64_t seed) {
  check_trials(n_trials);
  if (n_t_list.empty()) {
    throw std::invalid_argument("n_t_list must be non-empty");
  }
  if (rx_corr.empty()) {
    throw std::invalid_argument("rx_corr must be non-empty");
  }
  const Eigen::Index n_r = rx_corr.front().size();

  const EmpiricalCdf reference = equivalent_rayleigh_reference_cdf(
      gains, rx_corr, snr, n_trials, derive_seed(seed, kReferenceSeedSalt));

  SweepResult result;
  result.n_trials = n_trials;
  result.seed = seed;
  result.note =
      "reference: Rx-correlated equivalent-Rayleigh channel with Tx covariance Q = A A^H; "
      "Tx-side correlation is not applied to the reference";
  for (Eigen::Index n_t : n_t_list) {
    const CorrelationMatrix tx = tx_model(n_t);
    if (tx.size() != n_t) {
      throw std::invalid_argument("tx_model must return an n_t x n_t matrix");
    }
    ChannelSpec spec{n_t, n_r, gains,
                     std::vector<CorrelationMatrix>(static_cast<std::size_t>(gains.count()), tx),
                     rx_corr, snr};
    const CapacitySamples samples = monte_carlo_capacity(spec, n_trials, seed);
    result.parameters.push_back(static_cast<double>(n_t));
    result.metrics.push_back(ks_distance(EmpiricalCdf(samples.values), reference));
    result.std_errors.push_back(ks_standard_error(samples.values.size(), reference.size()));
  }
  return result;
}

SweepResult theorem2_sweep(const CorrelationMatrix& r_t, const CorrelationMatrix& r_r, double snr,
                           const std::vector<Eigen::Index>& m_list, std::uint64_t n_trials,
                           std::uint64_t seed) {
  check_trials(n_trials);
  if (m_list.empty()) {
    throw std::invalid_argument("m_list must be non-empty");
  }
  const Eigen::Index n_t = r_t.size();
  const Eigen::Index n_r = r_r.size();

  const EmpiricalCdf reference =
      monte_carlo_cdf(RayleighSpec{r_t, r_r, snr}, n_trials, derive_seed(seed, kReferenceSeedSalt));

  SweepResult result;
  result.n_trials = n_trials;
  result.seed = seed;
  result.note =
      "points with M >= n_t use the exact Wishart reparameterization of the equal-gain channel";
  for (Eigen::Index m : m_list) {
    if (m < 1) {
      throw std::invalid_argument("keyhole counts must be >= 1");
    }
    const KeyholeGains gains = KeyholeGains::equal(m);
    std::vector<double> values;
    if (m >= n_t) {
      values = wishart_capacity_samples(n_t, n_r, m, r_t, r_r, snr, n_trials, seed);
    } else {
      const ChannelSpec spec = make_shared_corr_spec(n_t, n_r, gains, r_t, r_r, snr);
      values = monte_carlo_capacity(spec, n_trials, seed).values;
    }
    result.parameters.push_back(static_cast<double>(m));
    result.metrics.push_back(ks_distance(EmpiricalCdf(std::move(values)), reference));
    result.std_errors.push_back(ks_standard_error(n_trials, reference.size()));
    result.aux.push_back(gain_diagnostics(gains).cube_sum);
  }
  return result;
}

SweepResult telatar_sweep(Eigen::Index n_t, Eigen::Index n_r, const KeyholeGains& gains,
                          const std::vector<CorrelationMatrix>& rx_corr, double snr, double rate,
                          const std::vector<Eigen::Index>& k_list, std::uint64_t n_trials,
                          std::uint64_t seed) {
  check_trials(n_trials);
  if (k_list.empty()) {
    throw std::invalid_argument("k_list must be non-empty");
  }
  for (Eigen::Index k : k_list) {
    if (k < 1 || k > n_t) {
      throw std::invalid_argument("active-antenna counts must lie in [1, n_t]");
    }
  }
  if (!std::isfinite(rate)) {
    throw std::invalid_argument("rate must be finite");
  }
  const Eigen::Index m = gains.count();
  ChannelSpec spec{n_t,
                   n_r,
                   gains,
                   std::vector<CorrelationMatrix>(static_cast<std::size_t>(m),
                                                  make_corr(CorrKind::identity, n_t, 0.0)),
                   rx_corr,
                   snr};
  const KeyholeSampler sampler(std::move(spec));

  // Evaluate every requested k plus (internally) k = n_t for the validity
  // warning. Q* = (n_t/k) diag(1..1,0..0) turns the Tx Gram into a scaled
  // prefix Gram, so all k share one pass over the rows of h_t.
  std::vector<Eigen::Index> eval_ks = k_list;
  if (std::find(eval_ks.begin(), eval_ks.end(), n_t) == eval_ks.end()) {
    eval_ks.push_back(n_t);
  }
  const std::size_t n_eval = eval_ks.size();
  std::vector<Eigen::Index> sorted_ks = eval_ks;
  std::sort(sorted_ks.begin(), sorted_ks.end());
  sorted_ks.erase(std::unique(sorted_ks.begin(), sorted_ks.end()), sorted_ks.end());

  const Eigen::MatrixXcd aa =
      gains.amplitudes() * gains.amplitudes().adjoint();  // a a^H, M x M
  std::vector<unsigned char> outage(static_cast<std::size_t>(n_trials) * n_eval);
  parallel_for(0, n_trials, [&](std::uint64_t t) {
    const KeyholeSampler::Factors f = sampler.sample_factors(seed, t);
    const Eigen::MatrixXcd b_r = (f.h_r.adjoint() * f.h_r) / static_cast<double>(n_r);
    std::map<Eigen::Index, Eigen::MatrixXcd> prefix;
    Eigen::MatrixXcd gram = Eigen::MatrixXcd::Zero(m, m);
    std::size_t next = 0;
    for (Eigen::Index row = 0; row < n_t && next < sorted_ks.size(); ++row) {
      gram.noalias() += f.h_t.row(row).adjoint() * f.h_t.row(row);
      if (row + 1 == sorted_ks[next]) {
        prefix.emplace(row + 1, gram);
        ++next;
      }
    }
    for (std::size_t e = 0; e < n_eval; ++e) {
      const Eigen::Index k = eval_ks[e];
      // b_t under Q* is the k-row prefix Gram divided by k.
      const Eigen::MatrixXcd b_t = prefix.at(k) / static_cast<double>(k);
      const Eigen::MatrixXcd inner =
          Eigen::MatrixXcd::Identity(m, m) + snr * (b_t.cwiseProduct(aa) * b_r);
      const double capacity = std::log(std::abs(inner.determinant()));
      outage[static_cast<std::size_t>(t) * n_eval + e] = capacity < rate ? 1 : 0;
    }
  });

  SweepResult result;
  result.n_trials = n_trials;
  result.seed = seed;
  result.note = "Tx covariance concentrates power on the first k antennas; all k share the "
                "same channel draws per trial";
  double p_full = 0.0;
  for (std::size_t e = 0; e < n_eval; ++e) {
    std::uint64_t count = 0;
    for (std::uint64_t t = 0; t < n_trials; ++t) {
      count += outage[static_cast<std::size_t>(t) * n_eval + e];
    }
    const double p = static_cast<double>(count) / static_cast<double>(n_trials);
    if (eval_ks[e] == n_t) {
      p_full = p;
    }
    if (e < k_list.size()) {
      result.parameters.push_back(static_cast<double>(eval_ks[e]));
      result.metrics.push_back(p);
      result.std_errors.push_back(std::sqrt(p * (1.0 - p) / static_cast<double>(n_trials)));
      result.aux.push_back(1.0 / std::sqrt(static_cast<double>(eval_ks[e])));
    }
  }
  result.argmin = static_cast<std::size_t>(
      std::min_element(result.metrics.begin(), result.metrics.end()) - result.metrics.begin());
  if (p_full >= 0.5) {
    result.warning = "outage probability at k = n_t is at least 1/2; the minimizer claim "
                     "applies below 1/2";
  }
  return result;
}

double telatar_rate_for_epsilon(Eigen::Index n_t, Eigen::Index n_r, Eigen::Index m, double snr,
                                double eps) {
  if (n_t < 1 || n_r < 1 || m < 1) {
    throw std::invalid_argument("n_t, n_r, and m must be >= 1");
  }
  GaussianApprox approx;
  if (m < std::min(n_t, n_r)) {
    const std::vector<double> psi_t(static_cast<std::size_t>(m),
                                    1.0 / static_cast<double>(n_t));
    const std::vector<double> psi_r(static_cast<std::size_t>(m),
                                    1.0 / static_cast<double>(n_r));
    approx = rdmk_moments(KeyholeGains::equal(m), psi_t, psi_r, snr, Regime::exact);
  } else {
    approx = frmk_moments(make_corr(CorrKind::identity, n_t, 0.0),
                          make_corr(CorrKind::identity, n_r, 0.0), snr, n_t, n_r, Regime::exact);
  }
  return approx.mu - std::sqrt(approx.sigma2) * q_inverse(eps);
}

GaussianityCheck frmk_gaussianity(const CorrelationMatrix& r_t, const CorrelationMatrix& r_r,
                                  Eigen::Index m, double snr, std::uint64_t n_trials,
                                  std::uint64_t seed) {
  check_trials(n_trials);
  if (m < 1) {
    throw std::invalid_argument("m must be >= 1");
  }
  const Eigen::Index n_t = r_t.size();
  const Eigen::Index n_r = r_r.size();
  GaussianityCheck check;
  check.approx = frmk_moments(r_t, r_r, snr, n_t, n_r, Regime::exact);
  check.n_trials = n_trials;
  std::vector<double> values;
  if (m >= n_t) {
    values = wishart_capacity_samples(n_t, n_r, m, r_t, r_r, snr, n_trials, seed);
  } else {
    const ChannelSpec spec = make_shared_corr_spec(n_t, n_r, KeyholeGains::equal(m), r_t, r_r, snr);
    values = monte_carlo_capacity(spec, n_trials, seed).values;
  }
  check.ks = ks_distance(EmpiricalCdf(std::move(values)), gaussian_cdf(check.approx));
  return check;
}

GaussianityCheck rdmk_gaussianity(const ChannelSpec& spec, std::uint64_t n_trials,
                                  std::uint64_t seed) {
  check_trials(n_trials);
  validate_spec(spec);
  std::vector<double> psi_t, psi_r;
  for (const CorrelationMatrix& r : spec.tx_corr) {
    psi_t.push_back(psi_measure(r));
  }
  for (const CorrelationMatrix& r : spec.rx_corr) {
    psi_r.push_back(psi_measure(r));
  }
  GaussianityCheck check;
  check.approx = rdmk_moments(spec.gains, psi_t, psi_r, spec.snr, Regime::exact);
  check.n_trials = n_trials;
  const CapacitySamples samples = monte_carlo_capacity(spec, n_trials, seed);
  check.ks = ks_distance(EmpiricalCdf(samples.values), gaussian_cdf(check.approx));
  return check;
}

}  // namespace mkmimo
