#include "mkmimo/corr_measure.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mkmimo {
namespace {

Ordering compare_measures(double m1, double m2) {
  const double tol = 1e-12 * std::max({1.0, m1, m2});
  if (m1 > m2 + tol) {
    return Ordering::greater;
  }
  if (m2 > m1 + tol) {
    return Ordering::less;
  }
  return Ordering::equivalent;
}

void check_same_size(const CorrelationMatrix& r1, const CorrelationMatrix& r2,
                     const char* caller) {
  if (r1.size() != r2.size()) {
    throw std::invalid_argument(std::string(caller) + " requires matrices of the same size");
  }
}

}  // namespace

CorrDecomposition decompose(const CorrelationMatrix& r) {
  const double n = static_cast<double>(r.size());
  CorrDecomposition d;
  d.k_part = r.matrix();
  d.p_part = r.matrix().diagonal().real().array() - 1.0;
  d.k_part.diagonal().setOnes();
  d.r_measure = r.matrix().norm() / n;
  d.k_measure = d.k_part.norm() / n;
  d.p_measure = d.p_part.norm() / n;
  return d;
}

Ordering more_correlated(const CorrelationMatrix& r1, const CorrelationMatrix& r2) {
  check_same_size(r1, r2, "more_correlated");
  return compare_measures(decompose(r1).k_measure, decompose(r2).k_measure);
}

Ordering more_imbalanced(const CorrelationMatrix& r1, const CorrelationMatrix& r2) {
  check_same_size(r1, r2, "more_imbalanced");
  return compare_measures(decompose(r1).p_measure, decompose(r2).p_measure);
}

bool majorizes(const CorrelationMatrix& r1, const CorrelationMatrix& r2) {
  check_same_size(r1, r2, "majorizes");
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> s1(r1.matrix(), Eigen::EigenvaluesOnly);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> s2(r2.matrix(), Eigen::EigenvaluesOnly);
  // Eigen sorts ascending; walk from the back for descending prefix sums.
  const Eigen::Index n = r1.size();
  double sum1 = 0.0;
  double sum2 = 0.0;
  for (Eigen::Index m = 0; m < n; ++m) {
    sum1 += s1.eigenvalues()(n - 1 - m);
    sum2 += s2.eigenvalues()(n - 1 - m);
    const double tol = 1e-12 * std::max(1.0, std::abs(sum2));
    if (sum1 < sum2 - tol) {
      return false;
    }
  }
  return true;
}

double exp_model_asymptotic_measure(Eigen::Index n, std::complex<double> r) {
  if (n < 1) {
    throw std::domain_error("exp_model_asymptotic_measure requires n >= 1");
  }
  const double abs2 = std::norm(r);
  if (abs2 >= 1.0) {
    throw std::domain_error("exp_model_asymptotic_measure requires |r| < 1");
  }
  return (1.0 + abs2) / ((1.0 - abs2) * static_cast<double>(n));
}

}  // namespace mkmimo
