#include "mkmimo/corr_models.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace mkmimo {
namespace {

using Complex = std::complex<double>;

// base^e by binary exponentiation; exact integer exponents keep the model
// matrices reproducible bit-for-bit across platforms.
Complex ipow(Complex base, std::uint64_t e) {
  Complex acc{1.0, 0.0};
  while (e != 0) {
    if (e & 1u) {
      acc *= base;
    }
    base *= base;
    e >>= 1;
  }
  return acc;
}

void check_hermitian_exact(const Eigen::MatrixXcd& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i <= j; ++i) {
      if (!(m(i, j) == std::conj(m(j, i)))) {
        throw std::domain_error("correlation matrix entries are not Hermitian at (" +
                                std::to_string(i) + ", " + std::to_string(j) + ")");
      }
    }
  }
}

}  // namespace

CorrelationMatrix::CorrelationMatrix(Eigen::MatrixXcd entries) : entries_(std::move(entries)) {
  const Eigen::Index n = entries_.rows();
  if (n == 0 || entries_.cols() != n) {
    throw std::domain_error("correlation matrix must be square and non-empty");
  }
  check_hermitian_exact(entries_);
  const double trace = entries_.trace().real();
  if (!(std::abs(trace - static_cast<double>(n)) <= 1e-9 * static_cast<double>(n))) {
    throw std::domain_error("correlation matrix trace " + std::to_string(trace) +
                            " deviates from n = " + std::to_string(n));
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(entries_, Eigen::EigenvaluesOnly);
  const double lambda_max = solver.eigenvalues().maxCoeff();
  const double lambda_min = solver.eigenvalues().minCoeff();
  if (lambda_min < -1e-10 * std::max(lambda_max, 0.0)) {
    throw std::domain_error("correlation matrix is not positive semi-definite (min eigenvalue " +
                            std::to_string(lambda_min) + ")");
  }
}

CorrelationMatrix::CorrelationMatrix(Eigen::MatrixXcd entries, Unchecked)
    : entries_(std::move(entries)) {}

CorrelationMatrix CorrelationMatrix::unchecked(Eigen::MatrixXcd entries) {
  return CorrelationMatrix(std::move(entries), Unchecked{});
}

CorrelationMatrix make_corr(CorrKind kind, Eigen::Index n, std::complex<double> r) {
  if (n <= 0) {
    throw std::domain_error("make_corr requires n >= 1");
  }
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(n, n);
  switch (kind) {
    case CorrKind::identity:
      break;
    case CorrKind::exponential:
    case CorrKind::quadratic_exponential: {
      if (!(std::abs(r) < 1.0)) {
        throw std::domain_error("make_corr requires |r| < 1 for the exponential models");
      }
      const bool quadratic = kind == CorrKind::quadratic_exponential;
      for (Eigen::Index row = 0; row < n; ++row) {
        for (Eigen::Index col = row + 1; col < n; ++col) {
          const std::uint64_t d = static_cast<std::uint64_t>(col - row);
          const Complex value = ipow(r, quadratic ? d * d : d);
          m(row, col) = value;
          m(col, row) = std::conj(value);
        }
      }
      break;
    }
    case CorrKind::uniform: {
      if (r.imag() != 0.0 || !(r.real() >= 0.0 && r.real() < 1.0)) {
        throw std::domain_error("make_corr requires real r in [0, 1) for the uniform model");
      }
      for (Eigen::Index row = 0; row < n; ++row) {
        for (Eigen::Index col = 0; col < n; ++col) {
          if (row != col) {
            m(row, col) = r.real();
          }
        }
      }
      break;
    }
  }
  return CorrelationMatrix(std::move(m));
}

PsdSqrt psd_sqrt(const CorrelationMatrix& r) {
  return PsdSqrt{r, hermitian_psd_sqrt(r.matrix())};
}

Eigen::MatrixXcd hermitian_psd_sqrt(const Eigen::MatrixXcd& m, double rel_clamp) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw std::invalid_argument("hermitian_psd_sqrt requires a square non-empty matrix");
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("hermitian_psd_sqrt: eigendecomposition failed");
  }
  Eigen::VectorXd lambda = solver.eigenvalues();
  const double tol = rel_clamp * std::max(lambda.maxCoeff(), 0.0);
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (lambda(i) < -tol) {
      throw std::domain_error("matrix is not positive semi-definite (eigenvalue " +
                              std::to_string(lambda(i)) + ")");
    }
    if (lambda(i) < 0.0) {
      lambda(i) = 0.0;
    }
  }
  const Eigen::MatrixXcd root =
      solver.eigenvectors() * lambda.cwiseSqrt().asDiagonal() * solver.eigenvectors().adjoint();
  return hermitian_part(root);
}

Eigen::MatrixXcd hermitian_part(const Eigen::MatrixXcd& m) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("hermitian_part requires a square matrix");
  }
  Eigen::MatrixXcd h(m.rows(), m.cols());
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    h(j, j) = Complex{m(j, j).real(), 0.0};
    for (Eigen::Index i = 0; i < j; ++i) {
      // (a + conj(b))/2 mirrored with an explicit conj is conjugate-symmetric
      // in IEEE arithmetic, which the CorrelationMatrix invariant relies on.
      const Complex v = (m(i, j) + std::conj(m(j, i))) * 0.5;
      h(i, j) = v;
      h(j, i) = std::conj(v);
    }
  }
  return h;
}

}  // namespace mkmimo
