#pragma once

#include <Eigen/Dense>
#include <complex>

namespace mkmimo {

enum class CorrKind { identity, exponential, quadratic_exponential, uniform };

// An n x n Hermitian positive semi-definite matrix normalized to trace n
// (so the average per-antenna power is 1). Construction validates:
//   - exact Hermitian storage: entry(i,j) == conj(entry(j,i)) bitwise,
//   - trace equal to n within 1e-9 relative tolerance,
//   - smallest eigenvalue >= -1e-10 * largest eigenvalue.
class CorrelationMatrix {
 public:
  explicit CorrelationMatrix(Eigen::MatrixXcd entries);

  // Bypasses validation. For error-path tests and internal call sites where
  // the invariants hold by construction.
  static CorrelationMatrix unchecked(Eigen::MatrixXcd entries);

  Eigen::Index size() const { return entries_.rows(); }
  const Eigen::MatrixXcd& matrix() const { return entries_; }

 private:
  struct Unchecked {};
  CorrelationMatrix(Eigen::MatrixXcd entries, Unchecked);

  Eigen::MatrixXcd entries_;
};

// A correlation matrix paired with its Hermitian square root;
// root * root^H reproduces base within 1e-9 relative Frobenius error.
struct PsdSqrt {
  CorrelationMatrix base;
  Eigen::MatrixXcd root;
};

// Single-parameter correlation models:
//   identity               — uncorrelated; r is ignored.
//   exponential            — R(k,m) = r^(m-k) for m >= k, conj(r)^(k-m) below
//                            the diagonal; requires |r| < 1.
//   quadratic_exponential  — R(k,m) = r^((m-k)^2) with conjugate symmetry;
//                            requires |r| < 1. For complex r the kernel can
//                            be indefinite, in which case construction fails
//                            with a domain error.
//   uniform                — unit diagonal, every off-diagonal equal to r;
//                            requires real r in [0, 1).
CorrelationMatrix make_corr(CorrKind kind, Eigen::Index n, std::complex<double> r);

// Hermitian square root via eigendecomposition. Eigenvalues within
// [-1e-10 * lambda_max, 0] are clamped to zero; anything lower throws.
PsdSqrt psd_sqrt(const CorrelationMatrix& r);

// Hermitian PSD square root of a raw matrix (its Hermitian part is used).
// Same clamping rule with the given relative tolerance; throws a domain
// error when an eigenvalue falls below -rel_clamp * lambda_max.
Eigen::MatrixXcd hermitian_psd_sqrt(const Eigen::MatrixXcd& m, double rel_clamp = 1e-10);

// (m + m^H)/2, evaluated so the result is conjugate-symmetric bitwise.
Eigen::MatrixXcd hermitian_part(const Eigen::MatrixXcd& m);

}  // namespace mkmimo
