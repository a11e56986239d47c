#pragma once

#include <complex>

#include <Eigen/Dense>

#include "mkmimo/corr_models.hpp"

namespace mkmimo {

// Norm-orthogonal split R = K + P of a normalized correlation matrix:
// K keeps the off-diagonal structure with a unit diagonal, and the real
// diagonal P = diag(R) - I carries the power imbalance across antennas.
// ‖R‖² = ‖K‖² + ‖P‖², so the two scalar measures below act on independent
// degrees of freedom.
struct CorrDecomposition {
  Eigen::MatrixXcd k_part;  // correlation component, unit diagonal
  Eigen::VectorXd p_part;   // diagonal of the power-imbalance component
  double r_measure = 0.0;   // ‖R‖_F / n, in [1/sqrt(n), 1]
  double k_measure = 0.0;   // ‖K‖_F / n, in [1/sqrt(n), 1]
  double p_measure = 0.0;   // ‖P‖_F / n, in [0, sqrt(1 - 1/n)]
};

enum class Ordering { less, equivalent, greater };

CorrDecomposition decompose(const CorrelationMatrix& r);

// Total orders induced by the scalar measures ‖K‖/n and ‖P‖/n.
Ordering more_correlated(const CorrelationMatrix& r1, const CorrelationMatrix& r2);
Ordering more_imbalanced(const CorrelationMatrix& r1, const CorrelationMatrix& r2);

// Eigenvalue majorization: every descending prefix sum of r1's spectrum
// dominates the matching prefix sum of r2's, ties tolerated at 1e-12 relative.
bool majorizes(const CorrelationMatrix& r1, const CorrelationMatrix& r2);

// Leading large-n term (1/n)(1+|r|^2)/(1-|r|^2) of the squared correlation
// measure n^-2 ‖R‖² of the exponential model; approximates psi_measure.
double exp_model_asymptotic_measure(Eigen::Index n, std::complex<double> r);

}  // namespace mkmimo
