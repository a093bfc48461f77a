#pragma once

#include <complex>

#include <Eigen/Dense>

namespace qgp {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

namespace numerics {

/// Eigenpairs of a Hermitian matrix; eigenvalues ascending, eigenvectors as
/// orthonormal columns in the same order.
template <typename Matrix>
struct EigenDecomposition {
  RealVector eigenvalues;
  Matrix eigenvectors;
};

struct CholeskyFactor {
  RealMatrix lower;
  double logdet = 0.0;
};

double max_abs(const ComplexMatrix& a);
double max_abs(const RealMatrix& a);

/// Symmetry check |A_ij - conj(A_ji)| <= rel_tol * max|A|.
bool is_hermitian(const ComplexMatrix& a, double rel_tol = 1e-12);
bool is_symmetric(const RealMatrix& a, double rel_tol = 1e-12);

EigenDecomposition<ComplexMatrix> eigh(const ComplexMatrix& a);
EigenDecomposition<RealMatrix> eigh(const RealMatrix& a);

/// Lower Cholesky factor with log|K| = 2 sum log L_ii.
/// Throws NotPositiveDefinite when a pivot is not strictly positive.
CholeskyFactor cholesky_logdet(const RealMatrix& k);

/// Solves L L^T x = y given the lower factor.
RealVector cholesky_solve(const RealMatrix& lower, const RealVector& y);
RealMatrix cholesky_solve(const RealMatrix& lower, const RealMatrix& y);

RealVector solve_psd(const RealMatrix& k, const RealVector& y);

// Hermitian PSD square root through the eigendecomposition. Eigenvalues within
// 1e-10 * lambda_max of zero are clamped to zero.
RealMatrix psd_sqrt(const RealMatrix& k);
ComplexMatrix psd_sqrt(const ComplexMatrix& k);

/// lambda_max / lambda_min, where lambda_min is the smallest eigenvalue above
/// 1e-14 * lambda_max. Returns +inf when no such eigenvalue exists.
double condition_number(const RealMatrix& a);
double condition_number(const ComplexMatrix& a);
double condition_number(const RealVector& ascending_eigenvalues);

}  // namespace numerics
}  // namespace qgp
