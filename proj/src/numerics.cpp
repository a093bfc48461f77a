#include "qgp/numerics.hpp"

#include <cmath>
#include <limits>

#include "qgp/error.hpp"

namespace qgp::numerics {

namespace {

constexpr double kClampRel = 1e-10;
constexpr double kCondFloorRel = 1e-14;

template <typename Matrix>
EigenDecomposition<Matrix> eigh_impl(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::NoConvergence, "eigh: iteration budget exhausted");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

template <typename Matrix>
Matrix psd_sqrt_impl(const Matrix& k) {
  auto ed = eigh(k);
  const Eigen::Index n = ed.eigenvalues.size();
  const double lmax = ed.eigenvalues(n - 1);
  const double lmin = ed.eigenvalues(0);
  const double tol = kClampRel * std::max(std::abs(lmax), 0.0);
  if (lmin < -tol) {
    throw Error(ErrorCode::NotPSD, "psd_sqrt: minimum eigenvalue " + std::to_string(lmin) +
                                       " below tolerance");
  }
  RealVector root(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double lam = ed.eigenvalues(j);
    root(j) = lam <= tol ? 0.0 : std::sqrt(lam);
  }
  Matrix out = ed.eigenvectors * root.asDiagonal() * ed.eigenvectors.adjoint();
  // Symmetrize away rounding so the result is exactly Hermitian.
  Matrix sym = 0.5 * (out + out.adjoint());
  return sym;
}

}  // namespace

double max_abs(const ComplexMatrix& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }
double max_abs(const RealMatrix& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

bool is_hermitian(const ComplexMatrix& a, double rel_tol) {
  if (a.rows() != a.cols()) return false;
  const double tol = rel_tol * max_abs(a);
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = i; j < a.cols(); ++j)
      if (std::abs(a(i, j) - std::conj(a(j, i))) > tol) return false;
  return true;
}

bool is_symmetric(const RealMatrix& a, double rel_tol) {
  if (a.rows() != a.cols()) return false;
  const double tol = rel_tol * max_abs(a);
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = i + 1; j < a.cols(); ++j)
      if (std::abs(a(i, j) - a(j, i)) > tol) return false;
  return true;
}

EigenDecomposition<ComplexMatrix> eigh(const ComplexMatrix& a) {
  if (!is_hermitian(a)) throw Error(ErrorCode::NonHermitian, "eigh: matrix is not Hermitian");
  return eigh_impl(a);
}

EigenDecomposition<RealMatrix> eigh(const RealMatrix& a) {
  if (!is_symmetric(a)) throw Error(ErrorCode::NonHermitian, "eigh: matrix is not symmetric");
  return eigh_impl(a);
}

CholeskyFactor cholesky_logdet(const RealMatrix& k) {
  if (k.rows() != k.cols()) throw Error(ErrorCode::DimensionMismatch, "cholesky: matrix not square");
  if (!is_symmetric(k)) throw Error(ErrorCode::NonHermitian, "cholesky: matrix not symmetric");
  const Eigen::Index n = k.rows();
  CholeskyFactor out;
  out.lower = RealMatrix::Zero(n, n);
  RealMatrix& l = out.lower;
  for (Eigen::Index j = 0; j < n; ++j) {
    double pivot = k(j, j);
    for (Eigen::Index p = 0; p < j; ++p) pivot -= l(j, p) * l(j, p);
    if (!(pivot > 0.0)) {
      throw Error(ErrorCode::NotPositiveDefinite,
                  "cholesky: pivot " + std::to_string(j) + " is " + std::to_string(pivot));
    }
    const double d = std::sqrt(pivot);
    l(j, j) = d;
    out.logdet += 2.0 * std::log(d);
    for (Eigen::Index i = j + 1; i < n; ++i) {
      double s = k(i, j);
      for (Eigen::Index p = 0; p < j; ++p) s -= l(i, p) * l(j, p);
      l(i, j) = s / d;
    }
  }
  return out;
}

RealVector cholesky_solve(const RealMatrix& lower, const RealVector& y) {
  const Eigen::Index n = lower.rows();
  if (y.size() != n) throw Error(ErrorCode::DimensionMismatch, "cholesky_solve: rhs length");
  RealVector z(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double s = y(i);
    for (Eigen::Index p = 0; p < i; ++p) s -= lower(i, p) * z(p);
    z(i) = s / lower(i, i);
  }
  RealVector x(n);
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    double s = z(i);
    for (Eigen::Index p = i + 1; p < n; ++p) s -= lower(p, i) * x(p);
    x(i) = s / lower(i, i);
  }
  return x;
}

RealMatrix cholesky_solve(const RealMatrix& lower, const RealMatrix& y) {
  RealMatrix out(y.rows(), y.cols());
  for (Eigen::Index c = 0; c < y.cols(); ++c) out.col(c) = cholesky_solve(lower, RealVector(y.col(c)));
  return out;
}

RealVector solve_psd(const RealMatrix& k, const RealVector& y) {
  return cholesky_solve(cholesky_logdet(k).lower, y);
}

RealMatrix psd_sqrt(const RealMatrix& k) { return psd_sqrt_impl(k); }
ComplexMatrix psd_sqrt(const ComplexMatrix& k) { return psd_sqrt_impl(k); }

double condition_number(const RealVector& ev) {
  if (ev.size() == 0) throw Error(ErrorCode::ZeroMatrix, "condition_number: empty matrix");
  const double lmax = ev(ev.size() - 1);
  if (!(lmax > 0.0)) throw Error(ErrorCode::ZeroMatrix, "condition_number: lambda_max is zero");
  for (Eigen::Index j = 0; j < ev.size(); ++j) {
    if (ev(j) > kCondFloorRel * lmax) return lmax / ev(j);
  }
  return std::numeric_limits<double>::infinity();
}

double condition_number(const RealMatrix& a) { return condition_number(eigh(a).eigenvalues); }
double condition_number(const ComplexMatrix& a) { return condition_number(eigh(a).eigenvalues); }

}  // namespace qgp::numerics
