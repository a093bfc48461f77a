#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "qgp/numerics.hpp"

namespace testing {

using qgp::ComplexMatrix;
using qgp::ComplexVector;
using qgp::RealMatrix;
using qgp::RealVector;
using qgp::cplx;

inline RealMatrix random_real(int r, int c, std::mt19937_64& g) {
  std::normal_distribution<double> n;
  RealMatrix m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = n(g);
  return m;
}

inline RealVector random_vec(int n, std::mt19937_64& g) { return random_real(n, 1, g).col(0); }

inline ComplexMatrix random_complex(int r, int c, std::mt19937_64& g) {
  return random_real(r, c, g).cast<cplx>() + cplx(0, 1) * random_real(r, c, g).cast<cplx>();
}

inline RealMatrix random_spd(int n, std::mt19937_64& g, double shift = 1.0) {
  const RealMatrix a = random_real(n, n, g);
  return a.transpose() * a + shift * RealMatrix::Identity(n, n);
}

inline ComplexMatrix random_hermitian(int n, std::mt19937_64& g) {
  const ComplexMatrix a = random_complex(n, n, g);
  return 0.5 * (a + a.adjoint());
}

// Haar-ish unitary from QR with phase fix.
inline ComplexMatrix random_unitary(int n, std::mt19937_64& g) {
  Eigen::HouseholderQR<ComplexMatrix> qr(random_complex(n, n, g));
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < n; ++i) q.col(i) *= r(i, i) / std::abs(r(i, i));
  return q;
}

inline ComplexMatrix random_su(int n, std::mt19937_64& g) {
  ComplexMatrix u = random_unitary(n, g);
  const cplx d = u.determinant();
  return u * std::pow(d, -1.0 / n);
}

// Orthogonal Q with prescribed spectrum: Q diag(ev) Q^T.
inline RealMatrix with_spectrum(const RealVector& ev, std::mt19937_64& g) {
  const int n = static_cast<int>(ev.size());
  Eigen::HouseholderQR<RealMatrix> qr(random_real(n, n, g));
  const RealMatrix q = qr.householderQ();
  return q * ev.asDiagonal() * q.transpose();
}

// Full-register matrix of a block `u` acting on `qubits` (local bit i ->
// qubits[i]) and active only where all `controls` are 1. Direct definition
// by matrix elements, independent of the simulator kernels.
inline ComplexMatrix embed(int width, const ComplexMatrix& u, const std::vector<int>& qubits,
                           const std::vector<int>& controls = {}) {
  const std::uint64_t dim = std::uint64_t{1} << width;
  std::uint64_t mask = 0, cmask = 0;
  for (int q : qubits) mask |= std::uint64_t{1} << q;
  for (int c : controls) cmask |= std::uint64_t{1} << c;
  auto local = [&](std::uint64_t x) {
    std::uint64_t l = 0;
    for (std::size_t i = 0; i < qubits.size(); ++i) l |= ((x >> qubits[i]) & 1u) << i;
    return l;
  };
  ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
  for (std::uint64_t i = 0; i < dim; ++i)
    for (std::uint64_t j = 0; j < dim; ++j) {
      if ((i & ~mask) != (j & ~mask)) continue;
      if ((i & cmask) != cmask) {
        if (i == j) m(i, j) = 1.0;
        continue;
      }
      m(i, j) = u(local(i), local(j));
    }
  return m;
}

inline ComplexMatrix mat2(cplx a, cplx b, cplx c, cplx d) {
  ComplexMatrix m(2, 2);
  m << a, b, c, d;
  return m;
}

inline ComplexMatrix ry_matrix(double t) {
  return mat2(std::cos(t / 2), -std::sin(t / 2), std::sin(t / 2), std::cos(t / 2));
}

inline ComplexMatrix rz_matrix(double t) {
  return mat2(std::polar(1.0, -t / 2), 0.0, 0.0, std::polar(1.0, t / 2));
}

inline double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace testing
