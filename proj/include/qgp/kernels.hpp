#pragma once

// Statevector update kernels. Qubit 0 is the least significant bit of the
// basis index. Every kernel exists twice: the OpenMP version used by the
// simulator and a straightforward serial version kept as the test reference.

#include <array>
#include <span>

#include "qgp/numerics.hpp"

namespace qgp::kernels {

/// Row-major 2x2 matrix {m00, m01, m10, m11}.
using Mat2 = std::array<cplx, 4>;

void apply_1q(std::span<cplx> state, int target, const Mat2& m);
void apply_controlled_1q(std::span<cplx> state, int control, int target, const Mat2& m);
void apply_cphase(std::span<cplx> state, int control, int target, double angle);
void apply_swap(std::span<cplx> state, int a, int b);

// Dense block on `qubits` (local bit i of the block index maps to qubits[i]),
// applied only where every qubit in `controls` is 1.
void apply_block(std::span<cplx> state, std::span<const int> qubits, const ComplexMatrix& u,
                 std::span<const int> controls = {});

// RY(angles[r]) on `target` for each value r of the control register
// (local bit i of r maps to controls[i]).
void apply_multiplexed_ry(std::span<cplx> state, std::span<const int> controls, int target,
                          std::span<const double> angles);

double norm_squared(std::span<const cplx> state);

namespace serial {

void apply_1q(std::span<cplx> state, int target, const Mat2& m);
void apply_controlled_1q(std::span<cplx> state, int control, int target, const Mat2& m);
void apply_cphase(std::span<cplx> state, int control, int target, double angle);
void apply_swap(std::span<cplx> state, int a, int b);
void apply_block(std::span<cplx> state, std::span<const int> qubits, const ComplexMatrix& u,
                 std::span<const int> controls = {});
void apply_multiplexed_ry(std::span<cplx> state, std::span<const int> controls, int target,
                          std::span<const double> angles);
double norm_squared(std::span<const cplx> state);

}  // namespace serial
}  // namespace qgp::kernels
