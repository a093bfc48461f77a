#include "qgp/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace qgp::kernels {

namespace {

using Index = std::int64_t;

// Below this many inner iterations a parallel region costs more than it saves.
constexpr Index kParallelMin = 1 << 12;

// Spreads the bits of `counter` over the positions not in `sorted_zero_bits`,
// leaving those positions zero.
inline Index insert_zero_bits(Index counter, std::span<const int> sorted_zero_bits) {
  for (int b : sorted_zero_bits) {
    const Index low = counter & ((Index{1} << b) - 1);
    counter = ((counter >> b) << (b + 1)) | low;
  }
  return counter;
}

inline Index mask_of(std::span<const int> qubits) {
  Index m = 0;
  for (int q : qubits) m |= Index{1} << q;
  return m;
}

std::vector<int> sorted_union(std::span<const int> a, std::span<const int> b) {
  std::vector<int> out(a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

void apply_1q(std::span<cplx> state, int target, const Mat2& m) {
  const Index half = static_cast<Index>(state.size()) / 2;
  const int bits[1] = {target};
  const Index stride = Index{1} << target;
#pragma omp parallel for schedule(static) if (half > kParallelMin)
  for (Index c = 0; c < half; ++c) {
    const Index i0 = insert_zero_bits(c, bits);
    const Index i1 = i0 | stride;
    const cplx a0 = state[i0];
    const cplx a1 = state[i1];
    state[i0] = m[0] * a0 + m[1] * a1;
    state[i1] = m[2] * a0 + m[3] * a1;
  }
}

void apply_controlled_1q(std::span<cplx> state, int control, int target, const Mat2& m) {
  const Index quarter = static_cast<Index>(state.size()) / 4;
  const int lo = std::min(control, target);
  const int hi = std::max(control, target);
  const int bits[2] = {lo, hi};
  const Index cbit = Index{1} << control;
  const Index tbit = Index{1} << target;
#pragma omp parallel for schedule(static) if (quarter > kParallelMin)
  for (Index c = 0; c < quarter; ++c) {
    const Index i0 = insert_zero_bits(c, bits) | cbit;
    const Index i1 = i0 | tbit;
    const cplx a0 = state[i0];
    const cplx a1 = state[i1];
    state[i0] = m[0] * a0 + m[1] * a1;
    state[i1] = m[2] * a0 + m[3] * a1;
  }
}

void apply_cphase(std::span<cplx> state, int control, int target, double angle) {
  const Index quarter = static_cast<Index>(state.size()) / 4;
  const int lo = std::min(control, target);
  const int hi = std::max(control, target);
  const int bits[2] = {lo, hi};
  const Index both = (Index{1} << control) | (Index{1} << target);
  const cplx phase = std::polar(1.0, angle);
#pragma omp parallel for schedule(static) if (quarter > kParallelMin)
  for (Index c = 0; c < quarter; ++c) {
    state[insert_zero_bits(c, bits) | both] *= phase;
  }
}

void apply_swap(std::span<cplx> state, int a, int b) {
  const Index quarter = static_cast<Index>(state.size()) / 4;
  const int bits[2] = {std::min(a, b), std::max(a, b)};
  const Index abit = Index{1} << a;
  const Index bbit = Index{1} << b;
#pragma omp parallel for schedule(static) if (quarter > kParallelMin)
  for (Index c = 0; c < quarter; ++c) {
    const Index base = insert_zero_bits(c, bits);
    std::swap(state[base | abit], state[base | bbit]);
  }
}

void apply_block(std::span<cplx> state, std::span<const int> qubits, const ComplexMatrix& u,
                 std::span<const int> controls) {
  const int k = static_cast<int>(qubits.size());
  const Index dim = Index{1} << k;
  const std::vector<int> fixed = sorted_union(qubits, controls);
  const Index groups = static_cast<Index>(state.size()) >> fixed.size();
  const Index cmask = mask_of(controls);

  std::vector<Index> offsets(dim);
  for (Index local = 0; local < dim; ++local) {
    Index off = 0;
    for (int i = 0; i < k; ++i)
      if ((local >> i) & 1) off |= Index{1} << qubits[i];
    offsets[local] = off;
  }

#pragma omp parallel if (groups * dim > kParallelMin)
  {
    std::vector<cplx> in(dim);
#pragma omp for schedule(static)
    for (Index g = 0; g < groups; ++g) {
      const Index base = insert_zero_bits(g, fixed) | cmask;
      for (Index c = 0; c < dim; ++c) in[c] = state[base | offsets[c]];
      for (Index r = 0; r < dim; ++r) {
        cplx acc = 0.0;
        for (Index c = 0; c < dim; ++c) acc += u(r, c) * in[c];
        state[base | offsets[r]] = acc;
      }
    }
  }
}

void apply_multiplexed_ry(std::span<cplx> state, std::span<const int> controls, int target,
                          std::span<const double> angles) {
  const int k = static_cast<int>(controls.size());
  const int t[1] = {target};
  const std::vector<int> fixed = sorted_union(controls, t);
  const Index groups = static_cast<Index>(state.size()) >> fixed.size();
  const Index regs = Index{1} << k;
  const Index tbit = Index{1} << target;

  std::vector<Index> offsets(regs);
  for (Index r = 0; r < regs; ++r) {
    Index off = 0;
    for (int i = 0; i < k; ++i)
      if ((r >> i) & 1) off |= Index{1} << controls[i];
    offsets[r] = off;
  }
  std::vector<double> cs(regs), sn(regs);
  for (Index r = 0; r < regs; ++r) {
    cs[r] = std::cos(0.5 * angles[r]);
    sn[r] = std::sin(0.5 * angles[r]);
  }

#pragma omp parallel for collapse(2) schedule(static) if (groups * regs > kParallelMin)
  for (Index g = 0; g < groups; ++g) {
    for (Index r = 0; r < regs; ++r) {
      if (angles[r] == 0.0) continue;
      const Index i0 = insert_zero_bits(g, fixed) | offsets[r];
      const Index i1 = i0 | tbit;
      const cplx a0 = state[i0];
      const cplx a1 = state[i1];
      state[i0] = cs[r] * a0 - sn[r] * a1;
      state[i1] = sn[r] * a0 + cs[r] * a1;
    }
  }
}

double norm_squared(std::span<const cplx> state) {
  const Index n = static_cast<Index>(state.size());
  double s = 0.0;
#pragma omp parallel for reduction(+ : s) schedule(static) if (n > kParallelMin)
  for (Index i = 0; i < n; ++i) s += std::norm(state[i]);
  return s;
}

namespace serial {

namespace {

inline bool bit(Index i, int q) { return (i >> q) & 1; }

}  // namespace

void apply_1q(std::span<cplx> state, int target, const Mat2& m) {
  std::vector<cplx> out(state.begin(), state.end());
  for (Index i = 0; i < static_cast<Index>(state.size()); ++i) {
    const Index partner = i ^ (Index{1} << target);
    const int row = bit(i, target);
    const cplx self = state[i];
    const cplx other = state[partner];
    out[i] = row == 0 ? m[0] * self + m[1] * other : m[2] * other + m[3] * self;
  }
  std::copy(out.begin(), out.end(), state.begin());
}

void apply_controlled_1q(std::span<cplx> state, int control, int target, const Mat2& m) {
  std::vector<cplx> out(state.begin(), state.end());
  for (Index i = 0; i < static_cast<Index>(state.size()); ++i) {
    if (!bit(i, control)) continue;
    const Index partner = i ^ (Index{1} << target);
    const cplx self = state[i];
    const cplx other = state[partner];
    out[i] = bit(i, target) == 0 ? m[0] * self + m[1] * other : m[2] * other + m[3] * self;
  }
  std::copy(out.begin(), out.end(), state.begin());
}

void apply_cphase(std::span<cplx> state, int control, int target, double angle) {
  for (Index i = 0; i < static_cast<Index>(state.size()); ++i)
    if (bit(i, control) && bit(i, target)) state[i] *= std::exp(cplx(0.0, angle));
}

void apply_swap(std::span<cplx> state, int a, int b) {
  std::vector<cplx> out(state.size());
  for (Index i = 0; i < static_cast<Index>(state.size()); ++i) {
    Index j = i & ~((Index{1} << a) | (Index{1} << b));
    if (bit(i, a)) j |= Index{1} << b;
    if (bit(i, b)) j |= Index{1} << a;
    out[j] = state[i];
  }
  std::copy(out.begin(), out.end(), state.begin());
}

void apply_block(std::span<cplx> state, std::span<const int> qubits, const ComplexMatrix& u,
                 std::span<const int> controls) {
  const int k = static_cast<int>(qubits.size());
  std::vector<cplx> out(state.size());
  for (Index i = 0; i < static_cast<Index>(state.size()); ++i) {
    bool active = true;
    for (int c : controls) active = active && bit(i, c);
    if (!active) {
      out[i] = state[i];
      continue;
    }
    Index row = 0;
    Index cleared = i;
    for (int q = 0; q < k; ++q) {
      if (bit(i, qubits[q])) row |= Index{1} << q;
      cleared &= ~(Index{1} << qubits[q]);
    }
    cplx acc = 0.0;
    for (Index col = 0; col < (Index{1} << k); ++col) {
      Index j = cleared;
      for (int q = 0; q < k; ++q)
        if ((col >> q) & 1) j |= Index{1} << qubits[q];
      acc += u(row, col) * state[j];
    }
    out[i] = acc;
  }
  std::copy(out.begin(), out.end(), state.begin());
}

void apply_multiplexed_ry(std::span<cplx> state, std::span<const int> controls, int target,
                          std::span<const double> angles) {
  std::vector<cplx> out(state.size());
  for (Index i = 0; i < static_cast<Index>(state.size()); ++i) {
    Index r = 0;
    for (std::size_t q = 0; q < controls.size(); ++q)
      if (bit(i, controls[q])) r |= Index{1} << q;
    const double c = std::cos(0.5 * angles[r]);
    const double s = std::sin(0.5 * angles[r]);
    const Index partner = i ^ (Index{1} << target);
    out[i] = bit(i, target) == 0 ? c * state[i] - s * state[partner]
                                 : s * state[partner] + c * state[i];
  }
  std::copy(out.begin(), out.end(), state.begin());
}

double norm_squared(std::span<const cplx> state) {
  double s = 0.0;
  for (const cplx& a : state) s += std::norm(a);
  return s;
}

}  // namespace serial
}  // namespace qgp::kernels
