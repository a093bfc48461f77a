#pragma once

// Approximate quantum compiling: fit a fixed-CNOT-budget parameterized
// circuit to a target unitary under the phase-aware Frobenius distance.

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "json.hpp"
#include "qgp/numerics.hpp"
#include "qgp/qcircuit.hpp"

namespace qgp::aqc {

/// ceil((4^n - 3n - 1) / 4): CNOTs needed for a generic n-qubit unitary.
std::int64_t cnot_lower_bound(int n);

/// min over phi of ||V - e^{i phi} U||_F = sqrt(2d - 2|Tr(V^dagger U)|).
double frobenius_distance(const ComplexMatrix& v, const ComplexMatrix& u);

struct AnsatzSpec {
  int width = 1;
  int cnot_budget = 0;
  /// (control, target) pairs used round-robin; empty means the linear chain.
  std::vector<std::pair<int, int>> connectivity;

  static AnsatzSpec linear(int width, int cnot_budget);
  int parameter_count() const { return 3 * width + 4 * cnot_budget; }
  std::pair<int, int> pair_for_block(int block) const;
};

// Initial RZ-RY-RZ on every qubit, then per CNOT block: CNOT on the next pair,
// followed by RY, RZ on the control and RY, RZ on the target.
qc::Circuit build_ansatz(const AnsatzSpec& spec, std::span<const double> parameters);

/// Unitary of build_ansatz(spec, parameters), evaluated without building a Circuit.
ComplexMatrix ansatz_unitary(const AnsatzSpec& spec, std::span<const double> parameters);

struct CompileOptions {
  int max_iters = 5000;       // gradient steps per restart
  double tolerance = 1e-6;    // converged when distance <= tolerance
  int restarts = 10;
  std::uint64_t seed = 0;
  double fd_step = 1e-6;
  bool record_trace = false;
};

struct CompilationResult {
  std::vector<double> parameters;
  qc::Circuit circuit{1};
  double distance = 0.0;
  int iterations = 0;
  int restarts_used = 0;
  bool converged = false;
  /// Best-so-far squared distance per accepted step of the winning restart
  /// (filled when CompileOptions::record_trace is set).
  std::vector<double> trace;
};

inline constexpr int kMaxCompileWidth = 6;

CompilationResult compile(const ComplexMatrix& target, const AnsatzSpec& spec,
                          const CompileOptions& opts = {});

struct QpeBlocks {
  /// One entry per power k in [0, n_l): compiled controlled-U^(2^k).
  std::vector<CompilationResult> blocks;
  /// blocks[k] replaces the exact block iff its distance <= tolerance.
  std::vector<bool> substituted;
  int state_qubits = 0;
  int depth_before = 0;
  int depth_after = 0;
  int two_qubit_before = 0;
  int two_qubit_after = 0;
  std::int64_t cnot_cost_before = 0;
  std::int64_t cnot_cost_after = 0;

  /// Circuit overrides for build_qpe (empty where the exact block is kept).
  std::vector<std::optional<qc::Circuit>> overrides() const;
};

/// Compiles every controlled e^{iAt 2^k} block of an n_l-qubit QPE. Block
/// circuits act on (state qubits..., control) with the control last.
QpeBlocks compile_qpe_blocks(const ComplexMatrix& a, double t, int n_l, const AnsatzSpec& spec,
                             const CompileOptions& opts = {});

nlohmann::json to_json(const CompilationResult& r);
nlohmann::json to_json(const QpeBlocks& q);

}  // namespace qgp::aqc
