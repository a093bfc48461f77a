#pragma once

// HHL pipeline: Hamiltonian-evolution unitary, phase estimation, eigenvalue
// inversion, post-selection, and the quadratic-form estimator y^T K^-1 y.
//
// Register layout of an HHL circuit (qubit 0 least significant):
//   [0, n_b)              system register |b>
//   [n_b, n_b + n_l)      evaluation register, bit k controls U^(2^k)
//   n_b + n_l             ancilla, measured into classical bit 0

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "qgp/aqc.hpp"
#include "qgp/numerics.hpp"
#include "qgp/qcircuit.hpp"

namespace qgp::hhl {

enum class BackendKind { ExactStatevector, Sampled };
enum class RescaleMode { Exact, Dmin };

const char* to_string(BackendKind b) noexcept;
const char* to_string(RescaleMode m) noexcept;
RescaleMode parse_rescale_mode(const std::string& s);

struct AqcPassthrough {
  int cnot_budget = 3;
  aqc::CompileOptions options{};
};

struct HHLConfig {
  int eval_qubits_cap = 8;
  /// Fixed evaluation-register size; sized from the condition number when unset.
  std::optional<int> eval_qubits;
  /// Evolution time t; defaults to 2 pi (1 - 2^-n_l).
  std::optional<double> time_param;
  /// Inversion constant C; defaults to the smallest nonzero grid eigenvalue.
  std::optional<double> inversion_constant;
  /// Divisor s applied to A before phase estimation; defaults to
  /// scale_headroom * lambda_max, which puts lambda_max on the top grid point.
  std::optional<double> eigenvalue_scale;
  double scale_headroom = 1.0;
  /// Register values whose eigenvalue is below filter_fraction * lambda_min
  /// (scaled) leave the ancilla untouched. 0 disables the filter.
  double filter_fraction = 0.9;
  BackendKind backend = BackendKind::ExactStatevector;
  std::uint64_t shots = 100000;
  std::uint64_t seed = 0;
  RescaleMode rescale = RescaleMode::Exact;
  std::optional<AqcPassthrough> aqc;

  void validate() const;
};

/// Maps evaluation-register values to (scaled) eigenvalues: m -> 2 pi m / (2^n_l t).
struct EigenvalueGrid {
  int n_l = 1;
  double time = 0.0;
  double eigenvalue(std::uint64_t m) const;
};

/// Everything build_hhl decided for one system.
struct HHLPlan {
  int n_b = 0;
  int n_l = 0;
  double scale = 1.0;        // A is divided by this before phase estimation
  double time = 0.0;
  double inversion_constant = 0.0;
  double cutoff = 0.0;       // scaled eigenvalue below which no rotation happens
  double condition_number = 1.0;
  bool aqc_used = false;
  int aqc_blocks_substituted = 0;
};

/// e^{iAt} = V diag(e^{i lambda_j t}) V^dagger.
ComplexMatrix evolution_unitary(const ComplexMatrix& a, double t);

qc::Circuit qft(int n);
qc::Circuit inverse_qft(int n);

/// QPE on `state_qubits` system qubits and n_l evaluation qubits placed above
/// them. `overrides[k]`, when present, replaces the controlled-U^(2^k) block;
/// its qubits are (system..., control).
qc::Circuit build_qpe(const ComplexMatrix& u, int n_l, int state_qubits,
                      const std::vector<std::optional<qc::Circuit>>& overrides = {});

/// Ancilla rotation on qubit n_l controlled by the n_l-qubit register [0, n_l):
/// |1> amplitude C / lambda~(m) for lambda~(m) >= max(cutoff, >0), else none.
qc::Circuit eigen_inversion_block(int n_l, double c, const EigenvalueGrid& grid, double cutoff = 0.0);

/// min(ceil(log2 kappa) + 1, cap).
int size_eval_register(double kappa, int cap);

/// Full HHL circuit for A x = b (A Hermitian, 2^n_b square, ||b|| = 1).
qc::Circuit build_hhl(const ComplexMatrix& a, const ComplexVector& b, const HHLConfig& cfg,
                      HHLPlan* plan = nullptr);

struct HHLSolve {
  double norm_squared = 0.0;        // estimate of ||A^-1 b||^2
  double success_probability = 0.0; // P(ancilla = 1)
  double standard_error = 0.0;      // of norm_squared; 0 on the exact backend
  ComplexVector solution_direction; // post-selected system state (exact backend)
  HHLPlan plan;
  int circuit_width = 0;
  int circuit_depth = 0;
  int two_qubit_count = 0;
  std::int64_t cnot_cost = 0;
};

/// Runs build_hhl and reads out ||A^-1 b||^2 = P(1) / (C^2 s^2).
HHLSolve solve(const ComplexMatrix& a, const ComplexVector& b, const HHLConfig& cfg);

struct HHLResult {
  double quadratic_form = 0.0;
  double standard_error = 0.0;
  double success_probability = 0.0;
  int eval_qubits_used = 0;
  int circuit_width = 0;
  int circuit_depth = 0;
  int two_qubit_count = 0;
  std::int64_t cnot_cost = 0;
  double condition_number_before = 0.0;
  double condition_number_after = 0.0;
  double rhs_scale = 0.0;           // factor multiplying ||x||^2 on the way back
  double eigenvalue_scale = 0.0;
  double inversion_constant = 0.0;
  double time_param = 0.0;
  BackendKind backend = BackendKind::ExactStatevector;
  RescaleMode rescale = RescaleMode::Exact;
  std::uint64_t shots = 0;
  int aqc_blocks_substituted = 0;
};

/// Jacobi scaling: returns D = diag(m_ii^-1/2) and D m D.
struct Conditioned {
  RealVector d;
  RealMatrix matrix;
};
Conditioned jacobi_condition(const RealMatrix& m);

/// Pads a Hermitian matrix with identity and a vector with zeros to the next
/// power of two.
ComplexMatrix pad_to_power_of_two(const ComplexMatrix& a);
ComplexVector pad_to_power_of_two(const ComplexVector& b);

/// y^T K^-1 y through HHL on the conditioned square root of K:
///   exact mode: K' = D K D (D from diag K), kappa' = sqrt(K'), rhs D y,
///               result = ||D y||^2 ||kappa'^-1 rhs^||^2 (an identity);
///   dmin mode:  kappa = sqrt(K), kappa' = D kappa D (D from diag kappa),
///               rhs y, result = ||y||^2 d_min ||kappa'^-1 y^||^2.
HHLResult quadratic_form(const RealMatrix& k, const RealVector& y, const HHLConfig& cfg);

nlohmann::json to_json(const HHLResult& r);
nlohmann::json to_json(const HHLConfig& c);

}  // namespace qgp::hhl
