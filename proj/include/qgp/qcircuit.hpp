#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"

#include "qgp/numerics.hpp"

namespace qgp::qc {

enum class GateKind {
  H,
  X,
  RX,
  RY,
  RZ,
  Phase,
  CNOT,
  CPhase,
  SWAP,
  Unitary,
  ControlledUnitary,
  MultiplexedRY,
  Measure,
};

const char* to_string(GateKind kind) noexcept;

// A gate is immutable once built; matrix payloads are shared between copies.
//
// Index conventions:
//   CNOT / CPhase          controls = {c}, qubits = {t}
//   SWAP                   qubits = {a, b}
//   Unitary                qubits[i] carries local bit i of the matrix index
//   ControlledUnitary      as Unitary, plus controls = {c}
//   MultiplexedRY          controls[i] carries bit i of the register value,
//                          qubits = {target}, one angle per register value
//   Measure                qubits = {q}, cbit = classical bit index
struct Gate {
  GateKind kind = GateKind::H;
  std::vector<int> qubits;
  std::vector<int> controls;
  double angle = 0.0;
  std::shared_ptr<const ComplexMatrix> matrix;
  std::shared_ptr<const std::vector<double>> angles;
  int cbit = -1;

  static Gate h(int q);
  static Gate x(int q);
  static Gate rx(int q, double theta);
  static Gate ry(int q, double theta);
  static Gate rz(int q, double theta);
  static Gate phase(int q, double theta);
  static Gate cnot(int control, int target);
  static Gate cphase(int control, int target, double theta);
  static Gate swap(int a, int b);
  static Gate unitary(ComplexMatrix u, std::vector<int> qubits);
  static Gate controlled_unitary(ComplexMatrix u, int control, std::vector<int> qubits);
  static Gate multiplexed_ry(std::vector<double> angles, std::vector<int> controls, int target);
  static Gate measure(int q, int cbit);

  /// All qubits the gate touches (controls included).
  std::vector<int> support() const;
  /// The inverse gate; throws InvalidArgument for Measure.
  Gate inverse() const;
  /// Same gate acting on relabelled qubits: new index = map[old index].
  Gate remapped(const std::vector<int>& map) const;
};

class Circuit {
 public:
  explicit Circuit(int width, int cbits = 0);

  int width() const noexcept { return width_; }
  int cbits() const noexcept { return cbits_; }
  const std::vector<Gate>& gates() const noexcept { return gates_; }

  /// Validates indices (distinct, in range) and unitarity of matrix payloads.
  Circuit& add(Gate g);
  /// Appends `other` with its qubit q placed on qubit_map[q].
  Circuit& append(const Circuit& other, const std::vector<int>& qubit_map);
  Circuit& append(const Circuit& other);
  Circuit& add_cbits(int n);

  /// Reversed gate order with each gate inverted.
  Circuit inverse() const;

  bool has_measurement() const;
  /// Layered depth: every gate occupies its support.
  int depth() const;
  /// Gates whose support is exactly two qubits.
  int two_qubit_count() const;
  /// Gates whose support exceeds two qubits (dense blocks, multiplexors).
  int multi_qubit_count() const;
  /// CNOT-equivalent cost: CNOT 1, CPhase 2, SWAP 3, dense k-qubit blocks and
  /// multiplexors counted at the generic lower bound for their width.
  std::int64_t cnot_cost() const;

 private:
  int width_;
  int cbits_;
  std::vector<Gate> gates_;
};

class Statevector {
 public:
  /// |index> on `width` qubits.
  static Statevector basis(int width, std::uint64_t index = 0);
  /// Takes amplitudes as given; throws InvalidArgument unless normalized to 1e-10
  /// and of power-of-two length.
  static Statevector from_amplitudes(ComplexVector amplitudes);

  int width() const noexcept { return width_; }
  const ComplexVector& amplitudes() const noexcept { return amps_; }
  ComplexVector& amplitudes() noexcept { return amps_; }
  std::span<cplx> span() noexcept { return {amps_.data(), static_cast<std::size_t>(amps_.size())}; }
  double norm_squared() const;
  /// Probability that `qubit` reads `value`.
  double probability(int qubit, int value) const;

 private:
  Statevector(int width, ComplexVector amps) : width_(width), amps_(std::move(amps)) {}
  int width_;
  ComplexVector amps_;
};

using Histogram = std::map<std::string, std::uint64_t>;

/// Applies the gates in order. Measure gates are deferred to the end of the
/// circuit: the returned state is the pre-measurement state.
Statevector run(const Circuit& circuit, Statevector initial);
Statevector run(const Circuit& circuit);

/// Born-rule sampling of the classical bits. Bit strings are written with
/// classical bit 0 rightmost. Shots are drawn in batches of kShotBatch; batch b
/// uses mt19937_64 seeded with splitmix64(seed + b), so a histogram depends
/// only on (circuit, shots, seed).
Histogram sample(const Circuit& circuit, std::uint64_t shots, std::uint64_t seed);
Histogram sample(const Circuit& circuit, const Statevector& initial, std::uint64_t shots,
                 std::uint64_t seed);
inline constexpr std::uint64_t kShotBatch = 8192;

/// Full unitary of a measurement-free circuit of width <= 12.
ComplexMatrix circuit_unitary(const Circuit& circuit);

/// Controlled U^(2^k) built by k repeated squarings.
Gate controlled_power(const ComplexMatrix& u, int k, int control, std::vector<int> qubits);

bool is_unitary(const ComplexMatrix& u, double tol = 1e-10);

nlohmann::json to_json(const Gate& g);
nlohmann::json to_json(const Circuit& c);

}  // namespace qgp::qc
