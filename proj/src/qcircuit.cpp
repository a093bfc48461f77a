#include "qgp/qcircuit.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "qgp/aqc.hpp"
#include "qgp/error.hpp"
#include "qgp/kernels.hpp"

namespace qgp::qc {

namespace {

using kernels::Mat2;

constexpr int kMaxUnitaryWidth = 12;
constexpr double kUnitaryTol = 1e-10;

Mat2 one_qubit_matrix(const Gate& g) {
  const double c = std::cos(0.5 * g.angle);
  const double s = std::sin(0.5 * g.angle);
  const cplx i(0.0, 1.0);
  switch (g.kind) {
    case GateKind::H: {
      const double r = 1.0 / std::sqrt(2.0);
      return {r, r, r, -r};
    }
    case GateKind::X:
    case GateKind::CNOT:
      return {0.0, 1.0, 1.0, 0.0};
    case GateKind::RX: return {c, -i * s, -i * s, c};
    case GateKind::RY: return {c, -s, s, c};
    case GateKind::RZ: return {std::polar(1.0, -0.5 * g.angle), 0.0, 0.0, std::polar(1.0, 0.5 * g.angle)};
    case GateKind::Phase: return {1.0, 0.0, 0.0, std::polar(1.0, g.angle)};
    default: break;
  }
  throw Error(ErrorCode::InvalidArgument, std::string("not a one-qubit gate: ") + to_string(g.kind));
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void apply_gate(const Gate& g, std::span<cplx> state) {
  switch (g.kind) {
    case GateKind::H:
    case GateKind::X:
    case GateKind::RX:
    case GateKind::RY:
    case GateKind::RZ:
    case GateKind::Phase:
      kernels::apply_1q(state, g.qubits[0], one_qubit_matrix(g));
      break;
    case GateKind::CNOT:
      kernels::apply_controlled_1q(state, g.controls[0], g.qubits[0], one_qubit_matrix(g));
      break;
    case GateKind::CPhase:
      kernels::apply_cphase(state, g.controls[0], g.qubits[0], g.angle);
      break;
    case GateKind::SWAP:
      kernels::apply_swap(state, g.qubits[0], g.qubits[1]);
      break;
    case GateKind::Unitary:
      kernels::apply_block(state, g.qubits, *g.matrix);
      break;
    case GateKind::ControlledUnitary:
      kernels::apply_block(state, g.qubits, *g.matrix, g.controls);
      break;
    case GateKind::MultiplexedRY:
      kernels::apply_multiplexed_ry(state, g.controls, g.qubits[0], *g.angles);
      break;
    case GateKind::Measure:
      break;
  }
}

}  // namespace

const char* to_string(GateKind kind) noexcept {
  switch (kind) {
    case GateKind::H: return "h";
    case GateKind::X: return "x";
    case GateKind::RX: return "rx";
    case GateKind::RY: return "ry";
    case GateKind::RZ: return "rz";
    case GateKind::Phase: return "p";
    case GateKind::CNOT: return "cx";
    case GateKind::CPhase: return "cp";
    case GateKind::SWAP: return "swap";
    case GateKind::Unitary: return "unitary";
    case GateKind::ControlledUnitary: return "cunitary";
    case GateKind::MultiplexedRY: return "mux_ry";
    case GateKind::Measure: return "measure";
  }
  return "?";
}

bool is_unitary(const ComplexMatrix& u, double tol) {
  if (u.rows() != u.cols()) return false;
  const ComplexMatrix prod = u.adjoint() * u;
  return (prod - ComplexMatrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff() <= tol;
}

// --- Gate -------------------------------------------------------------------

Gate Gate::h(int q) { return Gate{GateKind::H, {q}}; }
Gate Gate::x(int q) { return Gate{GateKind::X, {q}}; }
Gate Gate::rx(int q, double theta) { return Gate{GateKind::RX, {q}, {}, theta}; }
Gate Gate::ry(int q, double theta) { return Gate{GateKind::RY, {q}, {}, theta}; }
Gate Gate::rz(int q, double theta) { return Gate{GateKind::RZ, {q}, {}, theta}; }
Gate Gate::phase(int q, double theta) { return Gate{GateKind::Phase, {q}, {}, theta}; }
Gate Gate::cnot(int control, int target) { return Gate{GateKind::CNOT, {target}, {control}}; }
Gate Gate::cphase(int control, int target, double theta) {
  return Gate{GateKind::CPhase, {target}, {control}, theta};
}
Gate Gate::swap(int a, int b) { return Gate{GateKind::SWAP, {a, b}}; }

Gate Gate::unitary(ComplexMatrix u, std::vector<int> qubits) {
  Gate g{GateKind::Unitary, std::move(qubits)};
  g.matrix = std::make_shared<const ComplexMatrix>(std::move(u));
  return g;
}

Gate Gate::controlled_unitary(ComplexMatrix u, int control, std::vector<int> qubits) {
  Gate g{GateKind::ControlledUnitary, std::move(qubits), {control}};
  g.matrix = std::make_shared<const ComplexMatrix>(std::move(u));
  return g;
}

Gate Gate::multiplexed_ry(std::vector<double> angles, std::vector<int> controls, int target) {
  Gate g{GateKind::MultiplexedRY, {target}, std::move(controls)};
  g.angles = std::make_shared<const std::vector<double>>(std::move(angles));
  return g;
}

Gate Gate::measure(int q, int cbit) {
  Gate g{GateKind::Measure, {q}};
  g.cbit = cbit;
  return g;
}

std::vector<int> Gate::support() const {
  std::vector<int> s = controls;
  s.insert(s.end(), qubits.begin(), qubits.end());
  return s;
}

Gate Gate::inverse() const {
  Gate g = *this;
  switch (kind) {
    case GateKind::H:
    case GateKind::X:
    case GateKind::CNOT:
    case GateKind::SWAP:
      break;
    case GateKind::RX:
    case GateKind::RY:
    case GateKind::RZ:
    case GateKind::Phase:
    case GateKind::CPhase:
      g.angle = -angle;
      break;
    case GateKind::Unitary:
    case GateKind::ControlledUnitary:
      g.matrix = std::make_shared<const ComplexMatrix>(matrix->adjoint());
      break;
    case GateKind::MultiplexedRY: {
      std::vector<double> neg(angles->size());
      std::transform(angles->begin(), angles->end(), neg.begin(), [](double a) { return -a; });
      g.angles = std::make_shared<const std::vector<double>>(std::move(neg));
      break;
    }
    case GateKind::Measure:
      throw Error(ErrorCode::InvalidArgument, "measurement has no inverse");
  }
  return g;
}

Gate Gate::remapped(const std::vector<int>& map) const {
  Gate g = *this;
  for (int& q : g.qubits) q = map.at(q);
  for (int& q : g.controls) q = map.at(q);
  return g;
}

// --- Circuit ----------------------------------------------------------------

Circuit::Circuit(int width, int cbits) : width_(width), cbits_(cbits) {
  if (width < 1 || width > 30) throw Error(ErrorCode::InvalidArgument, "circuit width out of range");
  if (cbits < 0) throw Error(ErrorCode::InvalidArgument, "negative classical bit count");
}

Circuit& Circuit::add(Gate g) {
  const std::vector<int> sup = g.support();
  std::set<int> seen;
  for (int q : sup) {
    if (q < 0 || q >= width_)
      throw Error(ErrorCode::InvalidArgument, "qubit index " + std::to_string(q) + " out of range");
    if (!seen.insert(q).second)
      throw Error(ErrorCode::InvalidArgument, "repeated qubit index " + std::to_string(q));
  }
  if (g.qubits.empty()) throw Error(ErrorCode::InvalidArgument, "gate without target");
  switch (g.kind) {
    case GateKind::Unitary:
    case GateKind::ControlledUnitary: {
      const Eigen::Index dim = Eigen::Index{1} << g.qubits.size();
      if (!g.matrix || g.matrix->rows() != dim || g.matrix->cols() != dim)
        throw Error(ErrorCode::DimensionMismatch, "unitary block dimension does not match qubit list");
      if (!is_unitary(*g.matrix, kUnitaryTol))
        throw Error(ErrorCode::NonUnitary, "unitary block fails U^dagger U = I");
      break;
    }
    case GateKind::MultiplexedRY:
      if (!g.angles || g.angles->size() != (std::size_t{1} << g.controls.size()))
        throw Error(ErrorCode::DimensionMismatch, "multiplexor needs one angle per register value");
      break;
    case GateKind::Measure:
      if (g.cbit < 0 || g.cbit >= cbits_)
        throw Error(ErrorCode::InvalidArgument, "classical bit out of range");
      break;
    default:
      break;
  }
  gates_.push_back(std::move(g));
  return *this;
}

Circuit& Circuit::append(const Circuit& other, const std::vector<int>& qubit_map) {
  if (static_cast<int>(qubit_map.size()) != other.width())
    throw Error(ErrorCode::WidthMismatch, "qubit map size differs from appended circuit width");
  for (const Gate& g : other.gates()) add(g.remapped(qubit_map));
  return *this;
}

Circuit& Circuit::append(const Circuit& other) {
  if (other.width() > width_) throw Error(ErrorCode::WidthMismatch, "appended circuit is wider");
  for (const Gate& g : other.gates()) add(g);
  return *this;
}

Circuit& Circuit::add_cbits(int n) {
  cbits_ += n;
  return *this;
}

Circuit Circuit::inverse() const {
  Circuit out(width_, cbits_);
  for (auto it = gates_.rbegin(); it != gates_.rend(); ++it) out.add(it->inverse());
  return out;
}

bool Circuit::has_measurement() const {
  return std::any_of(gates_.begin(), gates_.end(),
                     [](const Gate& g) { return g.kind == GateKind::Measure; });
}

int Circuit::depth() const {
  std::vector<int> level(width_, 0);
  int depth = 0;
  for (const Gate& g : gates_) {
    int lvl = 0;
    for (int q : g.support()) lvl = std::max(lvl, level[q]);
    ++lvl;
    for (int q : g.support()) level[q] = lvl;
    depth = std::max(depth, lvl);
  }
  return depth;
}

int Circuit::two_qubit_count() const {
  return static_cast<int>(std::count_if(gates_.begin(), gates_.end(),
                                        [](const Gate& g) { return g.support().size() == 2; }));
}

int Circuit::multi_qubit_count() const {
  return static_cast<int>(std::count_if(gates_.begin(), gates_.end(),
                                        [](const Gate& g) { return g.support().size() > 2; }));
}

std::int64_t Circuit::cnot_cost() const {
  std::int64_t total = 0;
  for (const Gate& g : gates_) {
    switch (g.kind) {
      case GateKind::CNOT: total += 1; break;
      case GateKind::CPhase: total += 2; break;
      case GateKind::SWAP: total += 3; break;
      case GateKind::Unitary:
      case GateKind::ControlledUnitary:
        total += aqc::cnot_lower_bound(static_cast<int>(g.support().size()));
        break;
      case GateKind::MultiplexedRY: total += std::int64_t{1} << g.controls.size(); break;
      default: break;
    }
  }
  return total;
}

// --- Statevector ------------------------------------------------------------

Statevector Statevector::basis(int width, std::uint64_t index) {
  if (width < 1 || width > 30) throw Error(ErrorCode::InvalidArgument, "statevector width out of range");
  const std::uint64_t dim = std::uint64_t{1} << width;
  if (index >= dim) throw Error(ErrorCode::InvalidArgument, "basis index out of range");
  ComplexVector amps = ComplexVector::Zero(static_cast<Eigen::Index>(dim));
  amps(static_cast<Eigen::Index>(index)) = 1.0;
  return {width, std::move(amps)};
}

Statevector Statevector::from_amplitudes(ComplexVector amplitudes) {
  const auto n = static_cast<std::uint64_t>(amplitudes.size());
  if (n < 2 || (n & (n - 1)) != 0)
    throw Error(ErrorCode::InvalidArgument, "amplitude count must be a power of two");
  if (std::abs(amplitudes.squaredNorm() - 1.0) > 1e-10)
    throw Error(ErrorCode::InvalidArgument, "state is not normalized");
  int width = 0;
  while ((std::uint64_t{1} << width) < n) ++width;
  return {width, std::move(amplitudes)};
}

double Statevector::norm_squared() const {
  return kernels::norm_squared({amps_.data(), static_cast<std::size_t>(amps_.size())});
}

double Statevector::probability(int qubit, int value) const {
  double p = 0.0;
  for (Eigen::Index i = 0; i < amps_.size(); ++i)
    if (static_cast<int>((i >> qubit) & 1) == value) p += std::norm(amps_(i));
  return p;
}

// --- Simulation -------------------------------------------------------------

Statevector run(const Circuit& circuit, Statevector initial) {
  if (initial.width() != circuit.width())
    throw Error(ErrorCode::WidthMismatch, "initial state width " + std::to_string(initial.width()) +
                                              " != circuit width " + std::to_string(circuit.width()));
  std::vector<bool> measured(circuit.width(), false);
  std::span<cplx> state = initial.span();
  for (const Gate& g : circuit.gates()) {
    if (g.kind == GateKind::Measure) {
      measured[g.qubits[0]] = true;
      continue;
    }
    for (int q : g.support())
      if (measured[q])
        throw Error(ErrorCode::InvalidArgument, "gate acts on qubit " + std::to_string(q) +
                                                    " after its measurement");
    apply_gate(g, state);
  }
  return initial;
}

Statevector run(const Circuit& circuit) { return run(circuit, Statevector::basis(circuit.width())); }

Histogram sample(const Circuit& circuit, std::uint64_t shots, std::uint64_t seed) {
  return sample(circuit, Statevector::basis(circuit.width()), shots, seed);
}

Histogram sample(const Circuit& circuit, const Statevector& initial, std::uint64_t shots,
                 std::uint64_t seed) {
  if (!circuit.has_measurement()) throw Error(ErrorCode::NoMeasurement, "circuit has no Measure gate");
  if (shots == 0) throw Error(ErrorCode::InvalidArgument, "shots must be >= 1");
  if (circuit.cbits() > 24) throw Error(ErrorCode::TooWide, "too many classical bits to sample");

  std::vector<int> cbit_of(circuit.width(), -1);
  for (const Gate& g : circuit.gates())
    if (g.kind == GateKind::Measure) cbit_of[g.qubits[0]] = g.cbit;

  const Statevector final_state = run(circuit, initial);
  const std::size_t outcomes = std::size_t{1} << circuit.cbits();
  std::vector<double> prob(outcomes, 0.0);
  const ComplexVector& amps = final_state.amplitudes();
  for (Eigen::Index i = 0; i < amps.size(); ++i) {
    std::size_t key = 0;
    for (int q = 0; q < circuit.width(); ++q)
      if (cbit_of[q] >= 0 && ((i >> q) & 1)) key |= std::size_t{1} << cbit_of[q];
    prob[key] += std::norm(amps(i));
  }
  std::vector<double> cdf(outcomes);
  double acc = 0.0;
  for (std::size_t k = 0; k < outcomes; ++k) cdf[k] = (acc += prob[k]);
  for (double& c : cdf) c /= acc;

  std::vector<std::uint64_t> counts(outcomes, 0);
  for (std::uint64_t batch = 0, done = 0; done < shots; ++batch) {
    std::mt19937_64 rng(splitmix64(seed + batch));
    const std::uint64_t n = std::min(kShotBatch, shots - done);
    for (std::uint64_t s = 0; s < n; ++s) {
      const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
      if (it == cdf.end()) --it;
      ++counts[static_cast<std::size_t>(it - cdf.begin())];
    }
    done += n;
  }

  Histogram hist;
  for (std::size_t k = 0; k < outcomes; ++k) {
    if (counts[k] == 0) continue;
    std::string key(circuit.cbits(), '0');
    for (int b = 0; b < circuit.cbits(); ++b)
      if ((k >> b) & 1) key[circuit.cbits() - 1 - b] = '1';
    hist[key] = counts[k];
  }
  return hist;
}

ComplexMatrix circuit_unitary(const Circuit& circuit) {
  if (circuit.width() > kMaxUnitaryWidth)
    throw Error(ErrorCode::TooWide, "circuit_unitary supports width <= 12");
  if (circuit.has_measurement())
    throw Error(ErrorCode::ContainsMeasurement, "circuit_unitary needs a measurement-free circuit");
  const Eigen::Index dim = Eigen::Index{1} << circuit.width();
  ComplexMatrix u(dim, dim);
  for (Eigen::Index c = 0; c < dim; ++c) {
    u.col(c) = run(circuit, Statevector::basis(circuit.width(), static_cast<std::uint64_t>(c))).amplitudes();
  }
  return u;
}

Gate controlled_power(const ComplexMatrix& u, int k, int control, std::vector<int> qubits) {
  if (!is_unitary(u, 1e-9)) throw Error(ErrorCode::NonUnitary, "controlled_power: U is not unitary");
  if (k < 0) throw Error(ErrorCode::InvalidArgument, "controlled_power: negative exponent");
  ComplexMatrix p = u;
  for (int i = 0; i < k; ++i) p = p * p;
  return Gate::controlled_unitary(std::move(p), control, std::move(qubits));
}

// --- JSON -------------------------------------------------------------------

nlohmann::json to_json(const Gate& g) {
  nlohmann::json j;
  j["kind"] = to_string(g.kind);
  j["qubits"] = g.qubits;
  if (!g.controls.empty()) j["controls"] = g.controls;
  switch (g.kind) {
    case GateKind::RX:
    case GateKind::RY:
    case GateKind::RZ:
    case GateKind::Phase:
    case GateKind::CPhase:
      j["angle"] = g.angle;
      break;
    case GateKind::Unitary:
    case GateKind::ControlledUnitary: {
      nlohmann::json rows = nlohmann::json::array();
      for (Eigen::Index r = 0; r < g.matrix->rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < g.matrix->cols(); ++c)
          row.push_back({(*g.matrix)(r, c).real(), (*g.matrix)(r, c).imag()});
        rows.push_back(std::move(row));
      }
      j["matrix"] = std::move(rows);
      break;
    }
    case GateKind::MultiplexedRY:
      j["angles"] = *g.angles;
      break;
    case GateKind::Measure:
      j["cbit"] = g.cbit;
      break;
    default:
      break;
  }
  return j;
}

nlohmann::json to_json(const Circuit& c) {
  nlohmann::json j;
  j["width"] = c.width();
  j["cbits"] = c.cbits();
  j["depth"] = c.depth();
  j["two_qubit_count"] = c.two_qubit_count();
  j["cnot_cost"] = c.cnot_cost();
  nlohmann::json gates = nlohmann::json::array();
  for (const Gate& g : c.gates()) gates.push_back(to_json(g));
  j["gates"] = std::move(gates);
  return j;
}

}  // namespace qgp::qc
