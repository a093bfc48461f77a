#include "qgp/aqc.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "qgp/error.hpp"
#include "qgp/hhl.hpp"
#include "qgp/kernels.hpp"

namespace qgp::aqc {

namespace {

using kernels::Mat2;

Mat2 ry(double a) {
  const double c = std::cos(0.5 * a), s = std::sin(0.5 * a);
  return {c, -s, s, c};
}

Mat2 rz(double a) { return {std::polar(1.0, -0.5 * a), 0.0, 0.0, std::polar(1.0, 0.5 * a)}; }

const Mat2 kX = {0.0, 1.0, 1.0, 0.0};

// Squared phase-aware distance computed from the difference matrix, which
// keeps precision when V is close to U.
double distance_squared(const ComplexMatrix& v, const ComplexMatrix& u) {
  const cplx tr = (v.adjoint() * u).trace();
  const double mag = std::abs(tr);
  const cplx phase = mag > 0.0 ? std::conj(tr) / mag : cplx(1.0, 0.0);
  return (v - phase * u).squaredNorm();
}

void check_spec(const AnsatzSpec& spec) {
  if (spec.width < 1) throw Error(ErrorCode::InvalidArgument, "ansatz width must be >= 1");
  if (spec.cnot_budget < 0) throw Error(ErrorCode::InvalidArgument, "cnot budget must be >= 0");
  if (spec.cnot_budget > 0 && spec.width < 2 && spec.connectivity.empty())
    throw Error(ErrorCode::InvalidArgument, "CNOT blocks need at least two qubits");
}

}  // namespace

std::int64_t cnot_lower_bound(int n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "cnot_lower_bound: n must be >= 1");
  if (n > 30) throw Error(ErrorCode::InvalidArgument, "cnot_lower_bound: n too large");
  const std::int64_t numerator = (std::int64_t{1} << (2 * n)) - 3 * std::int64_t{n} - 1;
  return (numerator + 3) / 4;
}

double frobenius_distance(const ComplexMatrix& v, const ComplexMatrix& u) {
  if (v.rows() != u.rows() || v.cols() != u.cols())
    throw Error(ErrorCode::DimensionMismatch, "frobenius_distance: shapes differ");
  return std::sqrt(distance_squared(v, u));
}

AnsatzSpec AnsatzSpec::linear(int width, int cnot_budget) {
  AnsatzSpec spec{width, cnot_budget, {}};
  for (int q = 0; q + 1 < width; ++q) spec.connectivity.emplace_back(q, q + 1);
  return spec;
}

std::pair<int, int> AnsatzSpec::pair_for_block(int block) const {
  if (connectivity.empty()) return {block % (width - 1), block % (width - 1) + 1};
  return connectivity[static_cast<std::size_t>(block) % connectivity.size()];
}

qc::Circuit build_ansatz(const AnsatzSpec& spec, std::span<const double> p) {
  check_spec(spec);
  if (static_cast<int>(p.size()) != spec.parameter_count())
    throw Error(ErrorCode::ParameterCountMismatch,
                "expected " + std::to_string(spec.parameter_count()) + " parameters, got " +
                    std::to_string(p.size()));
  qc::Circuit c(spec.width);
  std::size_t i = 0;
  for (int q = 0; q < spec.width; ++q) {
    c.add(qc::Gate::rz(q, p[i]));
    c.add(qc::Gate::ry(q, p[i + 1]));
    c.add(qc::Gate::rz(q, p[i + 2]));
    i += 3;
  }
  for (int b = 0; b < spec.cnot_budget; ++b) {
    const auto [ctl, tgt] = spec.pair_for_block(b);
    c.add(qc::Gate::cnot(ctl, tgt));
    c.add(qc::Gate::ry(ctl, p[i]));
    c.add(qc::Gate::rz(ctl, p[i + 1]));
    c.add(qc::Gate::ry(tgt, p[i + 2]));
    c.add(qc::Gate::rz(tgt, p[i + 3]));
    i += 4;
  }
  return c;
}

ComplexMatrix ansatz_unitary(const AnsatzSpec& spec, std::span<const double> p) {
  check_spec(spec);
  if (static_cast<int>(p.size()) != spec.parameter_count())
    throw Error(ErrorCode::ParameterCountMismatch, "ansatz parameter count mismatch");
  const Eigen::Index dim = Eigen::Index{1} << spec.width;
  // Column-major d x d storage is a 2n-qubit state whose low n qubits are the
  // row index, so one kernel call updates every column at once.
  ComplexMatrix v = ComplexMatrix::Identity(dim, dim);
  std::span<cplx> s(v.data(), static_cast<std::size_t>(v.size()));
  std::size_t i = 0;
  for (int q = 0; q < spec.width; ++q) {
    kernels::apply_1q(s, q, rz(p[i]));
    kernels::apply_1q(s, q, ry(p[i + 1]));
    kernels::apply_1q(s, q, rz(p[i + 2]));
    i += 3;
  }
  for (int b = 0; b < spec.cnot_budget; ++b) {
    const auto [ctl, tgt] = spec.pair_for_block(b);
    kernels::apply_controlled_1q(s, ctl, tgt, kX);
    kernels::apply_1q(s, ctl, ry(p[i]));
    kernels::apply_1q(s, ctl, rz(p[i + 1]));
    kernels::apply_1q(s, tgt, ry(p[i + 2]));
    kernels::apply_1q(s, tgt, rz(p[i + 3]));
    i += 4;
  }
  return v;
}

CompilationResult compile(const ComplexMatrix& target, const AnsatzSpec& spec,
                          const CompileOptions& opts) {
  check_spec(spec);
  if (spec.width > kMaxCompileWidth) throw Error(ErrorCode::TooWide, "compile supports width <= 6");
  const Eigen::Index dim = Eigen::Index{1} << spec.width;
  if (target.rows() != dim || target.cols() != dim)
    throw Error(ErrorCode::DimensionMismatch, "target dimension != 2^width");
  if (!qc::is_unitary(target, 1e-8)) throw Error(ErrorCode::NonUnitary, "target is not unitary");

  const int np = spec.parameter_count();
  const double tol2 = opts.tolerance * opts.tolerance;
  auto cost = [&](const std::vector<double>& th) {
    return distance_squared(ansatz_unitary(spec, th), target);
  };

  std::vector<double> best_params(np, 0.0);
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> best_trace;
  int total_iters = 0;
  int used = 0;

  for (int r = 0; r < std::max(1, opts.restarts); ++r) {
    ++used;
    std::vector<double> th(np, 0.0);
    if (r > 0) {
      std::mt19937_64 rng(opts.seed * 1000003ULL + static_cast<std::uint64_t>(r));
      std::uniform_real_distribution<double> angle(-M_PI, M_PI);
      for (double& x : th) x = angle(rng);
    }
    double fx = cost(th);
    std::vector<double> trace;
    if (opts.record_trace) trace.push_back(fx);
    double step = 1.0;
    std::vector<double> g(np), trial(np);
    for (int it = 0; it < opts.max_iters && fx > tol2 * 1e-2; ++it) {
      ++total_iters;
      double gg = 0.0;
      for (int k = 0; k < np; ++k) {
        std::vector<double> tp = th, tm = th;
        tp[k] += opts.fd_step;
        tm[k] -= opts.fd_step;
        g[k] = (cost(tp) - cost(tm)) / (2.0 * opts.fd_step);
        gg += g[k] * g[k];
      }
      if (gg < 1e-24) break;
      // Backtracking (Armijo) line search; the step grows again after success.
      step *= 2.0;
      double ft = 0.0;
      bool accepted = false;
      for (int ls = 0; ls < 60; ++ls) {
        for (int k = 0; k < np; ++k) trial[k] = th[k] - step * g[k];
        ft = cost(trial);
        if (ft <= fx - 1e-4 * step * gg) {
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted) break;
      th.swap(trial);
      fx = ft;
      if (opts.record_trace) trace.push_back(fx);
    }
    if (fx < best) {
      best = fx;
      best_params = th;
      best_trace = std::move(trace);
    }
    if (best <= tol2) break;
  }

  CompilationResult out;
  out.parameters = best_params;
  out.circuit = build_ansatz(spec, best_params);
  out.distance = frobenius_distance(ansatz_unitary(spec, best_params), target);
  out.iterations = total_iters;
  out.restarts_used = used;
  out.converged = out.distance <= opts.tolerance;
  out.trace = std::move(best_trace);
  return out;
}

std::vector<std::optional<qc::Circuit>> QpeBlocks::overrides() const {
  std::vector<std::optional<qc::Circuit>> out;
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    if (substituted[k]) out.emplace_back(blocks[k].circuit);
    else out.emplace_back(std::nullopt);
  }
  return out;
}

QpeBlocks compile_qpe_blocks(const ComplexMatrix& a, double t, int n_l, const AnsatzSpec& spec,
                             const CompileOptions& opts) {
  const Eigen::Index n = a.rows();
  int m = 0;
  while ((Eigen::Index{1} << m) < n) ++m;
  if ((Eigen::Index{1} << m) != n) throw Error(ErrorCode::DimensionMismatch, "A dimension must be 2^m");
  if (m + 1 > kMaxCompileWidth) throw Error(ErrorCode::TooWide, "QPE block wider than 6 qubits");
  if (spec.width != m + 1) throw Error(ErrorCode::DimensionMismatch, "ansatz width must be state qubits + 1");

  const ComplexMatrix u = hhl::evolution_unitary(a, t);
  QpeBlocks out;
  out.state_qubits = m;
  ComplexMatrix power = u;
  for (int k = 0; k < n_l; ++k) {
    if (k > 0) power = power * power;
    ComplexMatrix target = ComplexMatrix::Identity(2 * n, 2 * n);
    target.bottomRightCorner(n, n) = power;
    CompileOptions o = opts;
    o.seed = opts.seed + static_cast<std::uint64_t>(k);
    out.blocks.push_back(compile(target, spec, o));
    out.substituted.push_back(out.blocks.back().distance <= opts.tolerance);
  }

  const qc::Circuit exact = hhl::build_qpe(u, n_l, m);
  const qc::Circuit compiled = hhl::build_qpe(u, n_l, m, out.overrides());
  out.depth_before = exact.depth();
  out.depth_after = compiled.depth();
  out.two_qubit_before = exact.two_qubit_count();
  out.two_qubit_after = compiled.two_qubit_count();
  out.cnot_cost_before = exact.cnot_cost();
  out.cnot_cost_after = compiled.cnot_cost();
  return out;
}

nlohmann::json to_json(const CompilationResult& r) {
  nlohmann::json j;
  j["parameters"] = r.parameters;
  j["distance"] = r.distance;
  j["iterations"] = r.iterations;
  j["restarts_used"] = r.restarts_used;
  j["converged"] = r.converged;
  j["two_qubit_count"] = r.circuit.two_qubit_count();
  j["depth"] = r.circuit.depth();
  j["circuit"] = qc::to_json(r.circuit);
  return j;
}

nlohmann::json to_json(const QpeBlocks& q) {
  nlohmann::json j;
  j["state_qubits"] = q.state_qubits;
  j["depth_before"] = q.depth_before;
  j["depth_after"] = q.depth_after;
  j["two_qubit_before"] = q.two_qubit_before;
  j["two_qubit_after"] = q.two_qubit_after;
  j["cnot_cost_before"] = q.cnot_cost_before;
  j["cnot_cost_after"] = q.cnot_cost_after;
  nlohmann::json blocks = nlohmann::json::array();
  for (std::size_t k = 0; k < q.blocks.size(); ++k) {
    blocks.push_back({{"power", k},
                      {"distance", q.blocks[k].distance},
                      {"substituted", static_cast<bool>(q.substituted[k])},
                      {"two_qubit_count", q.blocks[k].circuit.two_qubit_count()}});
  }
  j["blocks"] = std::move(blocks);
  return j;
}

}  // namespace qgp::aqc
