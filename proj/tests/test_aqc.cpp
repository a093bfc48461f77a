#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "qgp/aqc.hpp"
#include "qgp/error.hpp"
#include "qgp/hhl.hpp"
#include "support.hpp"

using namespace qgp;
using namespace testing;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Io;
}

}  // namespace

TEST_CASE("CNOT lower bound") {
  for (int n = 1; n <= 5; ++n) {
    const double direct = std::ceil((std::pow(4.0, n) - 3.0 * n - 1.0) / 4.0);
    CHECK(aqc::cnot_lower_bound(n) == static_cast<std::int64_t>(direct));
  }
  CHECK(aqc::cnot_lower_bound(1) == 0);
  CHECK(aqc::cnot_lower_bound(2) == 3);
  CHECK(aqc::cnot_lower_bound(3) == 14);
  CHECK(code_of([] { aqc::cnot_lower_bound(0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("phase-aware Frobenius distance") {
  std::mt19937_64 g(1);
  const ComplexMatrix u = random_unitary(4, g);
  CHECK(aqc::frobenius_distance(u, std::polar(1.0, 0.7) * u) < 1e-7);
  const ComplexMatrix v = random_unitary(4, g);
  const double direct = std::sqrt(std::max(0.0, 8.0 - 2.0 * std::abs((v.adjoint() * u).trace())));
  CHECK(aqc::frobenius_distance(v, u) == doctest::Approx(direct).epsilon(1e-12));
  CHECK(code_of([&] { aqc::frobenius_distance(u, ComplexMatrix::Identity(2, 2)); }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("ansatz unitary agrees with the built circuit") {
  std::mt19937_64 g(2);
  for (int width = 1; width <= 4; ++width) {
    const auto spec = aqc::AnsatzSpec::linear(width, width > 1 ? 5 : 0);
    std::vector<double> p(spec.parameter_count());
    for (double& x : p) x = 3.0 * testing::random_real(1, 1, g)(0, 0);
    const auto circ = aqc::build_ansatz(spec, p);
    CHECK(max_abs_diff(aqc::ansatz_unitary(spec, p), qc::circuit_unitary(circ)) < 1e-12);
    CHECK(circ.two_qubit_count() == spec.cnot_budget);
  }
  const auto spec = aqc::AnsatzSpec::linear(2, 1);
  const std::vector<double> short_p(3, 0.0);
  CHECK(code_of([&] { aqc::build_ansatz(spec, short_p); }) == ErrorCode::ParameterCountMismatch);
}

TEST_CASE("random SU(4) targets compile with three CNOTs") {
  std::mt19937_64 g(404);
  aqc::CompileOptions opts;
  opts.tolerance = 1e-4;
  opts.restarts = 10;
  int hits = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const ComplexMatrix target = random_su(4, g);
    opts.seed = trial;
    const auto r = aqc::compile(target, aqc::AnsatzSpec::linear(2, 3), opts);
    CHECK(r.distance < 1e-3);
    CHECK(r.restarts_used <= 10);
    CHECK(r.circuit.two_qubit_count() == 3);
    CHECK(aqc::frobenius_distance(qc::circuit_unitary(r.circuit), target) == doctest::Approx(r.distance).epsilon(1e-6));
    hits += r.distance < 1e-3;
  }
  CHECK(hits == 20);
}

TEST_CASE("trivial targets") {
  aqc::CompileOptions opts;
  opts.tolerance = 1e-8;
  const auto id = aqc::compile(ComplexMatrix::Identity(4, 4), aqc::AnsatzSpec::linear(2, 0), opts);
  CHECK(id.distance < 1e-8);
  CHECK(id.circuit.two_qubit_count() == 0);

  ComplexMatrix cnot = ComplexMatrix::Zero(4, 4);
  cnot(0, 0) = cnot(2, 2) = 1;
  cnot(1, 3) = cnot(3, 1) = 1;  // control qubit 0, target qubit 1
  const auto r = aqc::compile(cnot, aqc::AnsatzSpec::linear(2, 1), opts);
  CHECK(r.distance < 1e-6);

  CHECK(code_of([&] { aqc::compile(ComplexMatrix::Identity(4, 4), aqc::AnsatzSpec::linear(3, 1)); }) ==
        ErrorCode::DimensionMismatch);
  ComplexMatrix bad = ComplexMatrix::Identity(4, 4);
  bad(0, 0) = 2.0;
  CHECK(code_of([&] { aqc::compile(bad, aqc::AnsatzSpec::linear(2, 1)); }) == ErrorCode::NonUnitary);
}

TEST_CASE("trace records a non-increasing objective") {
  std::mt19937_64 g(9);
  aqc::CompileOptions opts;
  opts.record_trace = true;
  opts.restarts = 1;
  const auto r = aqc::compile(random_su(4, g), aqc::AnsatzSpec::linear(2, 3), opts);
  REQUIRE(r.trace.size() >= 2);
  for (std::size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i] <= r.trace[i - 1]);
}

TEST_CASE("compiled QPE blocks preserve the HHL success probability") {
  std::mt19937_64 g(31);
  const RealMatrix a = random_spd(2, g);
  RealVector b = random_vec(2, g);
  b /= b.norm();
  const int n_l = 3;

  hhl::HHLConfig cfg;
  cfg.eval_qubits = n_l;
  const auto exact = hhl::solve(a.cast<cplx>(), b.cast<cplx>(), cfg);

  hhl::AqcPassthrough pass;
  pass.cnot_budget = 3;
  pass.options.tolerance = 1e-4;
  cfg.aqc = pass;
  const auto compiled = hhl::solve(a.cast<cplx>(), b.cast<cplx>(), cfg);
  CHECK(compiled.plan.aqc_used);
  CHECK(compiled.plan.aqc_blocks_substituted == n_l);
  const double rel = std::abs(compiled.success_probability - exact.success_probability) / exact.success_probability;
  CHECK(rel < 0.01);

  const auto blocks = aqc::compile_qpe_blocks((a / exact.plan.scale).cast<cplx>(), exact.plan.time, n_l,
                                              aqc::AnsatzSpec::linear(2, 3), pass.options);
  double eps = 0.0;
  for (const auto& blk : blocks.blocks) {
    CHECK(blk.distance < 1e-3);
    eps = std::max(eps, blk.distance);
  }
  // operator-norm perturbation bound on the success probability
  CHECK(std::abs(compiled.success_probability - exact.success_probability) <= 2.0 * n_l * 2.0 * eps + 1e-12);
  // the inverse QFT is shared by both versions
  const int qft_2q = hhl::inverse_qft(n_l).two_qubit_count();
  int block_2q = 0;
  for (const auto& blk : blocks.blocks) block_2q += blk.circuit.two_qubit_count();
  CHECK(block_2q <= n_l * 3);
  CHECK(blocks.two_qubit_after - qft_2q <= n_l * 3);
  CHECK(blocks.cnot_cost_after <= blocks.cnot_cost_before);
}
