#include "qgp/hhl.hpp"

#include <cmath>
#include <numeric>

#include "qgp/error.hpp"

namespace qgp::hhl {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

int qubits_for(Eigen::Index n) {
  int m = 0;
  while ((Eigen::Index{1} << m) < n) ++m;
  return m;
}

std::vector<int> iota_vec(int first, int count) {
  std::vector<int> v(count);
  std::iota(v.begin(), v.end(), first);
  return v;
}

// Unitary with first column b: a Householder reflection taking e0 to
// e^{-i arg b0} b, times the phase e^{i arg b0}.
ComplexMatrix state_preparation(const ComplexVector& b) {
  const Eigen::Index n = b.size();
  const double phi = std::abs(b(0)) > 0.0 ? std::arg(b(0)) : 0.0;
  const cplx phase = std::polar(1.0, phi);
  const ComplexVector w = b / phase;
  ComplexVector v = -w;
  v(0) += 1.0;
  ComplexMatrix r = ComplexMatrix::Identity(n, n);
  const double vv = v.squaredNorm();
  if (vv > 1e-30) r -= (2.0 / vv) * (v * v.adjoint());
  return phase * r;
}

}  // namespace

const char* to_string(BackendKind b) noexcept {
  return b == BackendKind::ExactStatevector ? "exact-statevector" : "sampled";
}

const char* to_string(RescaleMode m) noexcept { return m == RescaleMode::Exact ? "exact" : "dmin"; }

RescaleMode parse_rescale_mode(const std::string& s) {
  if (s == "exact") return RescaleMode::Exact;
  if (s == "dmin") return RescaleMode::Dmin;
  throw Error(ErrorCode::Config, "rescale: expected 'exact' or 'dmin', got '" + s + "'");
}

void HHLConfig::validate() const {
  if (eval_qubits_cap < 1 || eval_qubits_cap > 10)
    throw Error(ErrorCode::InvalidArgument, "eval_qubits_cap must be in [1, 10]");
  if (eval_qubits && (*eval_qubits < 1 || *eval_qubits > 12))
    throw Error(ErrorCode::InvalidArgument, "eval_qubits must be in [1, 12]");
  if (time_param && !(*time_param > 0.0)) throw Error(ErrorCode::InvalidArgument, "time_param must be > 0");
  if (inversion_constant && !(*inversion_constant > 0.0))
    throw Error(ErrorCode::InvalidArgument, "inversion constant must be > 0");
  if (eigenvalue_scale && !(*eigenvalue_scale > 0.0))
    throw Error(ErrorCode::InvalidArgument, "eigenvalue_scale must be > 0");
  if (!(scale_headroom >= 1.0)) throw Error(ErrorCode::InvalidArgument, "scale_headroom must be >= 1");
  if (filter_fraction < 0.0 || filter_fraction > 1.0)
    throw Error(ErrorCode::InvalidArgument, "filter_fraction must be in [0, 1]");
  if (backend == BackendKind::Sampled && shots == 0)
    throw Error(ErrorCode::InvalidArgument, "sampled backend needs shots >= 1");
}

double EigenvalueGrid::eigenvalue(std::uint64_t m) const {
  return kTwoPi * static_cast<double>(m) / (std::ldexp(1.0, n_l) * time);
}

ComplexMatrix evolution_unitary(const ComplexMatrix& a, double t) {
  const auto ed = numerics::eigh(a);
  ComplexVector phases(ed.eigenvalues.size());
  for (Eigen::Index j = 0; j < phases.size(); ++j) phases(j) = std::polar(1.0, ed.eigenvalues(j) * t);
  return ed.eigenvectors * phases.asDiagonal() * ed.eigenvectors.adjoint();
}

qc::Circuit qft(int n) {
  qc::Circuit c(n);
  for (int j = n - 1; j >= 0; --j) {
    c.add(qc::Gate::h(j));
    for (int k = j - 1; k >= 0; --k) c.add(qc::Gate::cphase(k, j, M_PI / std::ldexp(1.0, j - k)));
  }
  for (int i = 0; i < n / 2; ++i) c.add(qc::Gate::swap(i, n - 1 - i));
  return c;
}

qc::Circuit inverse_qft(int n) { return qft(n).inverse(); }

qc::Circuit build_qpe(const ComplexMatrix& u, int n_l, int state_qubits,
                      const std::vector<std::optional<qc::Circuit>>& overrides) {
  if (n_l < 1) throw Error(ErrorCode::InvalidArgument, "build_qpe: n_l must be >= 1");
  if (u.rows() != (Eigen::Index{1} << state_qubits) || u.cols() != u.rows())
    throw Error(ErrorCode::DimensionMismatch, "build_qpe: U dimension != 2^state_qubits");
  if (!overrides.empty() && static_cast<int>(overrides.size()) != n_l)
    throw Error(ErrorCode::DimensionMismatch, "build_qpe: one override slot per evaluation qubit");

  const int m = state_qubits;
  qc::Circuit c(m + n_l);
  const std::vector<int> system = iota_vec(0, m);
  for (int k = 0; k < n_l; ++k) c.add(qc::Gate::h(m + k));

  ComplexMatrix power = u;
  for (int k = 0; k < n_l; ++k) {
    if (k > 0) power = power * power;
    if (!overrides.empty() && overrides[k]) {
      std::vector<int> map = system;
      map.push_back(m + k);
      c.append(*overrides[k], map);
    } else {
      c.add(qc::Gate::controlled_unitary(power, m + k, system));
    }
  }
  c.append(inverse_qft(n_l), iota_vec(m, n_l));
  return c;
}

qc::Circuit eigen_inversion_block(int n_l, double c, const EigenvalueGrid& grid, double cutoff) {
  if (n_l < 1) throw Error(ErrorCode::InvalidArgument, "eigen_inversion_block: n_l must be >= 1");
  if (!(c > 0.0)) throw Error(ErrorCode::InvalidArgument, "inversion constant must be > 0");
  const std::uint64_t regs = std::uint64_t{1} << n_l;
  std::vector<double> angles(regs, 0.0);
  for (std::uint64_t m = 1; m < regs; ++m) {
    const double lam = grid.eigenvalue(m);
    if (lam < cutoff) continue;
    const double ratio = c / lam;
    if (ratio > 1.0 + 1e-12)
      throw Error(ErrorCode::CTooLarge, "C = " + std::to_string(c) + " exceeds grid eigenvalue " +
                                            std::to_string(lam));
    angles[m] = 2.0 * std::asin(std::min(1.0, ratio));
  }
  qc::Circuit block(n_l + 1);
  block.add(qc::Gate::multiplexed_ry(std::move(angles), iota_vec(0, n_l), n_l));
  return block;
}

int size_eval_register(double kappa, int cap) {
  if (!(kappa >= 1.0)) throw Error(ErrorCode::InvalidArgument, "size_eval_register: kappa must be >= 1");
  if (std::isinf(kappa)) return cap;
  const int bits = static_cast<int>(std::ceil(std::log2(kappa) - 1e-12)) + 1;
  return std::min(std::max(bits, 1), cap);
}

ComplexMatrix pad_to_power_of_two(const ComplexMatrix& a) {
  const Eigen::Index n = a.rows();
  const Eigen::Index p = Eigen::Index{1} << qubits_for(n);
  if (p == n) return a;
  ComplexMatrix out = ComplexMatrix::Identity(p, p);
  out.topLeftCorner(n, n) = a;
  return out;
}

ComplexVector pad_to_power_of_two(const ComplexVector& b) {
  const Eigen::Index n = b.size();
  const Eigen::Index p = Eigen::Index{1} << qubits_for(n);
  ComplexVector out = ComplexVector::Zero(p);
  out.head(n) = b;
  return out;
}

qc::Circuit build_hhl(const ComplexMatrix& a_in, const ComplexVector& b_in, const HHLConfig& cfg,
                      HHLPlan* plan_out) {
  cfg.validate();
  if (a_in.rows() != a_in.cols() || a_in.rows() != b_in.size())
    throw Error(ErrorCode::DimensionMismatch, "build_hhl: A must be square and match b");
  if (std::abs(b_in.norm() - 1.0) > 1e-10) throw Error(ErrorCode::InvalidArgument, "build_hhl: ||b|| != 1");

  const ComplexMatrix a = pad_to_power_of_two(a_in);
  const ComplexVector b = pad_to_power_of_two(b_in);
  const auto ed = numerics::eigh(a);
  const Eigen::Index n = a.rows();
  const double lmin = ed.eigenvalues(0);
  const double lmax = ed.eigenvalues(n - 1);
  if (!(lmin > 0.0)) throw Error(ErrorCode::NotPositiveDefinite, "build_hhl: A must be positive definite");

  HHLPlan plan;
  plan.n_b = qubits_for(n);
  plan.condition_number = lmax / lmin;
  plan.n_l = cfg.eval_qubits ? *cfg.eval_qubits : size_eval_register(plan.condition_number, cfg.eval_qubits_cap);
  plan.scale = cfg.eigenvalue_scale ? *cfg.eigenvalue_scale : cfg.scale_headroom * lmax;
  plan.time = cfg.time_param ? *cfg.time_param : kTwoPi * (1.0 - std::ldexp(1.0, -plan.n_l));
  const EigenvalueGrid grid{plan.n_l, plan.time};
  plan.inversion_constant = cfg.inversion_constant ? *cfg.inversion_constant : grid.eigenvalue(1);
  plan.cutoff = cfg.filter_fraction * lmin / plan.scale;

  // An eigencomponent whose phase rounds to register value 0 is lost entirely.
  const ComplexVector beta = ed.eigenvectors.adjoint() * b;
  const double regs = std::ldexp(1.0, plan.n_l);
  for (Eigen::Index j = 0; j < n; ++j) {
    if (std::norm(beta(j)) < 1e-24) continue;
    const double reg_value = ed.eigenvalues(j) / plan.scale * plan.time / kTwoPi * regs;
    const double nearest = std::fmod(std::round(reg_value), regs);
    if (nearest == 0.0)
      throw Error(ErrorCode::SingularAfterTruncation,
                  "eigenvalue " + std::to_string(ed.eigenvalues(j)) + " truncates to register value 0");
  }

  const ComplexMatrix scaled = a / plan.scale;
  const ComplexMatrix u = evolution_unitary(scaled, plan.time);

  std::vector<std::optional<qc::Circuit>> overrides;
  if (cfg.aqc) {
    const auto spec = aqc::AnsatzSpec::linear(plan.n_b + 1, cfg.aqc->cnot_budget);
    const aqc::QpeBlocks blocks = aqc::compile_qpe_blocks(scaled, plan.time, plan.n_l, spec, cfg.aqc->options);
    overrides = blocks.overrides();
    plan.aqc_used = true;
    plan.aqc_blocks_substituted =
        static_cast<int>(std::count(blocks.substituted.begin(), blocks.substituted.end(), true));
  }

  const int width = plan.n_b + plan.n_l + 1;
  const int ancilla = width - 1;
  qc::Circuit c(width, 1);
  c.add(qc::Gate::unitary(state_preparation(b), iota_vec(0, plan.n_b)));

  const qc::Circuit qpe = build_qpe(u, plan.n_l, plan.n_b, overrides);
  const std::vector<int> qpe_map = iota_vec(0, plan.n_b + plan.n_l);
  c.append(qpe, qpe_map);
  std::vector<int> inv_map = iota_vec(plan.n_b, plan.n_l);
  inv_map.push_back(ancilla);
  c.append(eigen_inversion_block(plan.n_l, plan.inversion_constant, grid, plan.cutoff), inv_map);
  c.append(qpe.inverse(), qpe_map);
  c.add(qc::Gate::measure(ancilla, 0));

  if (plan_out) *plan_out = plan;
  return c;
}

HHLSolve solve(const ComplexMatrix& a, const ComplexVector& b, const HHLConfig& cfg) {
  HHLSolve out;
  const qc::Circuit c = build_hhl(a, b, cfg, &out.plan);
  out.circuit_width = c.width();
  out.circuit_depth = c.depth();
  out.two_qubit_count = c.two_qubit_count();
  out.cnot_cost = c.cnot_cost();
  const double norm_factor =
      1.0 / (out.plan.inversion_constant * out.plan.inversion_constant * out.plan.scale * out.plan.scale);
  const int ancilla = c.width() - 1;

  if (cfg.backend == BackendKind::ExactStatevector) {
    const qc::Statevector final_state = qc::run(c);
    out.success_probability = final_state.probability(ancilla, 1);
    const Eigen::Index sys = Eigen::Index{1} << out.plan.n_b;
    const Eigen::Index anc_bit = Eigen::Index{1} << ancilla;
    ComplexVector x(sys);
    for (Eigen::Index i = 0; i < sys; ++i) x(i) = final_state.amplitudes()(anc_bit | i);
    const double xn = x.norm();
    out.solution_direction = xn > 0.0 ? ComplexVector(x / xn) : x;
  } else {
    const qc::Histogram h = qc::sample(c, cfg.shots, cfg.seed);
    const auto it = h.find("1");
    const double ones = it == h.end() ? 0.0 : static_cast<double>(it->second);
    const double shots = static_cast<double>(cfg.shots);
    out.success_probability = ones / shots;
    const double p = out.success_probability;
    out.standard_error = std::sqrt(p * (1.0 - p) / shots) * norm_factor;
  }
  out.norm_squared = out.success_probability * norm_factor;
  return out;
}

Conditioned jacobi_condition(const RealMatrix& m) {
  Conditioned out;
  out.d.resize(m.rows());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (!(m(i, i) > 0.0))
      throw Error(ErrorCode::NotPositiveDefinite, "conditioning needs a positive diagonal");
    out.d(i) = 1.0 / std::sqrt(m(i, i));
  }
  out.matrix = out.d.asDiagonal() * m * out.d.asDiagonal();
  out.matrix = 0.5 * (out.matrix + out.matrix.transpose()).eval();
  return out;
}

HHLResult quadratic_form(const RealMatrix& k, const RealVector& y, const HHLConfig& cfg) {
  cfg.validate();
  if (k.rows() != k.cols() || k.rows() != y.size())
    throw Error(ErrorCode::DimensionMismatch, "quadratic_form: K must be square and match y");

  HHLResult r;
  r.backend = cfg.backend;
  r.rescale = cfg.rescale;
  r.shots = cfg.backend == BackendKind::Sampled ? cfg.shots : 0;
  r.condition_number_before = numerics::condition_number(k);

  RealMatrix kappa_prime;
  RealVector rhs;
  double back_scale = 0.0;
  if (cfg.rescale == RescaleMode::Exact) {
    const Conditioned kc = jacobi_condition(k);
    r.condition_number_after = numerics::condition_number(kc.matrix);
    kappa_prime = numerics::psd_sqrt(kc.matrix);
    rhs = kc.d.asDiagonal() * y;
    back_scale = rhs.squaredNorm();
  } else {
    const RealMatrix kappa = numerics::psd_sqrt(k);
    const Conditioned kc = jacobi_condition(kappa);
    kappa_prime = kc.matrix;
    const double cond_root = numerics::condition_number(kappa_prime);
    r.condition_number_after = cond_root * cond_root;
    rhs = y;
    const double d_min = kappa.diagonal().cwiseSqrt().minCoeff();
    back_scale = y.squaredNorm() * d_min;
  }
  r.rhs_scale = back_scale;
  if (!std::isfinite(r.condition_number_after))
    throw Error(ErrorCode::NotPositiveDefinite, "quadratic_form: conditioned matrix is singular");

  const double rhs_norm = rhs.norm();
  if (rhs_norm == 0.0) return r;

  HHLConfig run_cfg = cfg;
  if (!run_cfg.eval_qubits)
    run_cfg.eval_qubits = size_eval_register(r.condition_number_after, cfg.eval_qubits_cap);

  const ComplexMatrix a = kappa_prime.cast<cplx>();
  const ComplexVector b = (rhs / rhs_norm).cast<cplx>();
  const HHLSolve s = solve(a, b, run_cfg);

  r.quadratic_form = back_scale * s.norm_squared;
  r.standard_error = back_scale * s.standard_error;
  r.success_probability = s.success_probability;
  r.eval_qubits_used = s.plan.n_l;
  r.circuit_width = s.circuit_width;
  r.circuit_depth = s.circuit_depth;
  r.two_qubit_count = s.two_qubit_count;
  r.cnot_cost = s.cnot_cost;
  r.eigenvalue_scale = s.plan.scale;
  r.inversion_constant = s.plan.inversion_constant;
  r.time_param = s.plan.time;
  r.aqc_blocks_substituted = s.plan.aqc_blocks_substituted;
  return r;
}

nlohmann::json to_json(const HHLResult& r) {
  return {{"quadratic_form", r.quadratic_form},
          {"standard_error", r.standard_error},
          {"success_probability", r.success_probability},
          {"eval_qubits_used", r.eval_qubits_used},
          {"circuit_width", r.circuit_width},
          {"circuit_depth", r.circuit_depth},
          {"two_qubit_count", r.two_qubit_count},
          {"cnot_cost", r.cnot_cost},
          {"condition_number_before", r.condition_number_before},
          {"condition_number_after", r.condition_number_after},
          {"rhs_scale", r.rhs_scale},
          {"eigenvalue_scale", r.eigenvalue_scale},
          {"inversion_constant", r.inversion_constant},
          {"time_param", r.time_param},
          {"backend", to_string(r.backend)},
          {"rescale_mode", to_string(r.rescale)},
          {"shots", r.shots},
          {"aqc_blocks_substituted", r.aqc_blocks_substituted}};
}

nlohmann::json to_json(const HHLConfig& c) {
  nlohmann::json j{{"eval_qubits_cap", c.eval_qubits_cap},
                   {"scale_headroom", c.scale_headroom},
                   {"filter_fraction", c.filter_fraction},
                   {"backend", to_string(c.backend)},
                   {"shots", c.shots},
                   {"seed", c.seed},
                   {"rescale", to_string(c.rescale)}};
  if (c.eval_qubits) j["eval_qubits"] = *c.eval_qubits;
  if (c.time_param) j["time_param"] = *c.time_param;
  if (c.inversion_constant) j["inversion_constant"] = *c.inversion_constant;
  if (c.eigenvalue_scale) j["eigenvalue_scale"] = *c.eigenvalue_scale;
  if (c.aqc) j["aqc"] = {{"cnot_budget", c.aqc->cnot_budget}, {"tolerance", c.aqc->options.tolerance}};
  return j;
}

}  // namespace qgp::hhl
