#include "qgp/gp_engine.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <random>

#include "qgp/error.hpp"
#include "qgp/nelder_mead.hpp"

namespace qgp::gp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kLog2Pi = std::log(2.0 * M_PI);

void check_channel(const RealVector& t, const RealVector& y, const char* name) {
  if (t.size() == 0) throw Error(ErrorCode::EmptyChannel, std::string("channel ") + name + " is empty");
  if (t.size() != y.size())
    throw Error(ErrorCode::DimensionMismatch, std::string("channel ") + name + ": times and values differ in length");
  for (Eigen::Index i = 1; i < t.size(); ++i)
    if (!(t(i) > t(i - 1)))
      throw Error(ErrorCode::InvalidArgument, std::string("channel ") + name + ": times must be strictly increasing");
}

double json_number(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number())
    throw Error(ErrorCode::Config, std::string("missing numeric field '") + key + "'");
  return j.at(key).get<double>();
}

}  // namespace

void TrainingSet::validate() const {
  check_channel(times.ii, y_ii, "i_i");
  check_channel(times.vj, y_vj, "v_j");
  check_channel(times.vi, y_vi, "v_i");
}

const RealVector& TrainingSet::values(Channel c) const {
  switch (c) {
    case Channel::CurrentI: return y_ii;
    case Channel::VoltageJ: return y_vj;
    case Channel::VoltageI: return y_vi;
  }
  throw Error(ErrorCode::UnknownChannel, "unknown channel");
}

RealVector TrainingSet::stacked() const {
  RealVector y(y_ii.size() + y_vj.size() + y_vi.size());
  y << y_ii, y_vj, y_vi;
  return y;
}

const char* to_string(BackendKind k) noexcept {
  switch (k) {
    case BackendKind::Classical: return "classical";
    case BackendKind::HHLExact: return "hhl-exact";
    case BackendKind::HHLSampled: return "hhl-sampled";
  }
  return "?";
}

BackendKind parse_backend(const std::string& s) {
  if (s == "classical") return BackendKind::Classical;
  if (s == "hhl-exact" || s == "hhl_exact") return BackendKind::HHLExact;
  if (s == "hhl-sampled" || s == "hhl_sampled") return BackendKind::HHLSampled;
  throw Error(ErrorCode::Config, "backend: expected classical|hhl-exact|hhl-sampled, got '" + s + "'");
}

Backend Backend::classical() { return {}; }

Backend Backend::hhl_exact(hhl::HHLConfig cfg) {
  Backend b;
  b.kind = BackendKind::HHLExact;
  cfg.backend = hhl::BackendKind::ExactStatevector;
  b.hhl = std::move(cfg);
  return b;
}

Backend Backend::hhl_sampled(hhl::HHLConfig cfg) {
  Backend b;
  b.kind = BackendKind::HHLSampled;
  cfg.backend = hhl::BackendKind::Sampled;
  b.hhl = std::move(cfg);
  return b;
}

void Backend::validate() const {
  if (!(target_condition > 1.0)) throw Error(ErrorCode::InvalidArgument, "target_condition must be > 1");
  if (!(floor >= 0.0)) throw Error(ErrorCode::InvalidArgument, "regularization floor must be >= 0");
  if (quantum()) {
    const auto want = kind == BackendKind::HHLExact ? hhl::BackendKind::ExactStatevector : hhl::BackendKind::Sampled;
    if (hhl.backend != want) throw Error(ErrorCode::InvalidArgument, "backend kind and HHL backend disagree");
    hhl.validate();
  }
}

Regularized regularize(const RealMatrix& k, double target_condition, double floor) {
  const auto ed = numerics::eigh(k);
  const double lmin = ed.eigenvalues(0);
  const double lmax = ed.eigenvalues(ed.eigenvalues.size() - 1);
  double lambda = 0.0;
  const double excess = lmax - target_condition * lmin;
  if (excess > 0.0) {
    if (!(target_condition > 1.0))
      throw Error(ErrorCode::InvalidArgument, "regularize: target_condition must be > 1");
    lambda = excess / (target_condition - 1.0);
  }
  lambda = std::max({lambda, floor, 0.0});
  Regularized out{k, lambda};
  out.matrix.diagonal().array() += lambda;
  return out;
}

NlmlTerms nlml_terms(const RealMatrix& k, const RealVector& y, const Backend& backend) {
  backend.validate();
  if (k.rows() != k.cols() || k.rows() != y.size())
    throw Error(ErrorCode::DimensionMismatch, "nlml: K must be square and match y");
  NlmlTerms t;
  t.constant = 0.5 * static_cast<double>(y.size()) * kLog2Pi;

  if (backend.kind == BackendKind::Classical && !backend.regularize_classical) {
    const auto chol = numerics::cholesky_logdet(k);
    t.quadratic = y.dot(numerics::cholesky_solve(chol.lower, y));
    t.logdet = chol.logdet;
  } else {
    // Unit-diagonal scaling first, then the shift: the matrix handed on has
    // condition number <= target, and K_eff = K + lambda D^-2.
    const hhl::Conditioned c = hhl::jacobi_condition(k);
    const Regularized r = regularize(c.matrix, backend.target_condition, backend.floor);
    t.lambda_reg = r.lambda;
    const RealVector dy = c.d.cwiseProduct(y);
    const auto chol = numerics::cholesky_logdet(r.matrix);
    t.logdet = chol.logdet - 2.0 * c.d.array().log().sum();
    if (backend.quantum()) {
      hhl::HHLResult h = hhl::quadratic_form(r.matrix, dy, backend.hhl);
      t.quadratic = h.quadratic_form;
      t.standard_error = 0.5 * h.standard_error;
      t.hhl = std::move(h);
    } else {
      t.quadratic = dy.dot(numerics::cholesky_solve(chol.lower, dy));
    }
  }
  t.value = 0.5 * t.quadratic + 0.5 * t.logdet + t.constant;
  return t;
}

NlmlTerms nlml_terms(const LineHyperParams& theta, const TrainingSet& data, const Backend& backend) {
  theta.validate();
  data.validate();
  RealMatrix k = assemble_joint(data.times, theta);
  k.diagonal() += noise_diagonal(data.times, theta);
  return nlml_terms(k, data.stacked(), backend);
}

double nlml(const LineHyperParams& theta, const TrainingSet& data, const Backend& backend) {
  return nlml_terms(theta, data, backend).value;
}

LineHyperParams default_init(const TrainingSet& data, double window) {
  data.validate();
  if (!(window > 0.0)) throw Error(ErrorCode::InvalidArgument, "default_init: window must be > 0");
  auto var = [](const RealVector& v) {
    const double m = v.mean();
    const double s = (v.array() - m).square().mean();
    return s > 0.0 ? s : 1.0;
  };
  const double w = 1.0 / ((0.25 * window) * (0.25 * window));
  LineHyperParams p;
  p.current_kernel = {var(data.y_ii), w};
  p.voltage_kernel = {var(data.y_vj), w};
  p.R = 1.0;
  p.L = 1.0;
  p.noise_ii = 0.01 * var(data.y_ii);
  p.noise_vj = 0.01 * var(data.y_vj);
  p.noise_vi = 0.01 * var(data.y_vi);
  return p;
}

FitResult fit(const TrainingSet& data, const LineHyperParams& init, const FitOptions& opts, const Backend& backend) {
  const auto t0 = std::chrono::steady_clock::now();
  data.validate();
  init.validate();
  backend.validate();

  const int starts = opts.starts > 0 ? opts.starts : (backend.quantum() ? 1 : 6);
  const int restarts = std::max(1, opts.restarts);
  const int per_run = std::max(1, opts.evals_per_run);
  const int budget =
      opts.max_evals > 0 ? opts.max_evals : (backend.quantum() ? 100 : starts * restarts * per_run);

  FitResult res;
  res.init = init;
  res.backend = backend.kind;
  res.max_iterations = budget;

  double best = kInf;
  std::array<double, LineHyperParams::kSize> best_x{};
  double success_sum = 0.0;
  int success_count = 0;
  BackendStats& st = res.backend_stats;

  auto objective = [&](const std::vector<double>& x) {
    std::array<double, LineHyperParams::kSize> p{};
    for (int i = 0; i < LineHyperParams::kSize; ++i) p[i] = std::exp(x[i]);
    Backend b = backend;
    if (b.kind == BackendKind::HHLSampled) b.hhl.seed = backend.hhl.seed + static_cast<std::uint64_t>(st.evaluations);
    ++st.evaluations;
    double v = kInf;
    try {
      const LineHyperParams theta = LineHyperParams::from_array(p);
      theta.validate();
      const NlmlTerms t = nlml_terms(theta, data, b);
      v = std::isfinite(t.value) ? t.value : kInf;
      st.max_lambda_reg = std::max(st.max_lambda_reg, t.lambda_reg);
      if (t.hhl) {
        st.max_eval_qubits = std::max(st.max_eval_qubits, t.hhl->eval_qubits_used);
        st.max_condition_after = std::max(st.max_condition_after, t.hhl->condition_number_after);
        st.circuit_width = std::max(st.circuit_width, t.hhl->circuit_width);
        st.circuit_depth = std::max(st.circuit_depth, t.hhl->circuit_depth);
        st.two_qubit_count = std::max(st.two_qubit_count, t.hhl->two_qubit_count);
        st.cnot_cost = std::max(st.cnot_cost, t.hhl->cnot_cost);
        success_sum += t.hhl->success_probability;
        ++success_count;
      }
    } catch (const Error&) {
      ++st.failures;
    }
    res.objective_trace.push_back(v);
    if (v < best) {
      best = v;
      best_x = p;
    }
    res.nlml_trace.push_back(best);
    return v;
  };

  std::vector<double> x0(LineHyperParams::kSize);
  const auto init_arr = init.to_array();
  for (int i = 0; i < LineHyperParams::kSize; ++i) x0[i] = std::log(init_arr[i]);

  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> normal(0.0, opts.start_spread);
  for (int s = 0; s < starts && st.evaluations < budget; ++s) {
    std::vector<double> x = x0;
    if (s > 0) {
      x[4] += normal(rng);
      x[5] += normal(rng);
    }
    for (int r = 0; r < restarts && st.evaluations < budget; ++r) {
      opt::NelderMeadOptions nm;
      nm.max_evals = std::min(per_run, budget - st.evaluations);
      nm.xatol = opts.xatol;
      nm.fatol = opts.fatol;
      nm.initial_step = opts.initial_step;
      x = opt::nelder_mead(objective, x, nm).x;
    }
  }

  if (!std::isfinite(best)) throw Error(ErrorCode::NotPositiveDefinite, "fit: every objective evaluation failed");
  res.theta_star = LineHyperParams::from_array(best_x);
  res.best_nlml = best;
  res.iterations = st.evaluations;
  st.mean_success_probability = success_count > 0 ? success_sum / success_count : 0.0;
  res.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

Prediction predict(Channel s, const RealVector& t_stars, const TrainingSet& data, const LineHyperParams& theta) {
  theta.validate();
  data.validate();
  RealMatrix k = assemble_joint(data.times, theta);
  k.diagonal() += noise_diagonal(data.times, theta);
  const auto chol = numerics::cholesky_logdet(k);
  const RealVector alpha = numerics::cholesky_solve(chol.lower, data.stacked());

  Prediction out;
  out.mean.resize(t_stars.size());
  out.variance.resize(t_stars.size());
  double clamp = 0.0;
#pragma omp parallel for reduction(max : clamp) if (t_stars.size() > 64)
  for (Eigen::Index i = 0; i < t_stars.size(); ++i) {
    const double ts = t_stars(i);
    const RealVector q = cross_vectors(s, ts, data.times, theta);
    out.mean(i) = q.dot(alpha);
    const RealVector v = chol.lower.triangularView<Eigen::Lower>().solve(q);
    const double var = cross_kernel(s, s, ts, ts, theta) - v.squaredNorm();
    if (var < 0.0) clamp = std::max(clamp, -var);
    out.variance(i) = std::max(var, 0.0);
  }
  out.max_clamp = clamp;
  return out;
}

nlohmann::json to_json(const LineHyperParams& p) {
  return {{"current_variance", p.current_kernel.variance},
          {"current_weight", p.current_kernel.weight},
          {"voltage_variance", p.voltage_kernel.variance},
          {"voltage_weight", p.voltage_kernel.weight},
          {"R", p.R},
          {"L", p.L},
          {"noise_ii", p.noise_ii},
          {"noise_vj", p.noise_vj},
          {"noise_vi", p.noise_vi}};
}

LineHyperParams line_params_from_json(const nlohmann::json& j) {
  LineHyperParams p;
  p.current_kernel = {json_number(j, "current_variance"), json_number(j, "current_weight")};
  p.voltage_kernel = {json_number(j, "voltage_variance"), json_number(j, "voltage_weight")};
  p.R = json_number(j, "R");
  p.L = json_number(j, "L");
  p.noise_ii = json_number(j, "noise_ii");
  p.noise_vj = json_number(j, "noise_vj");
  p.noise_vi = json_number(j, "noise_vi");
  p.validate();
  return p;
}

nlohmann::json to_json(const BackendStats& s) {
  return {{"evaluations", s.evaluations},
          {"failures", s.failures},
          {"eval_qubits_used", s.max_eval_qubits},
          {"circuit_width", s.circuit_width},
          {"circuit_depth", s.circuit_depth},
          {"two_qubit_count", s.two_qubit_count},
          {"cnot_cost", s.cnot_cost},
          {"max_condition_after", s.max_condition_after},
          {"mean_success_probability", s.mean_success_probability},
          {"max_lambda_reg", s.max_lambda_reg}};
}

nlohmann::json to_json(const FitResult& r) {
  nlohmann::json trace = nlohmann::json::array();
  for (double v : r.nlml_trace) trace.push_back(std::isfinite(v) ? nlohmann::json(v) : nlohmann::json());
  return {{"backend", to_string(r.backend)},
          {"init", to_json(r.init)},
          {"theta_star", to_json(r.theta_star)},
          {"best_nlml", r.best_nlml},
          {"iterations", r.iterations},
          {"max_iterations", r.max_iterations},
          {"iteration_unit", "objective evaluations"},
          {"backend_stats", to_json(r.backend_stats)},
          {"nlml_trace", trace}};
}

}  // namespace qgp::gp
