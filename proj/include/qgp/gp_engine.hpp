#pragma once

// Negative log marginal likelihood with a pluggable quadratic-form backend,
// hyperparameter fitting, and the predictive posterior.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "qgp/gp_kernels.hpp"
#include "qgp/hhl.hpp"

namespace qgp::gp {

struct TrainingSet {
  ChannelTimes times;
  RealVector y_ii;
  RealVector y_vj;
  RealVector y_vi;

  void validate() const;
  const RealVector& values(Channel c) const;
  RealVector stacked() const;  // [y_ii, y_vj, y_vi]
  Eigen::Index total() const { return times.total(); }
};

enum class BackendKind { Classical, HHLExact, HHLSampled };

const char* to_string(BackendKind k) noexcept;
BackendKind parse_backend(const std::string& s);

struct Backend {
  BackendKind kind = BackendKind::Classical;
  hhl::HHLConfig hhl;
  double target_condition = 512.0;
  double floor = 1e-10;
  // Classical backend on the same regularized matrix the HHL backends see.
  bool regularize_classical = false;

  static Backend classical();
  static Backend hhl_exact(hhl::HHLConfig cfg = {});
  static Backend hhl_sampled(hhl::HHLConfig cfg = {});
  bool quantum() const { return kind != BackendKind::Classical; }
  void validate() const;
};

struct Regularized {
  RealMatrix matrix;
  double lambda = 0.0;
};

/// K + lambda I with lambda the smallest shift (>= floor) bringing the
/// condition number down to target_condition.
Regularized regularize(const RealMatrix& k, double target_condition = 512.0, double floor = 1e-10);

struct NlmlTerms {
  double value = 0.0;
  double quadratic = 0.0;  // y^T K^-1 y
  double logdet = 0.0;
  double constant = 0.0;   // N/2 log 2 pi
  double standard_error = 0.0;
  double lambda_reg = 0.0;
  std::optional<hhl::HHLResult> hhl;
};

/// NLML for an already assembled covariance (noise included).
NlmlTerms nlml_terms(const RealMatrix& k, const RealVector& y, const Backend& backend);
NlmlTerms nlml_terms(const LineHyperParams& theta, const TrainingSet& data, const Backend& backend);
double nlml(const LineHyperParams& theta, const TrainingSet& data, const Backend& backend);

struct BackendStats {
  int evaluations = 0;
  int failures = 0;
  int max_eval_qubits = 0;
  int circuit_width = 0;
  int circuit_depth = 0;
  int two_qubit_count = 0;
  std::int64_t cnot_cost = 0;
  double max_condition_after = 0.0;
  double mean_success_probability = 0.0;
  double max_lambda_reg = 0.0;
};

struct FitOptions {
  int max_evals = 0;       // objective evaluations; 0 picks 100 for quantum backends
  int starts = 0;          // 0: 6 classical, 1 quantum
  int restarts = 3;        // chained simplex runs per start
  int evals_per_run = 2000;
  double xatol = 1e-6;
  double fatol = 1e-8;
  double initial_step = 1.0;  // in log space
  double start_spread = 3.0;  // std of log R / log L perturbation for extra starts
  std::uint64_t seed = 0;
};

struct FitResult {
  LineHyperParams init;
  LineHyperParams theta_star;
  double best_nlml = 0.0;
  std::vector<double> objective_trace;  // every evaluation, +inf when rejected
  std::vector<double> nlml_trace;       // best so far
  int iterations = 0;                   // objective evaluations spent
  int max_iterations = 0;
  BackendKind backend = BackendKind::Classical;
  BackendStats backend_stats;
  double wall_time = 0.0;
};

/// Scale-aware starting point: per-channel sample variances, weights
/// 1/(0.25 window)^2, R = L = 1, noise 1% of each channel's variance.
LineHyperParams default_init(const TrainingSet& data, double window);

FitResult fit(const TrainingSet& data, const LineHyperParams& init, const FitOptions& opts, const Backend& backend);

struct Prediction {
  RealVector mean;
  RealVector variance;
  double max_clamp = 0.0;  // largest negative variance clamped to zero
};

/// Posterior mean and latent variance of channel s at each t*. Always a
/// classical solve; one factorization serves every t*.
Prediction predict(Channel s, const RealVector& t_stars, const TrainingSet& data, const LineHyperParams& theta);

nlohmann::json to_json(const LineHyperParams& p);
LineHyperParams line_params_from_json(const nlohmann::json& j);
nlohmann::json to_json(const BackendStats& s);
nlohmann::json to_json(const FitResult& r);

}  // namespace qgp::gp
