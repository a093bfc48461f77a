#pragma once

// Two-node line experiment: steady-state signals from the short-line model,
// Gaussian measurement noise, training-sample extraction, R/L estimation and
// the regression grid.

#include <cstdint>
#include <optional>
#include <vector>

#include "json.hpp"
#include "qgp/gp_engine.hpp"

namespace qgp::lpe {

struct NetworkConfig {
  double R_true = 0.064;       // ohm
  double L_true = 2.64e-5;     // H
  double frequency = 50.0;     // Hz
  double v_amplitude = 326.6;  // V, 230 V rms
  double v_phase = 0.0;        // rad
  double i_amplitude = 100.0;  // A
  std::optional<double> i_phase;  // rad; lags v_j by the line impedance angle when unset
  double window = 0.02;        // s
  int grid_intervals = 22000;

  double omega() const;
  double period() const;
  double current_phase() const;
  void validate() const;
};

struct SignalBundle {
  NetworkConfig network;
  RealVector t;
  RealVector i_i, v_j, v_i;
  RealVector i_i_noisy, v_j_noisy, v_i_noisy;
  double var_ii = 0.0, var_vj = 0.0, var_vi = 0.0;
  std::uint64_t noise_seed = 0;
};

struct CleanSample {
  double i_i, v_j, v_i;
};
CleanSample clean_signal(const NetworkConfig& cfg, double t);

/// grid_intervals + 1 evenly spaced points over [0, window].
RealVector default_grid(const NetworkConfig& cfg);

SignalBundle simulate_signals(const NetworkConfig& cfg, const RealVector& grid);
SignalBundle add_noise(SignalBundle bundle, double sigma_ii, double sigma_vj, double sigma_vi, std::uint64_t seed);

struct Counts {
  int n_vi = 10;
  int n_ii = 11;
  int n_vj = 11;
};

/// Per channel: t_k = (k + 1/2) T/n + jitter U(-1/2, 1/2) T/n over one period,
/// snapped to the nearest grid point; values from the noisy signals.
gp::TrainingSet sample_training(const SignalBundle& bundle, const Counts& counts, double jitter, std::uint64_t seed);

double percent_error(double estimate, double truth);

struct EstimateOptions {
  Counts counts;
  double jitter = 0.4;
  std::uint64_t sample_seed = 0;
  gp::FitOptions fit;
  gp::FitOptions warm_fit;  // classical pre-fit for quantum backends
  std::optional<gp::LineHyperParams> init;
};

struct EstimateReport {
  double R_hat = 0.0, L_hat = 0.0;
  double error_R_percent = 0.0, error_L_percent = 0.0;
  gp::TrainingSet training;
  gp::FitResult fit;
  std::optional<gp::FitResult> warm_start;
};

EstimateReport estimate(const SignalBundle& bundle, const gp::Backend& backend, const EstimateOptions& opts);

struct ChannelTable {
  gp::Channel channel;
  RealVector t, mean, variance, truth;
  double max_clamp = 0.0;
};

/// n_points uniform over one period (t = k T / n), per channel.
std::vector<ChannelTable> prediction_grid(const NetworkConfig& cfg, const gp::TrainingSet& data,
                                          const gp::LineHyperParams& theta, int n_points = 200);

double rms_error(const ChannelTable& t);
double band_coverage(const ChannelTable& t, double n_sigma = 2.0);

nlohmann::json to_json(const NetworkConfig& c);
NetworkConfig network_from_json(const nlohmann::json& j);
nlohmann::json to_json(const gp::TrainingSet& d);
gp::TrainingSet training_from_json(const nlohmann::json& j);

}  // namespace qgp::lpe
