#pragma once

// Experiment configuration (JSON) and small CSV helpers shared by the CLI.

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "qgp/gp_engine.hpp"
#include "qgp/lpe.hpp"

namespace qgp::config {

struct NoiseConfig {
  double relative = 1e-4;  // std as a fraction of each channel's amplitude
  std::optional<double> sigma_ii, sigma_vj, sigma_vi;  // absolute std, overrides relative
  std::uint64_t seed = 0;

  double ii(const lpe::NetworkConfig& n) const;
  double vj(const lpe::NetworkConfig& n) const;
  double vi(const lpe::NetworkConfig& n) const;
};

struct SamplingConfig {
  lpe::Counts counts;
  double jitter = 0.4;
  std::uint64_t seed = 0;
};

struct AqcConfig {
  bool enabled = false;
  int cnot_budget = 3;
  aqc::CompileOptions options;
};

struct ExperimentConfig {
  lpe::NetworkConfig network;
  NoiseConfig noise;
  SamplingConfig sampling;
  gp::Backend backend;
  gp::FitOptions optimizer;
  AqcConfig aqc;
  int n_points = 200;
  std::string output = "out";

  void validate() const;
  /// Backend with the hhl and aqc sections folded in.
  gp::Backend resolved_backend() const;
};

/// Strict load: unknown keys are rejected with their dotted path.
ExperimentConfig from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& c);
ExperimentConfig load(const std::string& path);

nlohmann::json read_json(const std::string& path);
void write_text(const std::string& path, const std::string& text);
std::string dump(const nlohmann::json& j);

/// %.17g formatting, comma separated, header row.
std::string format_csv(const std::vector<std::string>& header, const std::vector<const RealVector*>& columns);

/// Plain numeric CSV; a non-numeric first row is treated as a header.
RealMatrix read_matrix_csv(const std::string& path);

}  // namespace qgp::config
