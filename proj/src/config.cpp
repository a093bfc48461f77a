#include "qgp/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "qgp/error.hpp"

namespace qgp::config {

namespace {

using json = nlohmann::json;

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  if (!j.is_object()) throw Error(ErrorCode::Config, where + ": expected an object");
  for (const auto& [key, _] : j.items())
    if (!known.count(key)) throw Error(ErrorCode::Config, "unknown key '" + where + "." + key + "'");
}

double num(const json& j, const std::string& key, const std::string& where) {
  if (!j.at(key).is_number()) throw Error(ErrorCode::Config, where + "." + key + ": expected a number");
  return j.at(key).get<double>();
}

int integer(const json& j, const std::string& key, const std::string& where) {
  if (!j.at(key).is_number_integer()) throw Error(ErrorCode::Config, where + "." + key + ": expected an integer");
  return j.at(key).get<int>();
}

std::uint64_t uinteger(const json& j, const std::string& key, const std::string& where) {
  if (!j.at(key).is_number_unsigned())
    throw Error(ErrorCode::Config, where + "." + key + ": expected a non-negative integer");
  return j.at(key).get<std::uint64_t>();
}

bool boolean(const json& j, const std::string& key, const std::string& where) {
  if (!j.at(key).is_boolean()) throw Error(ErrorCode::Config, where + "." + key + ": expected true or false");
  return j.at(key).get<bool>();
}

std::string str(const json& j, const std::string& key, const std::string& where) {
  if (!j.at(key).is_string()) throw Error(ErrorCode::Config, where + "." + key + ": expected a string");
  return j.at(key).get<std::string>();
}

void read_hhl(const json& j, gp::Backend& b) {
  const std::string w = "hhl";
  reject_unknown(j, {"eval_qubits_cap", "eval_qubits", "scale_headroom", "filter_fraction", "shots", "seed",
                     "rescale", "target_condition", "floor", "regularize_classical"},
                 w);
  hhl::HHLConfig& h = b.hhl;
  for (const auto& [key, v] : j.items()) {
    if (key == "eval_qubits_cap") h.eval_qubits_cap = integer(j, key, w);
    else if (key == "eval_qubits") {
      if (v.is_null()) h.eval_qubits.reset();
      else h.eval_qubits = integer(j, key, w);
    }
    else if (key == "scale_headroom") h.scale_headroom = num(j, key, w);
    else if (key == "filter_fraction") h.filter_fraction = num(j, key, w);
    else if (key == "shots") h.shots = uinteger(j, key, w);
    else if (key == "seed") h.seed = uinteger(j, key, w);
    else if (key == "rescale") {
      try {
        h.rescale = hhl::parse_rescale_mode(str(j, key, w));
      } catch (const Error& e) {
        throw Error(ErrorCode::Config, std::string("hhl.") + e.what());
      }
    }
    else if (key == "target_condition") b.target_condition = num(j, key, w);
    else if (key == "floor") b.floor = num(j, key, w);
    else if (key == "regularize_classical") b.regularize_classical = boolean(j, key, w);
  }
}

void read_optimizer(const json& j, gp::FitOptions& o) {
  const std::string w = "optimizer";
  reject_unknown(j, {"max_evals", "starts", "restarts", "evals_per_run", "xatol", "fatol", "initial_step",
                     "start_spread", "seed"},
                 w);
  for (const auto& [key, v] : j.items()) {
    if (key == "max_evals") o.max_evals = integer(j, key, w);
    else if (key == "starts") o.starts = integer(j, key, w);
    else if (key == "restarts") o.restarts = integer(j, key, w);
    else if (key == "evals_per_run") o.evals_per_run = integer(j, key, w);
    else if (key == "xatol") o.xatol = num(j, key, w);
    else if (key == "fatol") o.fatol = num(j, key, w);
    else if (key == "initial_step") o.initial_step = num(j, key, w);
    else if (key == "start_spread") o.start_spread = num(j, key, w);
    else if (key == "seed") o.seed = uinteger(j, key, w);
  }
}

}  // namespace

double NoiseConfig::ii(const lpe::NetworkConfig& n) const { return sigma_ii ? *sigma_ii : relative * n.i_amplitude; }
double NoiseConfig::vj(const lpe::NetworkConfig& n) const { return sigma_vj ? *sigma_vj : relative * n.v_amplitude; }
double NoiseConfig::vi(const lpe::NetworkConfig& n) const { return sigma_vi ? *sigma_vi : relative * n.v_amplitude; }

void ExperimentConfig::validate() const {
  network.validate();
  if (noise.relative < 0.0) throw Error(ErrorCode::Config, "noise.relative must be >= 0");
  for (const auto& s : {noise.sigma_ii, noise.sigma_vj, noise.sigma_vi})
    if (s && *s < 0.0) throw Error(ErrorCode::Config, "noise sigmas must be >= 0");
  if (sampling.counts.n_ii < 2 || sampling.counts.n_vj < 2 || sampling.counts.n_vi < 2)
    throw Error(ErrorCode::Config, "sampling.counts must be >= 2");
  if (sampling.jitter < 0.0 || sampling.jitter >= 1.0) throw Error(ErrorCode::Config, "sampling.jitter must be in [0, 1)");
  if (optimizer.max_evals < 0 || optimizer.starts < 0 || optimizer.restarts < 1 || optimizer.evals_per_run < 1)
    throw Error(ErrorCode::Config, "optimizer: counts out of range");
  if (aqc.cnot_budget < 0) throw Error(ErrorCode::Config, "aqc.cnot_budget must be >= 0");
  if (n_points < 1) throw Error(ErrorCode::Config, "prediction.n_points must be >= 1");
  try {
    resolved_backend().validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::Config, std::string("hhl: ") + e.what());
  }
}

gp::Backend ExperimentConfig::resolved_backend() const {
  gp::Backend b = backend;
  b.hhl.backend = b.kind == gp::BackendKind::HHLSampled ? hhl::BackendKind::Sampled : hhl::BackendKind::ExactStatevector;
  if (aqc.enabled) b.hhl.aqc = hhl::AqcPassthrough{aqc.cnot_budget, aqc.options};
  else b.hhl.aqc.reset();
  return b;
}

ExperimentConfig from_json(const json& j) {
  reject_unknown(j, {"network", "noise", "sampling", "backend", "optimizer", "hhl", "aqc", "prediction", "output"}, "config");
  ExperimentConfig c;
  if (j.contains("network")) c.network = lpe::network_from_json(j.at("network"));
  if (j.contains("noise")) {
    const json& n = j.at("noise");
    reject_unknown(n, {"relative", "sigma_ii", "sigma_vj", "sigma_vi", "seed"}, "noise");
    for (const auto& [key, v] : n.items()) {
      if (key == "relative") c.noise.relative = num(n, key, "noise");
      else if (key == "sigma_ii") c.noise.sigma_ii = num(n, key, "noise");
      else if (key == "sigma_vj") c.noise.sigma_vj = num(n, key, "noise");
      else if (key == "sigma_vi") c.noise.sigma_vi = num(n, key, "noise");
      else if (key == "seed") c.noise.seed = uinteger(n, key, "noise");
    }
  }
  if (j.contains("sampling")) {
    const json& s = j.at("sampling");
    reject_unknown(s, {"counts", "jitter", "seed"}, "sampling");
    for (const auto& [key, v] : s.items()) {
      if (key == "jitter") c.sampling.jitter = num(s, key, "sampling");
      else if (key == "seed") c.sampling.seed = uinteger(s, key, "sampling");
      else if (key == "counts") {
        reject_unknown(v, {"n_vi", "n_ii", "n_vj"}, "sampling.counts");
        if (v.contains("n_vi")) c.sampling.counts.n_vi = integer(v, "n_vi", "sampling.counts");
        if (v.contains("n_ii")) c.sampling.counts.n_ii = integer(v, "n_ii", "sampling.counts");
        if (v.contains("n_vj")) c.sampling.counts.n_vj = integer(v, "n_vj", "sampling.counts");
      }
    }
  }
  if (j.contains("backend")) c.backend.kind = gp::parse_backend(str(j, "backend", "config"));
  if (j.contains("optimizer")) read_optimizer(j.at("optimizer"), c.optimizer);
  if (j.contains("hhl")) read_hhl(j.at("hhl"), c.backend);
  if (j.contains("aqc")) {
    const json& a = j.at("aqc");
    reject_unknown(a, {"enabled", "cnot_budget", "tolerance", "max_iters", "restarts", "seed"}, "aqc");
    for (const auto& [key, v] : a.items()) {
      if (key == "enabled") c.aqc.enabled = boolean(a, key, "aqc");
      else if (key == "cnot_budget") c.aqc.cnot_budget = integer(a, key, "aqc");
      else if (key == "tolerance") c.aqc.options.tolerance = num(a, key, "aqc");
      else if (key == "max_iters") c.aqc.options.max_iters = integer(a, key, "aqc");
      else if (key == "restarts") c.aqc.options.restarts = integer(a, key, "aqc");
      else if (key == "seed") c.aqc.options.seed = uinteger(a, key, "aqc");
    }
  }
  if (j.contains("prediction")) {
    const json& p = j.at("prediction");
    reject_unknown(p, {"n_points"}, "prediction");
    if (p.contains("n_points")) c.n_points = integer(p, "n_points", "prediction");
  }
  if (j.contains("output")) c.output = str(j, "output", "config");
  c.validate();
  return c;
}

json to_json(const ExperimentConfig& c) {
  json noise{{"relative", c.noise.relative}, {"seed", c.noise.seed}};
  if (c.noise.sigma_ii) noise["sigma_ii"] = *c.noise.sigma_ii;
  if (c.noise.sigma_vj) noise["sigma_vj"] = *c.noise.sigma_vj;
  if (c.noise.sigma_vi) noise["sigma_vi"] = *c.noise.sigma_vi;
  const hhl::HHLConfig& h = c.backend.hhl;
  json hj{{"eval_qubits_cap", h.eval_qubits_cap},
          {"eval_qubits", h.eval_qubits ? json(*h.eval_qubits) : json()},
          {"scale_headroom", h.scale_headroom},
          {"filter_fraction", h.filter_fraction},
          {"shots", h.shots},
          {"seed", h.seed},
          {"rescale", hhl::to_string(h.rescale)},
          {"target_condition", c.backend.target_condition},
          {"floor", c.backend.floor},
          {"regularize_classical", c.backend.regularize_classical}};
  const gp::FitOptions& o = c.optimizer;
  return {{"network", lpe::to_json(c.network)},
          {"noise", noise},
          {"sampling",
           {{"counts", {{"n_vi", c.sampling.counts.n_vi}, {"n_ii", c.sampling.counts.n_ii}, {"n_vj", c.sampling.counts.n_vj}}},
            {"jitter", c.sampling.jitter},
            {"seed", c.sampling.seed}}},
          {"backend", gp::to_string(c.backend.kind)},
          {"optimizer",
           {{"max_evals", o.max_evals},
            {"starts", o.starts},
            {"restarts", o.restarts},
            {"evals_per_run", o.evals_per_run},
            {"xatol", o.xatol},
            {"fatol", o.fatol},
            {"initial_step", o.initial_step},
            {"start_spread", o.start_spread},
            {"seed", o.seed}}},
          {"hhl", hj},
          {"aqc",
           {{"enabled", c.aqc.enabled},
            {"cnot_budget", c.aqc.cnot_budget},
            {"tolerance", c.aqc.options.tolerance},
            {"max_iters", c.aqc.options.max_iters},
            {"restarts", c.aqc.options.restarts},
            {"seed", c.aqc.options.seed}}},
          {"prediction", {{"n_points", c.n_points}}},
          {"output", c.output}};
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::Config, "'" + path + "' is not valid JSON: " + e.what());
  }
}

ExperimentConfig load(const std::string& path) { return from_json(read_json(path)); }

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path + "'");
  out << text;
  if (!out) throw Error(ErrorCode::Io, "write to '" + path + "' failed");
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string format_csv(const std::vector<std::string>& header, const std::vector<const RealVector*>& columns) {
  if (header.size() != columns.size()) throw Error(ErrorCode::DimensionMismatch, "csv: header/column count mismatch");
  std::string out;
  for (std::size_t c = 0; c < header.size(); ++c) out += (c ? "," : "") + header[c];
  out += "\n";
  const Eigen::Index rows = columns.empty() ? 0 : columns[0]->size();
  char buf[40];
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", (*columns[c])(r));
      if (c) out += ",";
      out += buf;
    }
    out += "\n";
  }
  return out;
}

RealMatrix read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (cell.find_first_not_of(" \t", used) != std::string::npos) numeric = false;
      } catch (const std::exception&) {
        numeric = false;
      }
    }
    if (!numeric) {
      if (first) {
        first = false;
        continue;
      }
      throw Error(ErrorCode::Config, "'" + path + "': non-numeric cell");
    }
    first = false;
    if (!rows.empty() && row.size() != rows[0].size())
      throw Error(ErrorCode::DimensionMismatch, "'" + path + "': ragged rows");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorCode::Config, "'" + path + "' holds no data");
  RealMatrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
  return m;
}

}  // namespace qgp::config
