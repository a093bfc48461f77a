#include "qgp/lpe.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "qgp/error.hpp"

namespace qgp::lpe {

namespace {

void reject_unknown(const nlohmann::json& j, const std::set<std::string>& known, const std::string& where) {
  if (!j.is_object()) throw Error(ErrorCode::Config, where + ": expected an object");
  for (const auto& [key, _] : j.items())
    if (!known.count(key)) throw Error(ErrorCode::Config, "unknown key '" + where + "." + key + "'");
}

double number_at(const nlohmann::json& j, const std::string& key, const std::string& where) {
  if (!j.at(key).is_number()) throw Error(ErrorCode::Config, where + "." + key + ": expected a number");
  return j.at(key).get<double>();
}

RealVector vec_from_json(const nlohmann::json& j, const std::string& name) {
  if (!j.is_array()) throw Error(ErrorCode::Config, name + ": expected an array");
  RealVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw Error(ErrorCode::Config, name + ": expected numbers");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

nlohmann::json vec_to_json(const RealVector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

}  // namespace

double NetworkConfig::omega() const { return 2.0 * M_PI * frequency; }
double NetworkConfig::period() const { return 1.0 / frequency; }

double NetworkConfig::current_phase() const {
  return i_phase ? *i_phase : v_phase - std::atan2(omega() * L_true, R_true);
}

void NetworkConfig::validate() const {
  if (!(frequency > 0.0)) throw Error(ErrorCode::Config, "network.frequency must be > 0");
  if (!(window >= period() * (1.0 - 1e-12))) throw Error(ErrorCode::Config, "network.window must cover one period");
  if (R_true < 0.0 || L_true < 0.0) throw Error(ErrorCode::Config, "network.R_true and L_true must be >= 0");
  if (grid_intervals < 2) throw Error(ErrorCode::Config, "network.grid_intervals must be >= 2");
}

CleanSample clean_signal(const NetworkConfig& cfg, double t) {
  const double w = cfg.omega();
  const double phi = cfg.current_phase();
  const double ii = cfg.i_amplitude * std::cos(w * t + phi);
  const double di = -cfg.i_amplitude * w * std::sin(w * t + phi);
  const double vj = cfg.v_amplitude * std::cos(w * t + cfg.v_phase);
  return {ii, vj, cfg.R_true * ii + cfg.L_true * di + vj};
}

RealVector default_grid(const NetworkConfig& cfg) {
  cfg.validate();
  RealVector g(cfg.grid_intervals + 1);
  for (int k = 0; k <= cfg.grid_intervals; ++k) g(k) = cfg.window * k / cfg.grid_intervals;
  return g;
}

SignalBundle simulate_signals(const NetworkConfig& cfg, const RealVector& grid) {
  cfg.validate();
  SignalBundle b;
  b.network = cfg;
  b.t = grid;
  const Eigen::Index n = grid.size();
  b.i_i.resize(n);
  b.v_j.resize(n);
  b.v_i.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    if (grid(k) < -1e-15 || grid(k) > cfg.window * (1.0 + 1e-12))
      throw Error(ErrorCode::InvalidArgument, "simulate_signals: grid point outside the window");
    const CleanSample s = clean_signal(cfg, grid(k));
    b.i_i(k) = s.i_i;
    b.v_j(k) = s.v_j;
    b.v_i(k) = s.v_i;
  }
  b.i_i_noisy = b.i_i;
  b.v_j_noisy = b.v_j;
  b.v_i_noisy = b.v_i;
  return b;
}

SignalBundle add_noise(SignalBundle b, double sigma_ii, double sigma_vj, double sigma_vi, std::uint64_t seed) {
  if (sigma_ii < 0.0 || sigma_vj < 0.0 || sigma_vi < 0.0)
    throw Error(ErrorCode::InvalidArgument, "add_noise: standard deviations must be >= 0");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto noisy = [&](const RealVector& clean, double sigma) {
    RealVector out = clean;
    for (Eigen::Index k = 0; k < out.size(); ++k) {
      const double z = normal(rng);
      if (sigma > 0.0) out(k) += sigma * z;
    }
    return out;
  };
  b.i_i_noisy = noisy(b.i_i, sigma_ii);
  b.v_j_noisy = noisy(b.v_j, sigma_vj);
  b.v_i_noisy = noisy(b.v_i, sigma_vi);
  b.var_ii = sigma_ii * sigma_ii;
  b.var_vj = sigma_vj * sigma_vj;
  b.var_vi = sigma_vi * sigma_vi;
  b.noise_seed = seed;
  return b;
}

gp::TrainingSet sample_training(const SignalBundle& b, const Counts& counts, double jitter, std::uint64_t seed) {
  if (counts.n_ii < 2 || counts.n_vj < 2 || counts.n_vi < 2)
    throw Error(ErrorCode::InvalidArgument, "sample_training: counts must be >= 2");
  if (jitter < 0.0 || jitter >= 1.0) throw Error(ErrorCode::InvalidArgument, "sample_training: jitter must be in [0, 1)");
  const double period = b.network.period();
  const Eigen::Index n_grid = b.t.size();
  const auto in_period = std::count_if(b.t.data(), b.t.data() + n_grid, [&](double t) { return t < period; });
  const int max_count = std::max({counts.n_ii, counts.n_vj, counts.n_vi});
  if (max_count > in_period)
    throw Error(ErrorCode::CountsExceedGrid, "sample_training: more samples requested than grid points in a period");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-0.5, 0.5);
  auto pick = [&](int n, const RealVector& values, RealVector& t_out, RealVector& y_out) {
    t_out.resize(n);
    y_out.resize(n);
    const double spacing = period / n;
    Eigen::Index prev = -1;
    for (int k = 0; k < n; ++k) {
      const double target = (k + 0.5) * spacing + jitter * unif(rng) * spacing;
      const double* first = b.t.data();
      const double* it = std::lower_bound(first, first + n_grid, target);
      Eigen::Index idx = it - first;
      if (idx == n_grid || (idx > 0 && target - b.t(idx - 1) <= b.t(idx) - target)) --idx;
      if (idx <= prev) idx = prev + 1;
      if (idx >= n_grid) throw Error(ErrorCode::CountsExceedGrid, "sample_training: grid too coarse");
      prev = idx;
      t_out(k) = b.t(idx);
      y_out(k) = values(idx);
    }
  };
  gp::TrainingSet d;
  pick(counts.n_ii, b.i_i_noisy, d.times.ii, d.y_ii);
  pick(counts.n_vj, b.v_j_noisy, d.times.vj, d.y_vj);
  pick(counts.n_vi, b.v_i_noisy, d.times.vi, d.y_vi);
  return d;
}

double percent_error(double estimate, double truth) {
  if (truth == 0.0) throw Error(ErrorCode::InvalidArgument, "percent_error: truth is zero");
  return std::abs(estimate - truth) / std::abs(truth) * 100.0;
}

EstimateReport estimate(const SignalBundle& bundle, const gp::Backend& backend, const EstimateOptions& opts) {
  EstimateReport r;
  r.training = sample_training(bundle, opts.counts, opts.jitter, opts.sample_seed);
  const gp::LineHyperParams init = opts.init ? *opts.init : gp::default_init(r.training, bundle.network.period());

  if (backend.quantum()) {
    r.warm_start = gp::fit(r.training, init, opts.warm_fit, gp::Backend::classical());
    r.fit = gp::fit(r.training, r.warm_start->theta_star, opts.fit, backend);
  } else {
    r.fit = gp::fit(r.training, init, opts.fit, backend);
  }
  r.R_hat = r.fit.theta_star.R;
  r.L_hat = r.fit.theta_star.L;
  r.error_R_percent = percent_error(r.R_hat, bundle.network.R_true);
  r.error_L_percent = percent_error(r.L_hat, bundle.network.L_true);
  return r;
}

std::vector<ChannelTable> prediction_grid(const NetworkConfig& cfg, const gp::TrainingSet& data,
                                          const gp::LineHyperParams& theta, int n_points) {
  if (n_points < 1) throw Error(ErrorCode::InvalidArgument, "prediction_grid: n_points must be >= 1");
  RealVector ts(n_points);
  for (int k = 0; k < n_points; ++k) ts(k) = cfg.period() * k / n_points;

  std::vector<ChannelTable> out;
  for (gp::Channel c : gp::kChannels) {
    ChannelTable tab;
    tab.channel = c;
    tab.t = ts;
    gp::Prediction p = gp::predict(c, ts, data, theta);
    tab.mean = std::move(p.mean);
    tab.variance = std::move(p.variance);
    tab.max_clamp = p.max_clamp;
    tab.truth.resize(n_points);
    for (int k = 0; k < n_points; ++k) {
      const CleanSample s = clean_signal(cfg, ts(k));
      tab.truth(k) = c == gp::Channel::CurrentI ? s.i_i : c == gp::Channel::VoltageJ ? s.v_j : s.v_i;
    }
    out.push_back(std::move(tab));
  }
  return out;
}

double rms_error(const ChannelTable& t) {
  return std::sqrt((t.mean - t.truth).squaredNorm() / static_cast<double>(t.mean.size()));
}

double band_coverage(const ChannelTable& t, double n_sigma) {
  int inside = 0;
  for (Eigen::Index k = 0; k < t.mean.size(); ++k)
    if (std::abs(t.truth(k) - t.mean(k)) <= n_sigma * std::sqrt(t.variance(k))) ++inside;
  return static_cast<double>(inside) / static_cast<double>(t.mean.size());
}

nlohmann::json to_json(const NetworkConfig& c) {
  nlohmann::json j{{"R_true", c.R_true},           {"L_true", c.L_true},   {"frequency", c.frequency},
                   {"v_amplitude", c.v_amplitude}, {"v_phase", c.v_phase}, {"i_amplitude", c.i_amplitude},
                   {"i_phase", c.current_phase()}, {"window", c.window},   {"grid_intervals", c.grid_intervals}};
  return j;
}

NetworkConfig network_from_json(const nlohmann::json& j) {
  static const std::set<std::string> known{"R_true", "L_true", "frequency", "v_amplitude", "v_phase",
                                           "i_amplitude", "i_phase", "window", "grid_intervals"};
  reject_unknown(j, known, "network");
  NetworkConfig c;
  for (const auto& [key, v] : j.items()) {
    if (key == "grid_intervals") {
      if (!v.is_number_integer()) throw Error(ErrorCode::Config, "network.grid_intervals: expected an integer");
      c.grid_intervals = v.get<int>();
      continue;
    }
    const double x = number_at(j, key, "network");
    if (key == "R_true") c.R_true = x;
    else if (key == "L_true") c.L_true = x;
    else if (key == "frequency") c.frequency = x;
    else if (key == "v_amplitude") c.v_amplitude = x;
    else if (key == "v_phase") c.v_phase = x;
    else if (key == "i_amplitude") c.i_amplitude = x;
    else if (key == "i_phase") c.i_phase = x;
    else if (key == "window") c.window = x;
  }
  c.validate();
  return c;
}

nlohmann::json to_json(const gp::TrainingSet& d) {
  return {{"t_ii", vec_to_json(d.times.ii)}, {"y_ii", vec_to_json(d.y_ii)},
          {"t_vj", vec_to_json(d.times.vj)}, {"y_vj", vec_to_json(d.y_vj)},
          {"t_vi", vec_to_json(d.times.vi)}, {"y_vi", vec_to_json(d.y_vi)}};
}

gp::TrainingSet training_from_json(const nlohmann::json& j) {
  reject_unknown(j, {"t_ii", "y_ii", "t_vj", "y_vj", "t_vi", "y_vi"}, "training");
  gp::TrainingSet d;
  for (const char* k : {"t_ii", "y_ii", "t_vj", "y_vj", "t_vi", "y_vi"})
    if (!j.contains(k)) throw Error(ErrorCode::Config, std::string("training.") + k + " missing");
  d.times.ii = vec_from_json(j.at("t_ii"), "training.t_ii");
  d.y_ii = vec_from_json(j.at("y_ii"), "training.y_ii");
  d.times.vj = vec_from_json(j.at("t_vj"), "training.t_vj");
  d.y_vj = vec_from_json(j.at("y_vj"), "training.y_vj");
  d.times.vi = vec_from_json(j.at("t_vi"), "training.t_vi");
  d.y_vi = vec_from_json(j.at("y_vi"), "training.y_vi");
  d.validate();
  return d;
}

}  // namespace qgp::lpe
