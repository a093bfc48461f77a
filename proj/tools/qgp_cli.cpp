// qgp: command-line front end for the line-parameter experiments.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qgp/aqc.hpp"
#include "qgp/config.hpp"
#include "qgp/error.hpp"
#include "qgp/gp_engine.hpp"
#include "qgp/hhl.hpp"
#include "qgp/lpe.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace qgp;

namespace {

constexpr const char* kVersion = "0.1.0";

struct Overrides {
  std::string config;
  std::optional<std::string> backend;
  std::optional<std::uint64_t> shots;
  std::optional<std::uint64_t> seed;
  std::optional<int> nl;
  std::optional<std::string> rescale;
  std::optional<std::string> out;
};

void add_common(CLI::App* cmd, Overrides& o, bool with_config = true) {
  if (with_config) cmd->add_option("--config", o.config, "experiment JSON");
  cmd->add_option("--backend", o.backend, "classical | hhl-exact | hhl-sampled");
  cmd->add_option("--shots", o.shots, "shots for the sampled backend");
  cmd->add_option("--seed", o.seed, "seed applied to noise, sampling, optimizer and shots");
  cmd->add_option("--nl", o.nl, "evaluation qubits");
  cmd->add_option("--rescale", o.rescale, "exact | dmin");
  cmd->add_option("--out", o.out, "output directory");
}

config::ExperimentConfig load_config(const Overrides& o) {
  config::ExperimentConfig c = o.config.empty() ? config::ExperimentConfig{} : config::load(o.config);
  if (o.backend) c.backend.kind = gp::parse_backend(*o.backend);
  if (o.shots) c.backend.hhl.shots = *o.shots;
  if (o.seed) {
    c.noise.seed = c.sampling.seed = c.optimizer.seed = c.backend.hhl.seed = *o.seed;
  }
  if (o.nl) c.backend.hhl.eval_qubits = *o.nl;
  if (o.rescale) c.backend.hhl.rescale = hhl::parse_rescale_mode(*o.rescale);
  if (o.out) c.output = *o.out;
  c.validate();
  return c;
}

fs::path out_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create '" + dir + "': " + ec.message());
  return fs::path(dir);
}

json metadata(double wall) {
  const std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return {{"timestamp", buf}, {"wall_time_s", wall}, {"version", kVersion}};
}

lpe::SignalBundle make_bundle(const config::ExperimentConfig& c) {
  const lpe::SignalBundle clean = lpe::simulate_signals(c.network, lpe::default_grid(c.network));
  return lpe::add_noise(clean, c.noise.ii(c.network), c.noise.vj(c.network), c.noise.vi(c.network), c.noise.seed);
}

int cmd_simulate(const Overrides& o) {
  const config::ExperimentConfig c = load_config(o);
  const lpe::SignalBundle b = make_bundle(c);
  const fs::path dir = out_dir(c.output);
  config::write_text((dir / "signals.csv").string(),
                     config::format_csv({"t", "i_i", "v_j", "v_i", "i_i_noisy", "v_j_noisy", "v_i_noisy"},
                                        {&b.t, &b.i_i, &b.v_j, &b.v_i, &b.i_i_noisy, &b.v_j_noisy, &b.v_i_noisy}));
  const json bundle{{"config", config::to_json(c)},
                    {"grid_points", b.t.size()},
                    {"noise_variances", {{"i_i", b.var_ii}, {"v_j", b.var_vj}, {"v_i", b.var_vi}}},
                    {"noise_seed", b.noise_seed}};
  config::write_text((dir / "bundle.json").string(), config::dump(bundle));
  std::cout << config::dump({{"signals", (dir / "signals.csv").string()}, {"bundle", (dir / "bundle.json").string()}});
  return 0;
}

int cmd_fit(const Overrides& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const config::ExperimentConfig c = load_config(o);
  const lpe::SignalBundle b = make_bundle(c);
  lpe::EstimateOptions eo;
  eo.counts = c.sampling.counts;
  eo.jitter = c.sampling.jitter;
  eo.sample_seed = c.sampling.seed;
  eo.fit = c.optimizer;
  eo.warm_fit = c.optimizer;
  eo.warm_fit.max_evals = 0;
  eo.warm_fit.starts = 0;
  const gp::Backend backend = c.resolved_backend();
  const lpe::EstimateReport r = lpe::estimate(b, backend, eo);

  json report{{"config", config::to_json(c)},
              {"estimate",
               {{"R_hat", r.R_hat},
                {"L_hat", r.L_hat},
                {"R_true", c.network.R_true},
                {"L_true", c.network.L_true},
                {"error_R_percent", r.error_R_percent},
                {"error_L_percent", r.error_L_percent}}},
              {"fit", gp::to_json(r.fit)},
              {"warm_start", r.warm_start ? gp::to_json(*r.warm_start) : json()},
              {"training", lpe::to_json(r.training)},
              {"noise_variances", {{"i_i", b.var_ii}, {"v_j", b.var_vj}, {"v_i", b.var_vi}}}};
  if (backend.quantum()) report["hhl"] = gp::to_json(r.fit.backend_stats);

  std::vector<double> idx, obj, best;
  for (std::size_t k = 0; k < r.fit.objective_trace.size(); ++k) idx.push_back(static_cast<double>(k + 1));
  const RealVector e = Eigen::Map<const RealVector>(idx.data(), static_cast<Eigen::Index>(idx.size()));
  const RealVector f = Eigen::Map<const RealVector>(r.fit.objective_trace.data(), e.size());
  const RealVector g = Eigen::Map<const RealVector>(r.fit.nlml_trace.data(), e.size());

  const fs::path dir = out_dir(c.output);
  report["metadata"] = metadata(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  config::write_text((dir / "report.json").string(), config::dump(report));
  config::write_text((dir / "trace.csv").string(), config::format_csv({"evaluation", "objective", "best"}, {&e, &f, &g}));
  json summary = report["estimate"];
  summary["report"] = (dir / "report.json").string();
  std::cout << config::dump(summary);
  return 0;
}

int cmd_predict(const std::string& report_path, int n_points, const std::optional<std::string>& out) {
  const json rep = config::read_json(report_path);
  for (const char* k : {"config", "training", "fit"})
    if (!rep.contains(k)) throw Error(ErrorCode::Config, std::string("report is missing '") + k + "'");
  const config::ExperimentConfig c = config::from_json(rep.at("config"));
  const gp::TrainingSet data = lpe::training_from_json(rep.at("training"));
  const gp::LineHyperParams theta = gp::line_params_from_json(rep.at("fit").at("theta_star"));
  const int n = n_points > 0 ? n_points : c.n_points;
  const auto tables = lpe::prediction_grid(c.network, data, theta, n);
  const fs::path dir = out_dir(out ? *out : c.output);
  json summary = json::object();
  for (const auto& t : tables) {
    const std::string name = std::string("predict_") + gp::to_string(t.channel) + ".csv";
    config::write_text((dir / name).string(),
                       config::format_csv({"t", "mean", "variance", "truth"}, {&t.t, &t.mean, &t.variance, &t.truth}));
    summary[gp::to_string(t.channel)] = {{"file", (dir / name).string()},
                                         {"rows", t.t.size()},
                                         {"rms_error", lpe::rms_error(t)},
                                         {"band_coverage_2sigma", lpe::band_coverage(t)},
                                         {"max_variance_clamp", t.max_clamp}};
  }
  std::cout << config::dump(summary);
  return 0;
}

int cmd_hhl_solve(const Overrides& o, const std::string& matrix_path, const std::string& rhs_path,
                  const std::string& mode, std::optional<double> scale) {
  hhl::HHLConfig cfg;
  cfg.eigenvalue_scale = scale;
  if (o.shots) cfg.shots = *o.shots;
  if (o.seed) cfg.seed = *o.seed;
  if (o.nl) cfg.eval_qubits = *o.nl;
  if (o.rescale) cfg.rescale = hhl::parse_rescale_mode(*o.rescale);
  const gp::BackendKind kind = o.backend ? gp::parse_backend(*o.backend) : gp::BackendKind::HHLExact;
  if (kind == gp::BackendKind::Classical) throw Error(ErrorCode::Config, "backend: hhl solve needs hhl-exact or hhl-sampled");
  cfg.backend = kind == gp::BackendKind::HHLSampled ? hhl::BackendKind::Sampled : hhl::BackendKind::ExactStatevector;
  try {
    cfg.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::Config, e.what());
  }

  const RealMatrix a = config::read_matrix_csv(matrix_path);
  RealMatrix rhs = config::read_matrix_csv(rhs_path);
  if (rhs.cols() != 1 && rhs.rows() == 1) rhs.transposeInPlace();
  if (rhs.cols() != 1) throw Error(ErrorCode::DimensionMismatch, "rhs must be a single row or column");
  const RealVector y = rhs.col(0);
  if (a.rows() != a.cols() || a.rows() != y.size())
    throw Error(ErrorCode::DimensionMismatch, "matrix must be square and match the rhs length");
  if (!numerics::is_symmetric(a)) throw Error(ErrorCode::NonHermitian, "matrix is not symmetric");

  json out;
  if (mode == "quadratic-form") {
    out = hhl::to_json(hhl::quadratic_form(a, y, cfg));
    out["classical"] = y.dot(numerics::solve_psd(a, y));
  } else if (mode == "solution-norm") {
    const double yn = y.norm();
    if (yn == 0.0) throw Error(ErrorCode::InvalidArgument, "rhs is zero");
    const hhl::HHLSolve s = hhl::solve(a.cast<cplx>(), (y / yn).cast<cplx>(), cfg);
    out = {{"solution_norm_squared", s.norm_squared * yn * yn},
           {"standard_error", s.standard_error * yn * yn},
           {"success_probability", s.success_probability},
           {"eval_qubits_used", s.plan.n_l},
           {"circuit_width", s.circuit_width},
           {"circuit_depth", s.circuit_depth},
           {"two_qubit_count", s.two_qubit_count},
           {"cnot_cost", s.cnot_cost},
           {"condition_number", s.plan.condition_number},
           {"eigenvalue_scale", s.plan.scale},
           {"inversion_constant", s.plan.inversion_constant},
           {"time_param", s.plan.time},
           {"backend", hhl::to_string(cfg.backend)},
           {"shots", cfg.backend == hhl::BackendKind::Sampled ? cfg.shots : 0}};
    out["classical"] = numerics::solve_psd(a, y).squaredNorm();
  } else {
    throw Error(ErrorCode::Config, "mode: expected quadratic-form or solution-norm, got '" + mode + "'");
  }
  out["mode"] = mode;
  if (o.out) config::write_text((out_dir(*o.out) / "hhl.json").string(), config::dump(out));
  std::cout << config::dump(out);
  return 0;
}

ComplexMatrix read_unitary(const std::string& path) {
  if (fs::path(path).extension() == ".csv") return config::read_matrix_csv(path).cast<cplx>();
  const json j = config::read_json(path);
  if (!j.is_object() || !j.contains("re")) throw Error(ErrorCode::Config, "target: expected {\"re\": [[...]], \"im\": [[...]]}");
  for (const auto& [key, _] : j.items())
    if (key != "re" && key != "im") throw Error(ErrorCode::Config, "unknown key 'target." + key + "'");
  auto mat = [&](const json& m) {
    if (!m.is_array() || m.empty()) throw Error(ErrorCode::Config, "target: matrix rows expected");
    RealMatrix r(static_cast<Eigen::Index>(m.size()), static_cast<Eigen::Index>(m[0].size()));
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (m[i].size() != m[0].size()) throw Error(ErrorCode::DimensionMismatch, "target: ragged rows");
      for (std::size_t k = 0; k < m[i].size(); ++k) r(i, k) = m[i][k].get<double>();
    }
    return r;
  };
  const RealMatrix re = mat(j.at("re"));
  RealMatrix im = RealMatrix::Zero(re.rows(), re.cols());
  if (j.contains("im")) im = mat(j.at("im"));
  if (im.rows() != re.rows() || im.cols() != re.cols()) throw Error(ErrorCode::DimensionMismatch, "target: re/im shapes differ");
  ComplexMatrix u(re.rows(), re.cols());
  u.real() = re;
  u.imag() = im;
  return u;
}

int cmd_aqc(const Overrides& o, const std::string& target_path, int budget, const aqc::CompileOptions& base) {
  const ComplexMatrix u = read_unitary(target_path);
  if (u.rows() != u.cols()) throw Error(ErrorCode::DimensionMismatch, "target must be square");
  int width = 0;
  while ((Eigen::Index{1} << width) < u.rows()) ++width;
  if ((Eigen::Index{1} << width) != u.rows()) throw Error(ErrorCode::DimensionMismatch, "target dimension must be a power of two");
  aqc::CompileOptions opts = base;
  if (o.seed) opts.seed = *o.seed;
  const aqc::AnsatzSpec spec = aqc::AnsatzSpec::linear(width, budget);
  const aqc::CompilationResult r = aqc::compile(u, spec, opts);
  json out = aqc::to_json(r);
  out["width"] = width;
  out["cnot_budget"] = budget;
  out["cnot_lower_bound"] = aqc::cnot_lower_bound(width);
  if (o.out) {
    const fs::path dir = out_dir(*o.out);
    config::write_text((dir / "aqc.json").string(), config::dump(out));
    config::write_text((dir / "circuit.json").string(), config::dump(qc::to_json(r.circuit)));
  }
  std::cout << config::dump(out);
  return 0;
}

int cmd_report(const std::vector<std::string>& paths, const std::optional<std::string>& out) {
  std::string table = "backend,R_hat,L_hat,error_R_percent,error_L_percent,best_nlml,evaluations\n";
  char buf[512];
  for (const auto& p : paths) {
    const json rep = config::read_json(p);
    if (!rep.contains("estimate") || !rep.contains("fit")) throw Error(ErrorCode::Config, "'" + p + "' is not a fit report");
    const json& e = rep.at("estimate");
    const json& f = rep.at("fit");
    std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", f.at("backend").get<std::string>().c_str(),
                  e.at("R_hat").get<double>(), e.at("L_hat").get<double>(), e.at("error_R_percent").get<double>(),
                  e.at("error_L_percent").get<double>(), f.at("best_nlml").get<double>(), f.at("iterations").get<int>());
    table += buf;
  }
  if (out) config::write_text((out_dir(*out) / "table.csv").string(), table);
  std::cout << table;
  return 0;
}

int fail(ErrorCode code, const std::string& message) {
  const int exit_code = (code == ErrorCode::Config || code == ErrorCode::Io) ? 2 : 3;
  std::cerr << json{{"error", to_string(code)}, {"message", message}, {"exit_code", exit_code}}.dump() << "\n";
  return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum-accelerated GP line-parameter estimation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  Overrides sim_o, fit_o, pred_o, hhl_o, aqc_o;

  auto* sim = app.add_subcommand("simulate", "synthesize clean and noisy line signals");
  add_common(sim, sim_o);

  auto* fitc = app.add_subcommand("fit", "estimate R and L");
  add_common(fitc, fit_o);

  std::string report_path;
  int n_points = 0;
  auto* pred = app.add_subcommand("predict", "regression grid from a fit report");
  pred->add_option("--report", report_path, "report.json from fit")->required();
  pred->add_option("--n-points", n_points, "grid size (default from the report's config)");
  pred->add_option("--out", pred_o.out, "output directory");

  auto* hhl_cmd = app.add_subcommand("hhl", "HHL utilities");
  hhl_cmd->require_subcommand(1);
  std::string matrix_path, rhs_path, mode = "quadratic-form";
  auto* solve = hhl_cmd->add_subcommand("solve", "quadratic form or solution norm through HHL");
  solve->add_option("--matrix", matrix_path, "SPD matrix CSV")->required();
  solve->add_option("--rhs", rhs_path, "right-hand side CSV")->required();
  solve->add_option("--mode", mode, "quadratic-form | solution-norm");
  std::optional<double> scale;
  solve->add_option("--scale", scale, "eigenvalue scale s (default lambda_max)");
  add_common(solve, hhl_o, false);

  auto* aqc_cmd = app.add_subcommand("aqc", "approximate quantum compiling");
  aqc_cmd->require_subcommand(1);
  std::string target_path;
  int budget = 3;
  aqc::CompileOptions aqc_opts;
  auto* compile = aqc_cmd->add_subcommand("compile", "fit a fixed-CNOT ansatz to a unitary");
  compile->add_option("--target", target_path, "unitary as JSON {re, im} or real CSV")->required();
  compile->add_option("--budget", budget, "CNOT budget");
  compile->add_option("--restarts", aqc_opts.restarts, "random restarts");
  compile->add_option("--tol", aqc_opts.tolerance, "target distance");
  compile->add_option("--max-iters", aqc_opts.max_iters, "gradient steps per restart");
  add_common(compile, aqc_o, false);

  std::vector<std::string> report_paths;
  std::optional<std::string> report_out;
  auto* rep = app.add_subcommand("report", "tabulate fit reports");
  rep->add_option("reports", report_paths, "report.json files")->required();
  rep->add_option("--out", report_out, "directory for table.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(ErrorCode::Config, e.what());
  }

  try {
    if (*sim) return cmd_simulate(sim_o);
    if (*fitc) return cmd_fit(fit_o);
    if (*pred) return cmd_predict(report_path, n_points, pred_o.out);
    if (*solve) return cmd_hhl_solve(hhl_o, matrix_path, rhs_path, mode, scale);
    if (*compile) return cmd_aqc(aqc_o, target_path, budget, aqc_opts);
    if (*rep) return cmd_report(report_paths, report_out);
  } catch (const Error& e) {
    return fail(e.code(), e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(ErrorCode::Config, e.what());
  } catch (const std::exception& e) {
    return fail(ErrorCode::InvalidArgument, e.what());
  }
  return 0;
}
