// Command line front end: simulate resonance test systems, decompose and
// localize measurement records, verify the low-rank structure certificate.
//
// Exit codes: 0 success, 1 failed verification (verify-rank only),
// 2 bad input or usage, 3 decomposition did not converge.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "folo/csv.hpp"
#include "folo/error.hpp"
#include "folo/json_writer.hpp"
#include "folo/localize.hpp"
#include "folo/lti.hpp"
#include "folo/modal.hpp"
#include "folo/rpca.hpp"
#include "folo/system_file.hpp"
#include "folo/topology.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

void write_text(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw folo::Error("cannot open output file " + path);
  out << text;
  if (!out) throw folo::Error("failed writing " + path);
}

void write_matrix(const std::string& path, const folo::MeasurementMatrix& m) {
  write_text(path, folo::to_csv(m));
}

void subtract_row_means(folo::MeasurementMatrix& m) {
  m.values.colwise() -= m.values.rowwise().mean();
}

// Analysis settings shared by locate, decompose and evaluate. Precedence is
// command line flag > config file > built-in default.
struct AnalysisFlags {
  std::string config_path;
  double window_s = 0.0;
  double xi = 0.0;
  int top_k = 0;
  double tol = 0.0;
  int max_iters = 0;
  int max_inner_iters = 0;
  double mu0 = 0.0;
  double rho = 0.0;
  bool subtract_mean = false;

  CLI::Option* o_window = nullptr;
  CLI::Option* o_xi = nullptr;
  CLI::Option* o_top_k = nullptr;
  CLI::Option* o_tol = nullptr;
  CLI::Option* o_max_iters = nullptr;
  CLI::Option* o_max_inner = nullptr;
  CLI::Option* o_mu0 = nullptr;
  CLI::Option* o_rho = nullptr;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path,
                    "JSON file with analysis settings; flags take precedence");
    o_window = cmd->add_option("--window", window_s, "analysis window in seconds");
    o_xi = cmd->add_option("--xi", xi, "sparsity weight (default 1/sqrt(max dim))");
    o_top_k = cmd->add_option("--top-k", top_k, "ranking length in the report");
    o_tol = cmd->add_option("--tol", tol, "relative residual stopping tolerance");
    o_max_iters = cmd->add_option("--max-iters", max_iters, "outer iteration cap");
    o_max_inner = cmd->add_option("--max-inner-iters", max_inner_iters,
                                  "inner shrinkage iteration cap");
    o_mu0 = cmd->add_option("--mu0", mu0, "penalty start (default 1.25/sigma1)");
    o_rho = cmd->add_option("--rho", rho, "penalty growth factor (default 1.6)");
    cmd->add_flag("--subtract-mean", subtract_mean,
                  "remove each channel's mean before analysis");
  }

  folo::LocalizeConfig resolve() const {
    folo::LocalizeConfig cfg;
    if (!config_path.empty()) apply_config_file(cfg);
    if (o_window->count()) cfg.window_s = window_s;
    if (o_xi->count()) cfg.xi = xi;
    if (o_top_k->count()) cfg.top_k = top_k;
    if (o_tol->count()) cfg.rpca.tol_primal = tol;
    if (o_max_iters->count()) cfg.rpca.max_outer_iters = max_iters;
    if (o_max_inner->count()) cfg.rpca.max_inner_iters = max_inner_iters;
    if (o_mu0->count()) cfg.rpca.mu0 = mu0;
    if (o_rho->count()) cfg.rpca.rho = rho;
    return cfg;
  }

  void apply_config_file(folo::LocalizeConfig& cfg) const {
    std::ifstream in(config_path, std::ios::binary);
    if (!in) throw folo::Error("cannot open config file " + config_path);
    std::ostringstream buf;
    buf << in.rdbuf();
    json j;
    try {
      j = json::parse(buf.str());
    } catch (const json::parse_error& e) {
      throw folo::Error("config file " + config_path + ": " + e.what());
    }
    if (!j.is_object()) throw folo::Error("config file: top level must be an object");
    static const std::set<std::string> allowed = {
        "window_s", "xi",  "top_k", "tol_primal", "max_outer_iters", "max_inner_iters",
        "mu0",      "rho",
    };
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (!allowed.count(it.key())) {
        throw folo::Error("config file: unknown key '" + it.key() + "'");
      }
      if (!it->is_number()) {
        throw folo::Error("config file: '" + it.key() + "' must be a number");
      }
    }
    if (j.contains("window_s")) cfg.window_s = j["window_s"].get<double>();
    if (j.contains("xi")) cfg.xi = j["xi"].get<double>();
    if (j.contains("top_k")) cfg.top_k = j["top_k"].get<int>();
    if (j.contains("tol_primal")) cfg.rpca.tol_primal = j["tol_primal"].get<double>();
    if (j.contains("max_outer_iters")) cfg.rpca.max_outer_iters = j["max_outer_iters"].get<int>();
    if (j.contains("max_inner_iters")) cfg.rpca.max_inner_iters = j["max_inner_iters"].get<int>();
    if (j.contains("mu0")) cfg.rpca.mu0 = j["mu0"].get<double>();
    if (j.contains("rho")) cfg.rpca.rho = j["rho"].get<double>();
  }
};

// Effective settings, echoed into reports so a run is reproducible from its
// own output.
std::string config_echo(const folo::LocalizeConfig& cfg, bool subtract_mean) {
  folo::JsonWriter w;
  w.begin_object();
  w.field("window_s", cfg.window_s);
  if (cfg.xi) {
    w.field("xi", *cfg.xi);
  } else {
    w.field_null("xi");
  }
  w.field("top_k", cfg.top_k);
  w.field("tol_primal", cfg.rpca.tol_primal);
  w.field("max_outer_iters", cfg.rpca.max_outer_iters);
  w.field("max_inner_iters", cfg.rpca.max_inner_iters);
  if (cfg.rpca.mu0) {
    w.field("mu0", *cfg.rpca.mu0);
  } else {
    w.field_null("mu0");
  }
  if (cfg.rpca.rho) {
    w.field("rho", *cfg.rpca.rho);
  } else {
    w.field_null("rho");
  }
  w.field("subtract_mean", subtract_mean);
  w.end_object();
  return w.str();
}

struct SimulateArgs {
  std::string system_path;
  std::string output = "-";
  std::string components_dir;
  double fs = 0.0;
  double duration = 0.0;
  double kappa = 0.0;
  CLI::Option* o_fs = nullptr;
  CLI::Option* o_duration = nullptr;
  CLI::Option* o_kappa = nullptr;
};

int run_simulate(const SimulateArgs& a) {
  folo::SystemDescription d = folo::load_system(a.system_path);
  if (a.o_fs->count()) d.fs_hz = a.fs;
  if (a.o_duration->count()) d.duration_s = a.duration;
  if (a.o_kappa->count()) d.kappa = a.kappa;

  const folo::EigenStructure eig = folo::eigendecompose(d.system);
  folo::ClassifyOptions copt;
  copt.kappa = d.kappa;
  const folo::ModeClassification cls = folo::classify_modes(eig, d.forcing.omega, copt);

  std::vector<int> outputs(d.channels.size());
  for (std::size_t k = 0; k < outputs.size(); ++k) outputs[k] = static_cast<int>(k);
  const folo::ModalComponents mc =
      folo::simulate_modal(d.system, eig, cls, d.forcing, outputs, d.duration_s, d.fs_hz);

  folo::MeasurementMatrix m;
  m.channels = d.channels;
  m.values = folo::total_response(mc);
  m.fs_hz = d.fs_hz;
  m.start_s = 0.0;
  write_matrix(a.output, m);

  if (!a.components_dir.empty()) {
    fs::create_directories(a.components_dir);
    const fs::path dir(a.components_dir);
    folo::MeasurementMatrix part = m;
    part.values = folo::resonance_free(mc);
    folo::write_csv(part, dir / "resonance_free.csv");
    part.values = folo::resonance_matrix(mc);
    folo::write_csv(part, dir / "resonance.csv");
    part.values = folo::approx_response(mc);
    folo::write_csv(part, dir / "approx.csv");
  }
  return 0;
}

struct VerifyArgs {
  std::string system_path;
  double fs = 0.0;
  double duration = 0.0;
  double threshold = 1e-10;
  CLI::Option* o_fs = nullptr;
  CLI::Option* o_duration = nullptr;
};

int run_verify_rank(const VerifyArgs& a) {
  folo::SystemDescription d = folo::load_system(a.system_path);
  if (a.o_fs->count()) d.fs_hz = a.fs;
  if (a.o_duration->count()) d.duration_s = a.duration;

  const folo::EigenStructure eig = folo::eigendecompose(d.system);
  folo::ClassifyOptions copt;
  copt.kappa = d.kappa;
  const folo::ModeClassification cls = folo::classify_modes(eig, d.forcing.omega, copt);

  std::vector<int> outputs(d.channels.size());
  for (std::size_t k = 0; k < outputs.size(); ++k) outputs[k] = static_cast<int>(k);
  const folo::ModalComponents mc =
      folo::simulate_modal(d.system, eig, cls, d.forcing, outputs, d.duration_s, d.fs_hz);

  const Eigen::MatrixXd r = folo::resonance_matrix(mc);
  const int pairs = static_cast<int>(cls.resonant_pairs.size());
  const int expected_rank = 2 * pairs;

  Eigen::BDCSVD<Eigen::MatrixXd> svd(r);
  const Eigen::VectorXd& sv = svd.singularValues();
  const int probe = expected_rank;  // 0-based index of the first value beyond the bound
  double ratio = 0.0;
  if (probe < sv.size() && sv(0) > 0.0) ratio = sv(probe) / sv(0);
  const bool pass = ratio < a.threshold;

  folo::JsonWriter w;
  w.begin_object();
  w.field("resonant_pairs", pairs);
  w.field("expected_max_rank", expected_rank);
  std::string arr = "[";
  const int shown = static_cast<int>(std::min<Eigen::Index>(sv.size(), expected_rank + 1));
  for (int i = 0; i < shown; ++i) {
    if (i > 0) arr += ',';
    arr += folo::JsonWriter::number(sv(i));
  }
  arr += ']';
  w.field_raw("singular_values", arr);
  w.field("ratio", ratio);
  w.field("threshold", a.threshold);
  w.field("pass", pass);
  w.end_object();
  std::cout << w.str() << "\n";
  return pass ? 0 : 1;
}

struct LocateArgs {
  std::string input;
  std::string output = "-";
  AnalysisFlags flags;
};

int run_locate(const LocateArgs& a) {
  folo::MeasurementMatrix m = folo::read_csv(a.input);
  if (a.flags.subtract_mean) subtract_row_means(m);
  const folo::LocalizeConfig cfg = a.flags.resolve();
  const folo::LocalizationReport report = folo::locate(m, cfg);
  write_text(a.output, folo::report_to_json(report, config_echo(cfg, a.flags.subtract_mean)));
  return report.converged ? 0 : 3;
}

struct DecomposeArgs {
  std::string input;
  std::string output = "-";
  std::string low_rank_path;
  std::string sparse_path;
  AnalysisFlags flags;
};

int run_decompose(const DecomposeArgs& a) {
  folo::MeasurementMatrix m = folo::read_csv(a.input);
  if (a.flags.subtract_mean) subtract_row_means(m);
  const folo::LocalizeConfig cfg = a.flags.resolve();

  // Same windowing and normalization the localizer applies.
  const auto wanted = static_cast<Eigen::Index>(std::floor(cfg.window_s * m.fs_hz)) + 1;
  const Eigen::Index ncols = std::min(m.values.cols(), wanted);
  folo::MeasurementMatrix window = m;
  window.values = m.values.leftCols(ncols);
  const folo::NormalizedMeasurementMatrix yn = folo::normalize(window);

  folo::RpcaConfig rcfg = cfg.rpca;
  rcfg.xi = cfg.xi ? *cfg.xi : folo::default_xi(yn.matrix.rows(), yn.matrix.cols());
  const folo::RpcaResult res = folo::rpca_exact_alm(yn.matrix.values, rcfg);

  folo::MeasurementMatrix part = yn.matrix;
  if (!a.low_rank_path.empty()) {
    part.values = res.low_rank;
    write_matrix(a.low_rank_path, part);
  }
  if (!a.sparse_path.empty()) {
    part.values = res.sparse;
    write_matrix(a.sparse_path, part);
  }

  Eigen::Index rank = 0;
  if (res.low_rank.size() > 0) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(res.low_rank);
    const Eigen::VectorXd& sv = svd.singularValues();
    if (sv.size() > 0 && sv(0) > 0.0) {
      for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > 1e-9 * sv(0)) ++rank;
      }
    }
  }

  folo::JsonWriter w;
  w.begin_object();
  w.field("xi", rcfg.xi);
  w.field("converged", res.converged);
  w.field("residual", res.residual);
  w.field("outer_iterations", res.outer_iterations);
  w.field("inner_iterations", res.diagnostics.inner_iterations);
  w.field("low_rank_rank", static_cast<int>(rank));
  w.field("sparse_max_abs", res.sparse.size() ? res.sparse.cwiseAbs().maxCoeff() : 0.0);
  w.field_raw("config", config_echo(cfg, a.flags.subtract_mean));
  w.end_object();
  write_text(a.output, w.str() + "\n");
  return res.converged ? 0 : 3;
}

struct NoiseArgs {
  std::string input;
  std::string output = "-";
  double snr_db = 0.0;
  std::uint64_t seed = 0;
};

int run_add_noise(const NoiseArgs& a) {
  const folo::MeasurementMatrix m = folo::read_csv(a.input);
  std::vector<std::string> warnings;
  const folo::MeasurementMatrix noisy = folo::add_noise(m, a.snr_db, a.seed, &warnings);
  for (const auto& msg : warnings) std::cerr << "warning: " << msg << "\n";
  write_matrix(a.output, noisy);
  return 0;
}

struct EvaluateArgs {
  std::string manifest;
  std::string output = "-";
  int n0 = -1;
  CLI::Option* o_n0 = nullptr;
  AnalysisFlags flags;
};

int run_evaluate(const EvaluateArgs& a) {
  std::ifstream in(a.manifest, std::ios::binary);
  if (!in) throw folo::Error("cannot open manifest " + a.manifest);
  std::ostringstream buf;
  buf << in.rdbuf();
  json j;
  try {
    j = json::parse(buf.str());
  } catch (const json::parse_error& e) {
    throw folo::Error("manifest " + a.manifest + ": " + e.what());
  }
  if (!j.is_object()) throw folo::Error("manifest: top level must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it.key() != "n0" && it.key() != "cases") {
      throw folo::Error("manifest: unknown key '" + it.key() + "'");
    }
  }
  if (!j.contains("cases") || !j["cases"].is_array() || j["cases"].empty()) {
    throw folo::Error("manifest: 'cases' must be a nonempty array");
  }

  int n0 = 1;
  if (j.contains("n0")) {
    if (!j["n0"].is_number_integer()) throw folo::Error("manifest: 'n0' must be an integer");
    n0 = j["n0"].get<int>();
  }
  if (a.o_n0->count()) n0 = a.n0;

  const fs::path base = fs::path(a.manifest).parent_path();
  std::vector<folo::SuiteCase> suite;
  for (const auto& c : j["cases"]) {
    if (!c.is_object()) throw folo::Error("manifest: each case must be an object");
    for (auto it = c.begin(); it != c.end(); ++it) {
      const std::string& k = it.key();
      if (k != "name" && k != "csv" && k != "topology" && k != "true_bus") {
        throw folo::Error("manifest: unknown case key '" + k + "'");
      }
    }
    if (!c.contains("name") || !c["name"].is_string() || !c.contains("csv") ||
        !c["csv"].is_string() || !c.contains("topology") || !c["topology"].is_string() ||
        !c.contains("true_bus") || !c["true_bus"].is_number_integer()) {
      throw folo::Error(
          "manifest: each case needs string 'name', 'csv', 'topology' and integer "
          "'true_bus'");
    }
    folo::SuiteCase sc;
    sc.name = c["name"].get<std::string>();
    sc.measurements = folo::read_csv(base / c["csv"].get<std::string>());
    sc.topology = folo::load_topology(base / c["topology"].get<std::string>());
    sc.true_bus = c["true_bus"].get<int>();
    suite.push_back(std::move(sc));
  }

  const folo::LocalizeConfig cfg = a.flags.resolve();
  if (a.flags.subtract_mean) {
    for (auto& sc : suite) subtract_row_means(sc.measurements);
  }
  const folo::EvaluationReport report = folo::evaluate(suite, cfg, n0);
  write_text(a.output,
             folo::evaluation_to_json(report, config_echo(cfg, a.flags.subtract_mean)));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Forced-oscillation source localization toolkit"};
  app.require_subcommand(1);

  SimulateArgs sim;
  CLI::App* c_sim = app.add_subcommand(
      "simulate", "render a system description to a measurement CSV");
  c_sim->add_option("--system", sim.system_path, "system description JSON")->required();
  c_sim->add_option("--output", sim.output, "output CSV path, '-' for stdout");
  c_sim->add_option("--components", sim.components_dir,
                    "directory for per-component CSVs (resonance, resonance_free, approx)");
  sim.o_fs = c_sim->add_option("--fs", sim.fs, "sample rate override, Hz");
  sim.o_duration = c_sim->add_option("--duration", sim.duration, "record length override, s");
  sim.o_kappa = c_sim->add_option("--kappa", sim.kappa, "resonance bandwidth override, rad/s");

  VerifyArgs ver;
  CLI::App* c_ver = app.add_subcommand(
      "verify-rank", "check the rank bound of the simulated resonance component");
  c_ver->add_option("--system", ver.system_path, "system description JSON")->required();
  ver.o_fs = c_ver->add_option("--fs", ver.fs, "sample rate override, Hz");
  ver.o_duration = c_ver->add_option("--duration", ver.duration, "record length override, s");
  c_ver->add_option("--threshold", ver.threshold,
                    "singular value ratio bound (default 1e-10)");

  LocateArgs loc;
  CLI::App* c_loc = app.add_subcommand("locate", "identify the source channel of a record");
  c_loc->add_option("--input", loc.input, "measurement CSV")->required();
  c_loc->add_option("--output", loc.output, "report path, '-' for stdout");
  loc.flags.attach(c_loc);

  DecomposeArgs dec;
  CLI::App* c_dec = app.add_subcommand(
      "decompose", "split a record into low-rank and sparse parts");
  c_dec->add_option("--input", dec.input, "measurement CSV")->required();
  c_dec->add_option("--output", dec.output, "summary JSON path, '-' for stdout");
  c_dec->add_option("--low-rank", dec.low_rank_path, "CSV path for the low-rank part");
  c_dec->add_option("--sparse", dec.sparse_path, "CSV path for the sparse part");
  dec.flags.attach(c_dec);

  NoiseArgs noi;
  CLI::App* c_noi = app.add_subcommand("add-noise", "add white noise at a target SNR");
  c_noi->add_option("--input", noi.input, "measurement CSV")->required();
  c_noi->add_option("--output", noi.output, "output CSV path, '-' for stdout");
  c_noi->add_option("--snr-db", noi.snr_db, "signal-to-noise ratio in dB")->required();
  c_noi->add_option("--seed", noi.seed, "noise generator seed (default 0)");

  EvaluateArgs eva;
  CLI::App* c_eva = app.add_subcommand(
      "evaluate", "score localization accuracy over a manifest of cases");
  c_eva->add_option("--manifest", eva.manifest, "suite manifest JSON")->required();
  c_eva->add_option("--output", eva.output, "report path, '-' for stdout");
  eva.o_n0 = c_eva->add_option("--n0", eva.n0, "vicinity radius override, hops");
  eva.flags.attach(c_eva);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*c_sim) return run_simulate(sim);
    if (*c_ver) return run_verify_rank(ver);
    if (*c_loc) return run_locate(loc);
    if (*c_dec) return run_decompose(dec);
    if (*c_noi) return run_add_noise(noi);
    if (*c_eva) return run_evaluate(eva);
  } catch (const folo::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
