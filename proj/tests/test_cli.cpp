#include <gtest/gtest.h>

#include <Eigen/SVD>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "folo/csv.hpp"
#include "folo/measurement.hpp"

#ifdef _WIN32
#error "the CLI harness relies on POSIX exit status decoding"
#endif
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

const fs::path& tmp_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() /
                 ("folo_cli_test_" + std::to_string(static_cast<long>(::getpid())));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

RunResult run_cli(const std::string& args) {
  const fs::path out = tmp_dir() / "stdout.txt";
  const fs::path err = tmp_dir() / "stderr.txt";
  const std::string cmd =
      std::string(FOLO_CLI_PATH) + " " + args + " > " + out.string() + " 2> " + err.string();
  const int raw = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

std::string demo_system() { return std::string(FOLO_DATA_DIR) + "/demo_system.json"; }

// Simulated demo record, generated once and reused across tests.
const fs::path& demo_csv() {
  static const fs::path p = [] {
    const fs::path path = tmp_dir() / "demo.csv";
    const auto r = run_cli("simulate --system " + demo_system() + " --output " + path.string());
    EXPECT_EQ(r.exit_code, 0) << r.err;
    return path;
  }();
  return p;
}

int loudest_row(const folo::MeasurementMatrix& m) {
  Eigen::Index row = 0, col = 0;
  m.values.cwiseAbs().maxCoeff(&row, &col);
  return static_cast<int>(row);
}

}  // namespace

TEST(Cli, SimulateProducesTheExpectedRecord) {
  const auto m = folo::read_csv(demo_csv());
  EXPECT_EQ(m.rows(), 8);
  EXPECT_EQ(m.cols(), 2401);  // 40 s at 60 Hz plus the t = 0 sample
  EXPECT_EQ(m.fs_hz, 60.0);
  EXPECT_EQ(m.start_s, 0.0);
  EXPECT_EQ(m.channels[2].str(), "bus:3/Vm");
}

TEST(Cli, LocateSeesThroughTheLoudestChannel) {
  const auto m = folo::read_csv(demo_csv());
  EXPECT_EQ(loudest_row(m), 6);  // bus 7 rings hardest...

  const fs::path report = tmp_dir() / "report.json";
  const auto r =
      run_cli("locate --input " + demo_csv().string() + " --output " + report.string());
  EXPECT_EQ(r.exit_code, 0) << r.err;
  const std::string text = slurp(report);
  EXPECT_NE(text.find("\"source_bus\":3"), std::string::npos) << text;  // ...bus 3 forces
  EXPECT_NE(text.find("\"source_row\":2"), std::string::npos);
  EXPECT_NE(text.find("\"converged\":true"), std::string::npos);
  EXPECT_NE(text.find("\"ranking\":[{\"channel\":\"bus:3/Vm\""), std::string::npos);
}

TEST(Cli, LocateToStdoutAndRerunsAreByteIdentical) {
  const std::string args = "locate --input " + demo_csv().string();
  const auto a = run_cli(args);
  const auto b = run_cli(args);
  EXPECT_EQ(a.exit_code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_FALSE(a.out.empty());
  EXPECT_EQ(a.out.back(), '\n');
  EXPECT_NE(a.out.find("\"source_bus\":3"), std::string::npos);
}

TEST(Cli, VerifyRankCertifiesTheRecord) {
  const auto r = run_cli("verify-rank --system " + demo_system());
  EXPECT_EQ(r.exit_code, 0) << r.err;
  EXPECT_NE(r.out.find("\"resonant_pairs\":1"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("\"expected_max_rank\":2"), std::string::npos);
  EXPECT_NE(r.out.find("\"pass\":true"), std::string::npos);

  // An impossible threshold flips the verdict and the exit code.
  const auto strict = run_cli("verify-rank --system " + demo_system() + " --threshold 1e-30");
  EXPECT_EQ(strict.exit_code, 1);
  EXPECT_NE(strict.out.find("\"pass\":false"), std::string::npos);
}

TEST(Cli, RaggedCsvFailsWithLineDiagnostics) {
  const fs::path bad = tmp_dir() / "ragged.csv";
  spit(bad, "# fs_hz=60,start_s=0\nt,bus:1/Vm,bus:2/Vm\n0,1,2\n0.0166,3\n");
  const auto r = run_cli("locate --input " + bad.string());
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.err.find("error:"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("line"), std::string::npos) << r.err;
}

TEST(Cli, UsageErrorsExitTwoAndHelpExitsZero) {
  EXPECT_EQ(run_cli("locate --input nowhere.csv --frobnicate").exit_code, 2);
  EXPECT_EQ(run_cli("").exit_code, 2);       // a subcommand is required
  EXPECT_EQ(run_cli("frobnicate").exit_code, 2);
  EXPECT_EQ(run_cli("locate").exit_code, 2);  // --input is required

  const auto help = run_cli("--help");
  EXPECT_EQ(help.exit_code, 0);
  EXPECT_NE(help.out.find("locate"), std::string::npos);
  EXPECT_NE(help.out.find("simulate"), std::string::npos);
}

TEST(Cli, AddNoiseIsSeedDeterministic) {
  const fs::path a = tmp_dir() / "noisy_a.csv";
  const fs::path b = tmp_dir() / "noisy_b.csv";
  const std::string base = "add-noise --input " + demo_csv().string() + " --snr-db 30 --seed 5";
  EXPECT_EQ(run_cli(base + " --output " + a.string()).exit_code, 0);
  EXPECT_EQ(run_cli(base + " --output " + b.string()).exit_code, 0);
  EXPECT_EQ(slurp(a), slurp(b));
  EXPECT_NE(slurp(a), slurp(demo_csv()));

  // The localization verdict survives 30 dB of channel noise.
  const auto r = run_cli("locate --input " + a.string());
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_NE(r.out.find("\"source_bus\":3"), std::string::npos) << r.out;
}

TEST(Cli, DecomposeRecombinesToTheNormalizedWindow) {
  const fs::path lpath = tmp_dir() / "L.csv";
  const fs::path spath = tmp_dir() / "S.csv";
  const auto r = run_cli("decompose --input " + demo_csv().string() + " --low-rank " +
                         lpath.string() + " --sparse " + spath.string());
  EXPECT_EQ(r.exit_code, 0) << r.err;
  EXPECT_NE(r.out.find("\"converged\":true"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("\"low_rank_rank\":4"), std::string::npos) << r.out;

  const auto low = folo::read_csv(lpath);
  const auto sparse = folo::read_csv(spath);

  // Rebuild the window the tool analyzed: first 601 columns, normalized.
  auto m = folo::read_csv(demo_csv());
  m.values = Eigen::MatrixXd(m.values.leftCols(601));
  const auto yn = folo::normalize(m);

  ASSERT_EQ(low.values.rows(), yn.matrix.values.rows());
  ASSERT_EQ(low.values.cols(), yn.matrix.values.cols());
  const double gap = (low.values + sparse.values - yn.matrix.values).cwiseAbs().maxCoeff();
  EXPECT_LT(gap, 1e-5);

  // The sparse part concentrates on the forcing row.
  Eigen::Index row = 0, col = 0;
  sparse.values.cwiseAbs().maxCoeff(&row, &col);
  EXPECT_EQ(row, 2);
}

TEST(Cli, ConfigFileAppliesAndFlagsWin) {
  const fs::path cfg = tmp_dir() / "cfg.json";
  spit(cfg, "{\"window_s\": 5, \"top_k\": 2}\n");

  const auto from_file =
      run_cli("locate --input " + demo_csv().string() + " --config " + cfg.string());
  EXPECT_EQ(from_file.exit_code, 0) << from_file.err;
  EXPECT_NE(from_file.out.find("\"config\":{\"window_s\":5,"), std::string::npos)
      << from_file.out;
  EXPECT_NE(from_file.out.find("\"top_k\":2"), std::string::npos);

  const auto with_flag = run_cli("locate --input " + demo_csv().string() + " --config " +
                                 cfg.string() + " --window 7 --xi 0.05");
  EXPECT_EQ(with_flag.exit_code, 0);
  EXPECT_NE(with_flag.out.find("\"config\":{\"window_s\":7,\"xi\":0.05,"), std::string::npos)
      << with_flag.out;
  EXPECT_NE(with_flag.out.find("\"xi\":0.05"), std::string::npos);
}

TEST(Cli, UnknownConfigKeyFails) {
  const fs::path cfg = tmp_dir() / "bad_cfg.json";
  spit(cfg, "{\"window_sec\": 5}\n");
  const auto r =
      run_cli("locate --input " + demo_csv().string() + " --config " + cfg.string());
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.err.find("unknown key"), std::string::npos) << r.err;
}

TEST(Cli, NonConvergenceExitsThreeButStillReports) {
  const fs::path report = tmp_dir() / "nc.json";
  const auto r = run_cli("locate --input " + demo_csv().string() + " --max-iters 1 --output " +
                         report.string());
  EXPECT_EQ(r.exit_code, 3);
  const std::string text = slurp(report);
  EXPECT_NE(text.find("\"converged\":false"), std::string::npos) << text;
  EXPECT_NE(text.find("did not converge"), std::string::npos);
}

TEST(Cli, EvaluateScoresAManifest) {
  const fs::path topo = tmp_dir() / "ring8.json";
  std::string lines = "[";
  for (int i = 1; i <= 8; ++i) {
    if (i > 1) lines += ",";
    lines += "[" + std::to_string(i) + "," + std::to_string(i % 8 + 1) + "]";
  }
  lines += "]";
  spit(topo, "{\"buses\": [1,2,3,4,5,6,7,8], \"lines\": " + lines + "}\n");

  const fs::path noisy = tmp_dir() / "noisy_a.csv";  // produced above, regenerate to be safe
  run_cli("add-noise --input " + demo_csv().string() + " --snr-db 30 --seed 5 --output " +
          noisy.string());

  const fs::path manifest = tmp_dir() / "manifest.json";
  spit(manifest, R"({"n0": 1, "cases": [
    {"name": "clean", "csv": "demo.csv", "topology": "ring8.json", "true_bus": 3},
    {"name": "noisy", "csv": "noisy_a.csv", "topology": "ring8.json", "true_bus": 3}
  ]})");

  const auto r = run_cli("evaluate --manifest " + manifest.string());
  EXPECT_EQ(r.exit_code, 0) << r.err;
  EXPECT_NE(r.out.find("\"exact_accuracy\":1"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("\"vicinity_accuracy\":1"), std::string::npos);
  EXPECT_NE(r.out.find("\"name\":\"clean\""), std::string::npos);
  EXPECT_NE(r.out.find("\"identified_bus\":3"), std::string::npos);

  const fs::path bad = tmp_dir() / "manifest_bad.json";
  spit(bad, R"({"cases": [{"name": "x", "csv": "demo.csv", "topology": "ring8.json",
                "true_bus": 3, "weight": 2}]})");
  EXPECT_EQ(run_cli("evaluate --manifest " + bad.string()).exit_code, 2);
}

TEST(Cli, SimulateComponentsSplitTheRecord) {
  const fs::path dir = tmp_dir() / "components";
  const fs::path full = tmp_dir() / "full.csv";
  const auto r = run_cli("simulate --system " + demo_system() + " --output " + full.string() +
                         " --components " + dir.string());
  EXPECT_EQ(r.exit_code, 0) << r.err;

  const auto free_part = folo::read_csv(dir / "resonance_free.csv");
  const auto resonance = folo::read_csv(dir / "resonance.csv");
  const auto approx = folo::read_csv(dir / "approx.csv");
  const auto total = folo::read_csv(full);

  const double split_gap =
      (free_part.values + resonance.values - approx.values).cwiseAbs().maxCoeff();
  EXPECT_LT(split_gap, 1e-12);

  // The flat-phase swap only touches the resonant pair, so the approximate
  // and exact records differ yet stay close in scale.
  EXPECT_GT((approx.values - total.values).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_LT((approx.values - total.values).cwiseAbs().maxCoeff(),
            0.5 * total.values.cwiseAbs().maxCoeff());

  // Two carriers only: the resonance block is numerically rank two.
  Eigen::BDCSVD<Eigen::MatrixXd> svd(resonance.values);
  const auto& sv = svd.singularValues();
  ASSERT_GE(sv.size(), 3);
  EXPECT_LT(sv(2) / sv(0), 1e-10);
}

TEST(Cli, SimulateOverridesChangeTheGrid) {
  const fs::path out = tmp_dir() / "short.csv";
  const auto r = run_cli("simulate --system " + demo_system() + " --duration 20 --fs 30 " +
                         "--output " + out.string());
  EXPECT_EQ(r.exit_code, 0) << r.err;
  const auto m = folo::read_csv(out);
  EXPECT_EQ(m.cols(), 601);  // 20 s at 30 Hz
  EXPECT_EQ(m.fs_hz, 30.0);

  EXPECT_EQ(run_cli("simulate --system " + demo_system() + " --duration 0").exit_code, 2);
  EXPECT_EQ(run_cli("simulate --system missing.json").exit_code, 2);
}
