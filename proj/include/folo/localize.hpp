#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "folo/measurement.hpp"
#include "folo/rpca.hpp"
#include "folo/topology.hpp"

namespace folo {

struct LocalizeConfig {
  double window_s = 10.0;    // analysis window from the start of the record
  std::optional<double> xi;  // default: default_xi(rows, window columns)
  RpcaConfig rpca;           // xi field is overwritten by the resolved value
  int top_k = 5;             // ranking length
};

struct RankEntry {
  Channel channel;
  int row = 0;
  double peak_abs_s = 0.0;  // largest |S| entry in the row
  double row_energy = 0.0;  // sum of squared S entries in the row
};

struct LocalizationReport {
  Channel source_channel;
  int source_row = 0;
  int source_col = 0;
  double xi = 0.0;
  bool converged = false;
  double residual = 0.0;
  std::vector<RankEntry> ranking;  // peak-descending, ties to the lower row
  std::vector<std::string> warnings;
  std::vector<std::pair<MeasurementType, double>> scale_factors;
};

// Window -> per-type normalization -> robust decomposition -> the channel of
// the largest |S| entry. The first ranking entry always names the source.
LocalizationReport locate(const MeasurementMatrix& y, const LocalizeConfig& cfg = {});

// Stable JSON rendering of a report: fixed key order, floats at 12
// significant digits, byte-identical across runs for equal inputs.
// config_json, when nonempty, must be a rendered JSON object and is embedded
// verbatim under the "config" key.
std::string report_to_json(const LocalizationReport& report,
                           const std::string& config_json = {});

// Per-channel white noise at the requested SNR. A zero-power channel falls
// back to matrix-wide power and raises a warning. snr_db = +infinity returns
// the input unchanged. Fixed seed gives identical output across runs.
MeasurementMatrix add_noise(const MeasurementMatrix& y, double snr_db, std::uint64_t seed,
                            std::vector<std::string>* warnings = nullptr);

struct SuiteCase {
  std::string name;
  MeasurementMatrix measurements;
  Topology topology;
  int true_bus = 0;
};

struct CaseVerdict {
  std::string name;
  int true_bus = 0;
  int identified_bus = 0;
  MeasurementType identified_type;
  int source_row = 0;
  int distance = 0;  // kInfiniteDistance when disconnected
  bool exact_hit = false;
  bool vicinity_hit = false;
  bool converged = false;
};

struct EvaluationReport {
  std::vector<CaseVerdict> cases;
  double exact_accuracy = 0.0;     // fraction with distance == 0
  double vicinity_accuracy = 0.0;  // fraction with distance <= n0
  int n0 = 0;
};

EvaluationReport evaluate(const std::vector<SuiteCase>& suite, const LocalizeConfig& cfg,
                          int n0);

std::string evaluation_to_json(const EvaluationReport& report,
                               const std::string& config_json = {});

}  // namespace folo
