#pragma once

#include <Eigen/Dense>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace folo {

enum class MeasurementKind { VoltageMagnitude, VoltageAngle, Frequency, Other };

// A measurement type. `label` is meaningful only for Other and must stay
// printable without ',' '/' or line breaks so headers stay parseable.
struct MeasurementType {
  MeasurementKind kind = MeasurementKind::VoltageMagnitude;
  std::string label;

  static MeasurementType vm() { return {MeasurementKind::VoltageMagnitude, {}}; }
  static MeasurementType va() { return {MeasurementKind::VoltageAngle, {}}; }
  static MeasurementType freq() { return {MeasurementKind::Frequency, {}}; }
  static MeasurementType other(std::string label);

  // Serialized form: "Vm", "Va", "F" or "O:<label>".
  std::string str() const;
  static MeasurementType parse(std::string_view text);

  bool operator==(const MeasurementType&) const = default;
};

struct Channel {
  int bus = 0;  // positive bus id
  MeasurementType type;

  // Serialized form: "bus:<id>/<type>".
  std::string str() const;
  static Channel parse(std::string_view text);

  bool operator==(const Channel&) const = default;
};

struct ChannelSeries {
  Channel channel;
  std::vector<double> values;
};

// Rows are channels, column j is the simultaneous sample at
// start_s + j / fs_hz. Entries are finite, channels unique.
struct MeasurementMatrix {
  std::vector<Channel> channels;
  Eigen::MatrixXd values;
  double fs_hz = 0.0;
  double start_s = 0.0;

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }
};

// Stacks equal-length per-channel series into a MeasurementMatrix.
MeasurementMatrix assemble(const std::vector<ChannelSeries>& series, double fs_hz,
                           double start_s = 0.0);

// Per measurement-type normalization: every row of a type block is divided
// by the block's largest absolute entry. An all-zero block keeps scale 1 and
// raises a warning instead of dividing by zero.
struct NormalizedMeasurementMatrix {
  MeasurementMatrix matrix;
  // One entry per measurement type, in first-occurrence order over channels.
  std::vector<std::pair<MeasurementType, double>> scale_factors;
  std::vector<std::string> warnings;

  static constexpr const char* norm_kind = "elementwise-max-abs";
};

NormalizedMeasurementMatrix normalize(const MeasurementMatrix& input);

}  // namespace folo
