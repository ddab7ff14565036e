#include "folo/measurement.hpp"

#include <cmath>
#include <set>

#include "folo/error.hpp"

namespace folo {

namespace {

bool label_ok(const std::string& label) {
  if (label.empty()) return false;
  for (char ch : label) {
    if (ch == ',' || ch == '/' || ch == '\n' || ch == '\r') return false;
    if (static_cast<unsigned char>(ch) < 0x20) return false;
  }
  return true;
}

}  // namespace

MeasurementType MeasurementType::other(std::string label) {
  if (!label_ok(label)) {
    throw Error("measurement type label '" + label +
                "' must be nonempty printable text without ',' or line breaks");
  }
  return {MeasurementKind::Other, std::move(label)};
}

std::string MeasurementType::str() const {
  switch (kind) {
    case MeasurementKind::VoltageMagnitude: return "Vm";
    case MeasurementKind::VoltageAngle: return "Va";
    case MeasurementKind::Frequency: return "F";
    case MeasurementKind::Other: return "O:" + label;
  }
  throw Error("corrupt measurement type");
}

MeasurementType MeasurementType::parse(std::string_view text) {
  if (text == "Vm") return vm();
  if (text == "Va") return va();
  if (text == "F") return freq();
  if (text.size() > 2 && text.substr(0, 2) == "O:") {
    return other(std::string(text.substr(2)));
  }
  throw Error("unknown measurement type '" + std::string(text) + "'");
}

std::string Channel::str() const {
  return "bus:" + std::to_string(bus) + "/" + type.str();
}

Channel Channel::parse(std::string_view text) {
  constexpr std::string_view prefix = "bus:";
  if (text.substr(0, prefix.size()) != prefix) {
    throw Error("malformed channel '" + std::string(text) + "': expected 'bus:<id>/<type>'");
  }
  const auto slash = text.find('/', prefix.size());
  if (slash == std::string_view::npos) {
    throw Error("malformed channel '" + std::string(text) + "': missing '/'");
  }
  const std::string id_text(text.substr(prefix.size(), slash - prefix.size()));
  std::size_t used = 0;
  int bus = 0;
  try {
    bus = std::stoi(id_text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != id_text.size() || bus <= 0) {
    throw Error("malformed channel '" + std::string(text) + "': bus id must be a positive integer");
  }
  return {bus, MeasurementType::parse(text.substr(slash + 1))};
}

MeasurementMatrix assemble(const std::vector<ChannelSeries>& series, double fs_hz,
                           double start_s) {
  if (series.empty()) throw Error("assemble: no channels given");
  if (!(fs_hz > 0.0) || !std::isfinite(fs_hz)) {
    throw Error("assemble: sample rate must be positive and finite");
  }
  if (!std::isfinite(start_s)) throw Error("assemble: start time must be finite");

  const std::size_t n = series.front().values.size();
  if (n == 0) {
    throw Error("assemble: channel " + series.front().channel.str() + " has no samples");
  }

  std::set<std::pair<int, std::string>> seen;
  for (const auto& s : series) {
    if (s.channel.bus <= 0) {
      throw Error("assemble: channel " + s.channel.str() + " has a non-positive bus id");
    }
    if (s.channel.type.kind != MeasurementKind::Other && !s.channel.type.label.empty()) {
      throw Error("assemble: channel " + s.channel.str() + " carries a label on a fixed type");
    }
    if (s.values.size() != n) {
      throw Error("assemble: channel " + s.channel.str() + " has " +
                  std::to_string(s.values.size()) + " samples, expected " + std::to_string(n));
    }
    if (!seen.insert({s.channel.bus, s.channel.type.str()}).second) {
      throw Error("assemble: duplicate channel " + s.channel.str());
    }
  }

  MeasurementMatrix m;
  m.fs_hz = fs_hz;
  m.start_s = start_s;
  m.values.resize(static_cast<Eigen::Index>(series.size()), static_cast<Eigen::Index>(n));
  m.channels.reserve(series.size());
  for (std::size_t k = 0; k < series.size(); ++k) {
    m.channels.push_back(series[k].channel);
    for (std::size_t j = 0; j < n; ++j) {
      const double v = series[k].values[j];
      if (!std::isfinite(v)) {
        throw Error("assemble: channel " + series[k].channel.str() + " sample " +
                    std::to_string(j) + " is not finite");
      }
      m.values(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) = v;
    }
  }
  return m;
}

NormalizedMeasurementMatrix normalize(const MeasurementMatrix& input) {
  if (input.rows() == 0 || input.cols() == 0) throw Error("normalize: empty matrix");
  if (input.channels.size() != static_cast<std::size_t>(input.rows())) {
    throw Error("normalize: channel list does not match row count");
  }

  NormalizedMeasurementMatrix out;
  out.matrix = input;

  // Type blocks in first-occurrence order; rows of a block need not be
  // contiguous and keep their positions.
  std::vector<MeasurementType> order;
  for (const auto& ch : input.channels) {
    bool known = false;
    for (const auto& t : order) known = known || t == ch.type;
    if (!known) order.push_back(ch.type);
  }

  for (const auto& type : order) {
    double scale = 0.0;
    for (Eigen::Index r = 0; r < input.rows(); ++r) {
      if (input.channels[static_cast<std::size_t>(r)].type == type) {
        scale = std::max(scale, input.values.row(r).cwiseAbs().maxCoeff());
      }
    }
    if (scale == 0.0) {
      out.warnings.push_back("normalize: all-zero block for type " + type.str() +
                             ", scale factor kept at 1");
      scale = 1.0;
    }
    for (Eigen::Index r = 0; r < input.rows(); ++r) {
      if (input.channels[static_cast<std::size_t>(r)].type == type) {
        out.matrix.values.row(r) /= scale;
      }
    }
    out.scale_factors.emplace_back(type, scale);
  }
  return out;
}

}  // namespace folo
