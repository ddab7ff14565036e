#include "folo/system_file.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "folo/error.hpp"

namespace folo {

namespace {

using nlohmann::json;

void require_keys(const json& j, const char* ctx, const std::set<std::string>& allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key())) {
      throw Error(std::string("system file: unknown key '") + it.key() + "' in " + ctx);
    }
  }
}

const json& require(const json& j, const char* ctx, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) {
    throw Error(std::string("system file: missing '") + key + "' in " + ctx);
  }
  return *it;
}

double as_number(const json& j, const std::string& what) {
  if (!j.is_number()) throw Error("system file: " + what + " must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw Error("system file: " + what + " must be finite");
  return v;
}

int as_int(const json& j, const std::string& what) {
  if (!j.is_number_integer()) throw Error("system file: " + what + " must be an integer");
  return j.get<int>();
}

Eigen::MatrixXd parse_matrix(const json& j, const std::string& name) {
  if (!j.is_array() || j.empty()) {
    throw Error("system file: '" + name + "' must be a nonempty array of rows");
  }
  const std::size_t rows = j.size();
  std::size_t cols = 0;
  Eigen::MatrixXd m;
  for (std::size_t i = 0; i < rows; ++i) {
    const json& row = j[i];
    if (!row.is_array() || row.empty()) {
      throw Error("system file: '" + name + "' row " + std::to_string(i) +
                  " must be a nonempty array");
    }
    if (i == 0) {
      cols = row.size();
      m.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    } else if (row.size() != cols) {
      throw Error("system file: '" + name + "' row " + std::to_string(i) + " has " +
                  std::to_string(row.size()) + " entries, expected " + std::to_string(cols));
    }
    for (std::size_t k = 0; k < cols; ++k) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
          as_number(row[k], "'" + name + "'[" + std::to_string(i) + "][" + std::to_string(k) +
                               "]");
    }
  }
  return m;
}

Topology parse_topology_object(const json& j) {
  if (!j.is_object()) throw Error("system file: 'topology' must be an object");
  require_keys(j, "topology", {"buses", "lines"});
  std::vector<int> buses;
  if (auto it = j.find("buses"); it != j.end()) {
    if (!it->is_array()) throw Error("system file: 'topology.buses' must be an array");
    for (const auto& b : *it) buses.push_back(as_int(b, "'topology.buses' entry"));
  }
  std::vector<std::pair<int, int>> lines;
  const json& jl = require(j, "topology", "lines");
  if (!jl.is_array()) throw Error("system file: 'topology.lines' must be an array");
  for (const auto& line : jl) {
    if (!line.is_array() || line.size() != 2) {
      throw Error("system file: each topology line must be a [from, to] pair");
    }
    lines.emplace_back(as_int(line[0], "line endpoint"), as_int(line[1], "line endpoint"));
  }
  return make_topology(std::move(buses), std::move(lines));
}

ForcedInput parse_forcing(const json& j, int inputs) {
  if (!j.is_object()) throw Error("system file: 'forcing' must be an object");
  require_keys(j, "forcing", {"input_index", "amplitude", "omega_hz", "omega_rad", "theta"});
  ForcedInput f;
  f.input_index = as_int(require(j, "forcing", "input_index"), "'forcing.input_index'");
  if (f.input_index < 0 || f.input_index >= inputs) {
    throw Error("system file: forcing input_index " + std::to_string(f.input_index) +
                " out of range for " + std::to_string(inputs) + " input(s)");
  }
  f.amplitude = as_number(require(j, "forcing", "amplitude"), "'forcing.amplitude'");
  if (f.amplitude == 0.0) throw Error("system file: forcing amplitude must be nonzero");

  const bool has_hz = j.contains("omega_hz");
  const bool has_rad = j.contains("omega_rad");
  if (has_hz == has_rad) {
    throw Error("system file: forcing needs exactly one of 'omega_hz' or 'omega_rad'");
  }
  f.omega = has_hz ? 2.0 * M_PI * as_number(j["omega_hz"], "'forcing.omega_hz'")
                   : as_number(j["omega_rad"], "'forcing.omega_rad'");
  if (!(f.omega > 0.0)) throw Error("system file: forcing frequency must be positive");

  if (auto it = j.find("theta"); it != j.end()) {
    f.theta = as_number(*it, "'forcing.theta'");
    if (f.theta != 0.0) {
      throw Error("system file: forcing theta must be 0 (closed-form engine restriction)");
    }
  }
  return f;
}

std::vector<Channel> parse_channels(const json& j, Eigen::Index outputs) {
  if (!j.is_array()) throw Error("system file: 'channels' must be an array");
  if (j.size() != static_cast<std::size_t>(outputs)) {
    throw Error("system file: " + std::to_string(j.size()) + " channel(s) for " +
                std::to_string(outputs) + " output row(s)");
  }
  std::vector<Channel> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const json& c = j[i];
    if (!c.is_object()) throw Error("system file: each channel must be an object");
    require_keys(c, "channel", {"bus", "type"});
    Channel ch;
    ch.bus = as_int(require(c, "channel", "bus"), "channel 'bus'");
    const json& t = require(c, "channel", "type");
    if (!t.is_string()) throw Error("system file: channel 'type' must be a string");
    ch.type = MeasurementType::parse(t.get<std::string>());
    out.push_back(std::move(ch));
  }
  return out;
}

json parse_text(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(std::string(what) + ": " + e.what());
  }
}

}  // namespace

SystemDescription parse_system(const std::string& json_text) {
  const json j = parse_text(json_text, "system file");
  if (!j.is_object()) throw Error("system file: top level must be an object");
  require_keys(j, "system file",
               {"a", "b", "c", "channels", "topology", "forcing", "fs_hz", "duration_s",
                "kappa"});

  SystemDescription d;
  d.system.a = parse_matrix(require(j, "system file", "a"), "a");
  d.system.b = parse_matrix(require(j, "system file", "b"), "b");
  d.system.c = parse_matrix(require(j, "system file", "c"), "c");
  d.system.validate();

  d.channels = parse_channels(require(j, "system file", "channels"), d.system.outputs());
  std::set<std::pair<int, std::string>> seen;
  for (const auto& ch : d.channels) {
    if (ch.bus <= 0) throw Error("system file: channel bus ids must be positive");
    if (!seen.insert({ch.bus, ch.type.str()}).second) {
      throw Error("system file: duplicate channel " + ch.str());
    }
  }

  d.topology = parse_topology_object(require(j, "system file", "topology"));
  for (const auto& ch : d.channels) {
    if (!d.topology.has_bus(ch.bus)) {
      throw Error("system file: channel bus " + std::to_string(ch.bus) +
                  " is not in the topology");
    }
  }

  d.forcing = parse_forcing(require(j, "system file", "forcing"), d.system.inputs());

  if (auto it = j.find("fs_hz"); it != j.end()) {
    d.fs_hz = as_number(*it, "'fs_hz'");
    if (!(d.fs_hz > 0.0)) throw Error("system file: fs_hz must be positive");
  }
  if (auto it = j.find("duration_s"); it != j.end()) {
    d.duration_s = as_number(*it, "'duration_s'");
    if (!(d.duration_s > 0.0)) throw Error("system file: duration_s must be positive");
  }
  if (auto it = j.find("kappa"); it != j.end()) {
    const double k = as_number(*it, "'kappa'");
    if (!(k > 0.0)) throw Error("system file: kappa must be positive");
    d.kappa = k;
  }
  return d;
}

SystemDescription load_system(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("system file: cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_system(buf.str());
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

Topology parse_topology_json(const std::string& json_text) {
  const json j = parse_text(json_text, "topology file");
  if (!j.is_object()) throw Error("topology file: top level must be an object");
  return parse_topology_object(j);
}

Topology load_topology(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("topology file: cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_topology_json(buf.str());
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

}  // namespace folo
