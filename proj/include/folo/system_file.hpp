#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "folo/lti.hpp"
#include "folo/measurement.hpp"
#include "folo/topology.hpp"

namespace folo {

// On-disk system description (JSON). See docs/system_format.md.
struct SystemDescription {
  LtiSystem system;
  std::vector<Channel> channels;  // one per C row
  Topology topology;
  ForcedInput forcing;
  double fs_hz = 60.0;
  double duration_s = 40.0;
  std::optional<double> kappa;  // resonance bandwidth override
};

SystemDescription parse_system(const std::string& json_text);
SystemDescription load_system(const std::filesystem::path& path);

// Topology-only JSON ({"buses": [...], "lines": [[a,b], ...]}).
Topology parse_topology_json(const std::string& json_text);
Topology load_topology(const std::filesystem::path& path);

}  // namespace folo
