#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "folo/measurement.hpp"

namespace folo {

// Measurement CSV layout, byte-stable across runs:
//   # fs_hz=<real>,start_s=<real>
//   t,bus:<id>/<type>,...
//   <time>,<value>,...
// Reals are written with enough digits ("%.17g") to round-trip exactly.
std::string to_csv(const MeasurementMatrix& m);
void write_csv(const MeasurementMatrix& m, const std::filesystem::path& path);

// Parse errors carry 1-based line and field positions.
MeasurementMatrix parse_csv(std::string_view text);
MeasurementMatrix read_csv(const std::filesystem::path& path);

}  // namespace folo
