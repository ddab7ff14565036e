#include "folo/csv.hpp"

#include <cmath>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "folo/error.hpp"

namespace folo {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Whole-token double parse; rejects trailing garbage, empty fields, NaN/Inf.
double parse_value(std::string_view field, std::size_t line, std::size_t column) {
  const std::string text(field);
  const char* begin = text.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || !std::isfinite(v)) {
    throw Error("csv: non-numeric value '" + text + "' at line " + std::to_string(line) +
                ", field " + std::to_string(column));
  }
  return v;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (true) {
    const auto comma = line.find(',', pos);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(pos));
      break;
    }
    fields.push_back(line.substr(pos, comma - pos));
    pos = comma + 1;
  }
  return fields;
}

}  // namespace

std::string to_csv(const MeasurementMatrix& m) {
  if (m.rows() == 0 || m.cols() == 0) throw Error("csv: refusing to write an empty matrix");
  if (m.channels.size() != static_cast<std::size_t>(m.rows())) {
    throw Error("csv: channel list does not match row count");
  }
  std::string out;
  out.reserve(static_cast<std::size_t>(m.rows() * m.cols()) * 20);
  out += "# fs_hz=" + fmt17(m.fs_hz) + ",start_s=" + fmt17(m.start_s) + "\n";
  out += "t";
  for (const auto& ch : m.channels) {
    out += ",";
    out += ch.str();
  }
  out += "\n";
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    out += fmt17(m.start_s + static_cast<double>(j) / m.fs_hz);
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      out += ",";
      out += fmt17(m.values(r, j));
    }
    out += "\n";
  }
  return out;
}

void write_csv(const MeasurementMatrix& m, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("csv: cannot open '" + path.string() + "' for writing");
  const std::string text = to_csv(m);
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!f) throw Error("csv: write to '" + path.string() + "' failed");
}

MeasurementMatrix parse_csv(std::string_view text) {
  std::vector<std::string_view> lines;
  {
    std::size_t pos = 0;
    while (pos < text.size()) {
      auto nl = text.find('\n', pos);
      if (nl == std::string_view::npos) nl = text.size();
      std::string_view line = text.substr(pos, nl - pos);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      lines.push_back(line);
      pos = nl + 1;
    }
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
  }
  if (lines.size() < 2) throw Error("csv: missing metadata or header line");

  // Line 1: "# fs_hz=<real>,start_s=<real>"
  MeasurementMatrix m;
  {
    std::string_view meta = lines[0];
    constexpr std::string_view pre = "# fs_hz=";
    if (meta.substr(0, pre.size()) != pre) {
      throw Error("csv: line 1 must start with '# fs_hz='");
    }
    meta.remove_prefix(pre.size());
    const auto comma = meta.find(",start_s=");
    if (comma == std::string_view::npos) {
      throw Error("csv: line 1 is missing ',start_s='");
    }
    m.fs_hz = parse_value(meta.substr(0, comma), 1, 1);
    m.start_s = parse_value(meta.substr(comma + 9), 1, 2);
    if (!(m.fs_hz > 0.0)) throw Error("csv: fs_hz must be positive");
  }

  // Line 2: "t,bus:<id>/<type>,..."
  {
    const auto fields = split_fields(lines[1]);
    if (fields.empty() || fields[0] != "t") {
      throw Error("csv: header must begin with a 't' column");
    }
    if (fields.size() < 2) throw Error("csv: header names no channels");
    for (std::size_t i = 1; i < fields.size(); ++i) {
      Channel ch;
      try {
        ch = Channel::parse(fields[i]);
      } catch (const Error& e) {
        throw Error("csv: header field " + std::to_string(i + 1) + ": " + e.what());
      }
      for (const auto& prev : m.channels) {
        if (prev == ch) throw Error("csv: duplicate channel '" + ch.str() + "' in header");
      }
      m.channels.push_back(ch);
    }
  }

  const std::size_t nch = m.channels.size();
  const std::size_t nsamp = lines.size() - 2;
  if (nsamp == 0) throw Error("csv: no samples");

  m.values.resize(static_cast<Eigen::Index>(nch), static_cast<Eigen::Index>(nsamp));
  for (std::size_t j = 0; j < nsamp; ++j) {
    const std::size_t line_no = j + 3;
    const auto fields = split_fields(lines[j + 2]);
    if (fields.size() != nch + 1) {
      throw Error("csv: line " + std::to_string(line_no) + ": expected " +
                  std::to_string(nch + 1) + " fields, got " + std::to_string(fields.size()));
    }
    parse_value(fields[0], line_no, 1);  // time column; base comes from metadata
    for (std::size_t r = 0; r < nch; ++r) {
      m.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) =
          parse_value(fields[r + 1], line_no, r + 2);
    }
  }
  return m;
}

MeasurementMatrix read_csv(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("csv: cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  try {
    return parse_csv(ss.str());
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

}  // namespace folo
