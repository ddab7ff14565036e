#include "folo/json_writer.hpp"

#include <cmath>
#include <cstdio>

namespace folo {

std::string JsonWriter::escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (unsigned char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\b': out += "\\b"; break;
      case '\f': out += "\\f"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (c < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += static_cast<char>(c);
        }
    }
  }
  return out;
}

std::string JsonWriter::number(double v) {
  if (!std::isfinite(v)) return "null";  // JSON has no Inf/NaN literals
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void JsonWriter::comma() {
  if (first_.empty()) return;
  if (first_.back()) {
    first_.back() = false;
  } else {
    out_ += ',';
  }
}

void JsonWriter::begin_object() {
  comma();
  out_ += '{';
  first_.push_back(true);
}

void JsonWriter::end_object() {
  out_ += '}';
  first_.pop_back();
}

void JsonWriter::begin_array(const std::string& key) {
  comma();
  out_ += '"';
  out_ += escape(key);
  out_ += "\":[";
  first_.push_back(true);
}

void JsonWriter::begin_object_in_array() {
  comma();
  out_ += '{';
  first_.push_back(true);
}

void JsonWriter::end_array() {
  out_ += ']';
  first_.pop_back();
}

void JsonWriter::field(const std::string& key, const std::string& value) {
  comma();
  out_ += '"';
  out_ += escape(key);
  out_ += "\":\"";
  out_ += escape(value);
  out_ += '"';
}

void JsonWriter::field(const std::string& key, const char* value) {
  field(key, std::string(value));
}

void JsonWriter::field(const std::string& key, double value) {
  comma();
  out_ += '"';
  out_ += escape(key);
  out_ += "\":";
  out_ += number(value);
}

void JsonWriter::field(const std::string& key, int value) {
  comma();
  out_ += '"';
  out_ += escape(key);
  out_ += "\":";
  out_ += std::to_string(value);
}

void JsonWriter::field(const std::string& key, bool value) {
  comma();
  out_ += '"';
  out_ += escape(key);
  out_ += "\":";
  out_ += value ? "true" : "false";
}

void JsonWriter::field_null(const std::string& key) {
  comma();
  out_ += '"';
  out_ += escape(key);
  out_ += "\":null";
}

void JsonWriter::field_raw(const std::string& key, const std::string& rendered_json) {
  comma();
  out_ += '"';
  out_ += escape(key);
  out_ += "\":";
  out_ += rendered_json;
}

void JsonWriter::element(const std::string& value) {
  comma();
  out_ += '"';
  out_ += escape(value);
  out_ += '"';
}

}  // namespace folo
