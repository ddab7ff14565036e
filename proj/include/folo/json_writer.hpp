#pragma once

#include <string>
#include <vector>

namespace folo {

// Minimal append-only JSON emitter for reports. Key order follows call
// order and doubles are rendered "%.12g", which keeps output byte-stable.
class JsonWriter {
 public:
  static std::string escape(const std::string& s);
  static std::string number(double v);

  void begin_object();
  void end_object();
  void begin_array(const std::string& key);
  void begin_object_in_array();
  void end_array();
  void field(const std::string& key, const std::string& value);  // string value
  void field(const std::string& key, const char* value);
  void field(const std::string& key, double value);
  void field(const std::string& key, int value);
  void field(const std::string& key, bool value);
  void field_null(const std::string& key);
  void field_raw(const std::string& key, const std::string& rendered_json);
  void element(const std::string& value);  // string array element

  const std::string& str() const { return out_; }

 private:
  void comma();
  std::string out_;
  std::vector<bool> first_;  // per nesting level
};

}  // namespace folo
