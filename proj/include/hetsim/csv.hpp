#pragma once

#include <cstdio>
#include <optional>
#include <ostream>
#include <string>

namespace hetsim::csv {

// RFC-4180-style quoting: fields holding commas, quotes or newlines are
// quoted, embedded quotes doubled.
inline std::string escape(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string num(std::optional<double> v) { return v ? num(*v) : std::string(); }

class Row {
 public:
  explicit Row(std::ostream& os) : os_(os) {}
  Row& field(const std::string& s) {
    if (!first_) os_ << ',';
    os_ << escape(s);
    first_ = false;
    return *this;
  }
  Row& field(const char* s) { return field(std::string(s)); }
  Row& field(double v) { return field(num(v)); }
  Row& field(std::optional<double> v) { return field(num(v)); }
  Row& field(int v) { return field(std::to_string(v)); }
  Row& field(long v) { return field(std::to_string(v)); }
  Row& field(long long v) { return field(std::to_string(v)); }
  Row& field(unsigned long v) { return field(std::to_string(v)); }
  Row& field(unsigned long long v) { return field(std::to_string(v)); }
  ~Row() { os_ << '\n'; }

 private:
  std::ostream& os_;
  bool first_ = true;
};

}  // namespace hetsim::csv
