#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace hetsim {

using CellId = int;

enum class Direction { ul, dl };

inline const char* direction_name(Direction d) { return d == Direction::ul ? "UL" : "DL"; }

// Error taxonomy surfaced by the CLI as machine-readable categories.
enum class ErrorCategory { config, domain, contract, io, internal };

inline const char* error_category_name(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::config: return "config";
    case ErrorCategory::domain: return "domain";
    case ErrorCategory::contract: return "contract";
    case ErrorCategory::io: return "io";
    case ErrorCategory::internal: return "internal";
  }
  return "internal";
}

class SimError : public std::runtime_error {
 public:
  SimError(ErrorCategory category, const std::string& message)
      : std::runtime_error(message), category_(category) {}
  ErrorCategory category() const { return category_; }

 private:
  ErrorCategory category_;
};

[[noreturn]] inline void fail(ErrorCategory category, const std::string& message) {
  throw SimError(category, message);
}

inline void require(bool condition, ErrorCategory category, const std::string& message) {
  if (!condition) fail(category, message);
}

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double linear) { return 10.0 * std::log10(linear); }
inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watt_to_dbm(double watt) { return 10.0 * std::log10(watt) + 30.0; }

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline double distance_m(const Point& a, const Point& b) { return std::hypot(a.x - b.x, a.y - b.y); }

struct Rect {
  double min_x = 0.0, min_y = 0.0, max_x = 0.0, max_y = 0.0;

  double width() const { return max_x - min_x; }
  double height() const { return max_y - min_y; }
  bool contains(const Point& p) const {
    return p.x >= min_x && p.x <= max_x && p.y >= min_y && p.y <= max_y;
  }
};

}  // namespace hetsim
