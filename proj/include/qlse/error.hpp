#pragma once

#include <stdexcept>
#include <string>

namespace qlse {

// Error categories. The numeric values are shared with the C API status codes.
enum class ErrorKind {
  Domain = 1,
  Numeric = 2,
  Validation = 3,
  Admissibility = 4,
  Degenerate = 5,
  Stagnation = 6,
  Bracket = 7,
  Tuning = 8,
  Usage = 9,
  Config = 10,
  Io = 11,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Numeric: return "numeric";
    case ErrorKind::Validation: return "validation";
    case ErrorKind::Admissibility: return "admissibility";
    case ErrorKind::Degenerate: return "degenerate";
    case ErrorKind::Stagnation: return "stagnation";
    case ErrorKind::Bracket: return "bracket";
    case ErrorKind::Tuning: return "tuning";
    case ErrorKind::Usage: return "usage";
    case ErrorKind::Config: return "config";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace qlse
