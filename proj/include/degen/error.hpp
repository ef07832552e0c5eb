#pragma once

#include <stdexcept>
#include <string>

namespace degen {

/// Failure categories shared by the C++ core and the C API.
enum class ErrorKind {
  Argument,       // bad parameter value or unsupported option
  Dimension,      // shapes or grids do not match
  Model,          // operator data violates a structural requirement
  Certification,  // a positivity / hypothesis certificate failed
  Config,         // configuration text could not be parsed or validated
  Io,
  Internal        // a state that a certified setup should never reach
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

inline void require(bool condition, ErrorKind kind, const std::string& what) {
  if (!condition) fail(kind, what);
}

}  // namespace degen
