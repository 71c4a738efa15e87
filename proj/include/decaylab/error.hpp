#pragma once

#include <stdexcept>
#include <string>

namespace decaylab {

/// Broad failure classes; the CLI maps them onto exit codes.
enum class ErrorKind {
  invalid_argument,  // caller violated a precondition
  domain,            // geometry could not be built or is empty
  numerical,         // a solver failed to converge or a truncation is unsafe
  config,            // campaign configuration is malformed
  io,                // file could not be read or written
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

namespace detail {

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void require(bool ok, const std::string& what,
                    ErrorKind kind = ErrorKind::invalid_argument) {
  if (!ok) fail(kind, what);
}

}  // namespace detail
}  // namespace decaylab
