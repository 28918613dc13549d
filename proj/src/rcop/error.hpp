#pragma once

#include <stdexcept>
#include <string>

namespace rcop {

enum class ErrorKind {
  Parse,          // malformed cycle notation, files, group specs
  InvalidArgument,
  Domain,         // parameter outside the region where an integral converges
  Numeric,        // positivity / degeneracy failures
  Decomposition,  // numeric block splitting could not be resolved
  CapExceeded,    // closure / enumeration limits
  Io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& msg) {
  throw Error(kind, msg);
}

}  // namespace rcop
