// Error type shared across the library.
//
// Every failure mode that callers are expected to branch on carries a short
// stable code string ("NonConvergent", "NodeOnCurve", ...) next to a
// human-readable message.  Codes are part of the public contract; messages
// are not.
#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace qhydro {

class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(code + ": " + message), code_(std::move(code)) {}

  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

[[noreturn]] inline void raise(const std::string& code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace qhydro
