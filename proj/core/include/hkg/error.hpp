#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hkg {

enum class ErrorKind {
  kLoad,
  kValidation,
  kNormalization,
  kLookup,
  kState,
  kSpec,
  kStorage,
  kIncompatibleVersion,
  kCorruption,
  kRejected,
  kAnalysis,
};

std::string_view to_string(ErrorKind kind);

// Every failure raised by the library carries a kind so callers (CLI exit
// codes, HTTP status mapping) can dispatch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace hkg
