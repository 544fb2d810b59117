#include "hkg/error.hpp"

namespace hkg {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kLoad: return "load";
    case ErrorKind::kValidation: return "validation";
    case ErrorKind::kNormalization: return "normalization";
    case ErrorKind::kLookup: return "lookup";
    case ErrorKind::kState: return "state";
    case ErrorKind::kSpec: return "spec";
    case ErrorKind::kStorage: return "storage";
    case ErrorKind::kIncompatibleVersion: return "incompatible_version";
    case ErrorKind::kCorruption: return "corruption";
    case ErrorKind::kRejected: return "rejected";
    case ErrorKind::kAnalysis: return "analysis";
  }
  return "unknown";
}

}  // namespace hkg
