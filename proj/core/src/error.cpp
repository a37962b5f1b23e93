#include "fourthkind/error.hpp"

namespace fourthkind {

std::string_view to_string(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::domain:
      return "domain";
    case ErrorCategory::state:
      return "state";
    case ErrorCategory::infeasible:
      return "infeasible";
    case ErrorCategory::nonconverged:
      return "nonconverged";
    case ErrorCategory::calibration:
      return "calibration";
    case ErrorCategory::io:
      return "io";
    case ErrorCategory::inconsistent_support:
      return "inconsistent-support";
  }
  return "unknown";
}

}  // namespace fourthkind
