#include "patcls/error.h"

namespace patcls {

const char* CategoryName(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::kConfig:
      return "config_error";
    case ErrorCategory::kData:
      return "data_error";
    case ErrorCategory::kNumeric:
      return "numeric_error";
  }
  return "error";
}

int ExitCode(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::kConfig:
      return 2;
    case ErrorCategory::kData:
      return 3;
    case ErrorCategory::kNumeric:
      return 4;
  }
  return 1;
}

}  // namespace patcls
