#ifndef PATCLS_ERROR_H_
#define PATCLS_ERROR_H_

#include <stdexcept>
#include <string>

namespace patcls {

// Broad failure classes. The CLI maps each one to a distinct exit code.
enum class ErrorCategory {
  kConfig,   // bad configuration, taxonomy or query text
  kData,     // unreadable or malformed input data
  kNumeric,  // NaN/Inf or divergence during training
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& message)
      : std::runtime_error(message), category_(category) {}

  ErrorCategory category() const { return category_; }

 private:
  ErrorCategory category_;
};

inline Error ConfigError(const std::string& message) {
  return Error(ErrorCategory::kConfig, message);
}
inline Error DataError(const std::string& message) {
  return Error(ErrorCategory::kData, message);
}
inline Error NumericError(const std::string& message) {
  return Error(ErrorCategory::kNumeric, message);
}

const char* CategoryName(ErrorCategory category);
int ExitCode(ErrorCategory category);

}  // namespace patcls

#endif  // PATCLS_ERROR_H_
