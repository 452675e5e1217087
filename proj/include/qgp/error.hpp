#pragma once

#include <stdexcept>
#include <string>

namespace qgp {

// Failure categories map onto CLI exit codes: config -> 2, numerical -> 3.
enum class ErrorCategory { config, numerical, usage };

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}
  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what)
      : Error(ErrorCategory::numerical, what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what)
      : Error(ErrorCategory::config, what) {}
};

class NonHermitianError : public NumericalError {
 public:
  NonHermitianError(const std::string& what, double deviation)
      : NumericalError(what), deviation_(deviation) {}
  double deviation() const noexcept { return deviation_; }

 private:
  double deviation_;
};

class DegenerateSpectrumError : public NumericalError {
 public:
  DegenerateSpectrumError(const std::string& what, std::size_t level, double gap)
      : NumericalError(what), level_(level), gap_(gap) {}
  std::size_t level() const noexcept { return level_; }
  double gap() const noexcept { return gap_; }

 private:
  std::size_t level_;
  double gap_;
};

/// Adaptive propagation could not meet the tolerance. Carries the last time
/// reached with an accepted step.
class PropagationError : public NumericalError {
 public:
  PropagationError(const std::string& what, double last_good_time)
      : NumericalError(what), last_good_time_(last_good_time) {}
  double last_good_time() const noexcept { return last_good_time_; }

 private:
  double last_good_time_;
};

}  // namespace qgp
