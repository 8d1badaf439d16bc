#pragma once
#include <stdexcept>
#include <string>

namespace exgen {

// Precondition or shape violation by the caller.
struct ContractViolation : std::invalid_argument {
  explicit ContractViolation(const std::string& msg) : std::invalid_argument(msg) {}
};

// NaN/Inf produced mid-computation; message names the primitive.
struct NumericFailure : std::runtime_error {
  explicit NumericFailure(const std::string& msg) : std::runtime_error(msg) {}
};

// Training diverged; message carries the last finite step.
struct TrainingFailure : std::runtime_error {
  explicit TrainingFailure(const std::string& msg) : std::runtime_error(msg) {}
};

// A stated distributional assumption does not hold for the given model.
struct AssumptionViolation : std::runtime_error {
  explicit AssumptionViolation(const std::string& msg) : std::runtime_error(msg) {}
};

// Constructive search exhausted its budget.
struct SearchFailure : std::runtime_error {
  explicit SearchFailure(const std::string& msg) : std::runtime_error(msg) {}
};

struct IoError : std::runtime_error {
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// Conditioning on a zero-mass event.
struct UndefinedConditional : std::runtime_error {
  explicit UndefinedConditional(const std::string& msg) : std::runtime_error(msg) {}
};

// Factor division hit a zero denominator with a nonzero numerator.
struct DivisionSingularity : std::runtime_error {
  explicit DivisionSingularity(const std::string& msg) : std::runtime_error(msg) {}
};

// No shared-feature value with positive density under every block exists.
struct ExistenceFailure : std::runtime_error {
  explicit ExistenceFailure(const std::string& msg) : std::runtime_error(msg) {}
};

// No valid pair of observationally equivalent nets was found.
struct WitnessNotFound : std::runtime_error {
  WitnessNotFound(const std::string& msg, double best)
      : std::runtime_error(msg), best_distance(best) {}
  double best_distance = 0.0;
};

}  // namespace exgen
