// Error taxonomy shared across the library. Every failure that callers can
// meaningfully react to carries a stable code; the CLI maps codes onto exit
// statuses (validation -> 2, numerical -> 3).

#pragma once

#include <stdexcept>
#include <string>

namespace corrnet {

enum class Err {
  // Validation: the inputs themselves are unusable.
  OutOfRangeNode,
  SelfEdgeForbidden,
  BipartiteViolation,
  EmptyLayer,
  LayerIndexOutOfRange,
  PartitionMismatch,
  DimensionMismatch,
  EmptyInput,
  FewerThanTwoLayers,
  MissingPartition,
  TooFewPairs,
  InfeasibleParams,
  InfeasibleRho,
  NegativeRhoDCSBM,
  PairProbabilityOverflow,
  ParseError,
  // Numerical: the computation could not be completed on valid inputs.
  NonConvergence,
  InfeasibleBundle,
  InfeasibleStart,
  MissingBundleFit,
  DegenerateMarginal,
  DegeneratePairVariance,
  UndefinedRho,
  SingularInformation,
  OneClassOnly,
};

const char* to_string(Err code);

// True for codes that indicate bad input rather than a numerical failure.
bool is_validation_error(Err code);

class ModelError : public std::runtime_error {
 public:
  ModelError(Err code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  Err code() const { return code_; }

 private:
  Err code_;
};

[[noreturn]] inline void fail(Err code, const std::string& message) {
  throw ModelError(code, message);
}

}  // namespace corrnet
