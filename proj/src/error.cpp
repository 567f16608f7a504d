#include "corrnet/error.hpp"

namespace corrnet {

const char* to_string(Err code) {
  switch (code) {
    case Err::OutOfRangeNode: return "OutOfRangeNode";
    case Err::SelfEdgeForbidden: return "SelfEdgeForbidden";
    case Err::BipartiteViolation: return "BipartiteViolation";
    case Err::EmptyLayer: return "EmptyLayer";
    case Err::LayerIndexOutOfRange: return "LayerIndexOutOfRange";
    case Err::PartitionMismatch: return "PartitionMismatch";
    case Err::DimensionMismatch: return "DimensionMismatch";
    case Err::EmptyInput: return "EmptyInput";
    case Err::FewerThanTwoLayers: return "FewerThanTwoLayers";
    case Err::MissingPartition: return "MissingPartition";
    case Err::TooFewPairs: return "TooFewPairs";
    case Err::InfeasibleParams: return "InfeasibleParams";
    case Err::InfeasibleRho: return "InfeasibleRho";
    case Err::NegativeRhoDCSBM: return "NegativeRhoDCSBM";
    case Err::PairProbabilityOverflow: return "PairProbabilityOverflow";
    case Err::ParseError: return "ParseError";
    case Err::NonConvergence: return "NonConvergence";
    case Err::InfeasibleBundle: return "InfeasibleBundle";
    case Err::InfeasibleStart: return "InfeasibleStart";
    case Err::MissingBundleFit: return "MissingBundleFit";
    case Err::DegenerateMarginal: return "DegenerateMarginal";
    case Err::DegeneratePairVariance: return "DegeneratePairVariance";
    case Err::UndefinedRho: return "UndefinedRho";
    case Err::SingularInformation: return "SingularInformation";
    case Err::OneClassOnly: return "OneClassOnly";
  }
  return "UnknownError";
}

bool is_validation_error(Err code) {
  switch (code) {
    case Err::OutOfRangeNode:
    case Err::SelfEdgeForbidden:
    case Err::BipartiteViolation:
    case Err::EmptyLayer:
    case Err::LayerIndexOutOfRange:
    case Err::PartitionMismatch:
    case Err::DimensionMismatch:
    case Err::EmptyInput:
    case Err::FewerThanTwoLayers:
    case Err::MissingPartition:
    case Err::TooFewPairs:
    case Err::InfeasibleParams:
    case Err::InfeasibleRho:
    case Err::NegativeRhoDCSBM:
    case Err::PairProbabilityOverflow:
    case Err::ParseError:
      return true;
    default:
      return false;
  }
}

}  // namespace corrnet
