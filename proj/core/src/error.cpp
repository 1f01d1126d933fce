#include "emco/error.hpp"

namespace emco {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::NonBinaryInstrument: return "NonBinaryInstrument";
    case ErrorCode::EmptyAfterFiltering: return "EmptyAfterFiltering";
    case ErrorCode::UnparseableCell: return "UnparseableCell";
    case ErrorCode::DegenerateTreatment: return "DegenerateTreatment";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidShares: return "InvalidShares";
    case ErrorCode::RankDeficientCovariates: return "RankDeficientCovariates";
    case ErrorCode::DegenerateArm: return "DegenerateArm";
    case ErrorCode::ZeroFirstStage: return "ZeroFirstStage";
    case ErrorCode::InfeasibleProblem: return "InfeasibleProblem";
  }
  return "Unknown";
}

bool is_degeneracy(ErrorCode code) {
  switch (code) {
    case ErrorCode::DegenerateArm:
    case ErrorCode::ZeroFirstStage:
    case ErrorCode::InfeasibleProblem:
      return true;
    default:
      return false;
  }
}

}  // namespace emco
