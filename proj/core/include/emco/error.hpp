#pragma once

#include <stdexcept>
#include <string>

namespace emco {

// Error taxonomy used across the library. Validation errors mean the input
// cannot be analyzed as given (bad file, bad schema, bad configuration);
// degeneracy errors mean the input is well formed but a statistical quantity
// is undefined on it (empty instrument arm, zero first stage, infeasible
// bounds problem).
enum class ErrorCode {
  MissingColumn,
  NonBinaryInstrument,
  EmptyAfterFiltering,
  UnparseableCell,
  DegenerateTreatment,
  InvalidArgument,
  InvalidShares,
  RankDeficientCovariates,
  DegenerateArm,
  ZeroFirstStage,
  InfeasibleProblem,
};

const char* to_string(ErrorCode code);

// True for the statistical-degeneracy class (CLI exit code 3); false for the
// validation class (exit code 2).
bool is_degeneracy(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace emco
