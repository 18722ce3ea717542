#pragma once

#include <stdexcept>
#include <string>

namespace structcov {

// Every failure raised by the library derives from Error; the concrete type
// names the contract that was broken.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define STRUCTCOV_ERROR(Name)                  \
  class Name : public Error {                  \
   public:                                     \
    using Error::Error;                        \
  }

STRUCTCOV_ERROR(InvalidArgument);
STRUCTCOV_ERROR(InvalidSpec);
STRUCTCOV_ERROR(StructuralRankError);
STRUCTCOV_ERROR(IllConditioned);
STRUCTCOV_ERROR(NotPositiveDefinite);
STRUCTCOV_ERROR(ConditionC3Violated);
STRUCTCOV_ERROR(MissingConstant);
STRUCTCOV_ERROR(QuadratureFailure);
STRUCTCOV_ERROR(UnsupportedSampler);
STRUCTCOV_ERROR(DegenerateScale);
STRUCTCOV_ERROR(RootFindError);
STRUCTCOV_ERROR(NotOrderZero);
STRUCTCOV_ERROR(InvalidState);
STRUCTCOV_ERROR(InvalidParameters);
STRUCTCOV_ERROR(ExperimentFailure);

#undef STRUCTCOV_ERROR

}  // namespace structcov
