#pragma once

#include <stdexcept>
#include <string>

namespace forge {

// Base class for all toolkit errors.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

#define FORGE_DEFINE_ERROR(NAME)                                               \
    class NAME : public Error {                                                \
      public:                                                                  \
        using Error::Error;                                                    \
    }

// dom
FORGE_DEFINE_ERROR(UnparseableError);
FORGE_DEFINE_ERROR(UnknownNodeError);
// preprocess
FORGE_DEFINE_ERROR(EmptyAfterCleaningError);
// similarity
FORGE_DEFINE_ERROR(SameNodeError);
// miner
FORGE_DEFINE_ERROR(TargetNotInteractiveError);
FORGE_DEFINE_ERROR(MismatchedTargetError);
// synthesis
FORGE_DEFINE_ERROR(EndpointError);
FORGE_DEFINE_ERROR(InvalidGenerationError);
FORGE_DEFINE_ERROR(UnparseableResponseError);
// alignment
FORGE_DEFINE_ERROR(NonPositiveProbabilityError);
FORGE_DEFINE_ERROR(DegenerateProbabilityError);
FORGE_DEFINE_ERROR(GroupTooSmallError);
// metrics
FORGE_DEFINE_ERROR(EmptyRunError);
// cli / config
FORGE_DEFINE_ERROR(ConfigError);

#undef FORGE_DEFINE_ERROR

} // namespace forge
