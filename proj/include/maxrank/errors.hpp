#pragma once

#include <stdexcept>
#include <string>

namespace maxrank {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define MAXRANK_DEFINE_ERROR(Name)          \
  class Name : public Error {               \
   public:                                  \
    using Error::Error;                     \
  }

MAXRANK_DEFINE_ERROR(DomainViolation);
MAXRANK_DEFINE_ERROR(RankDeficient);
MAXRANK_DEFINE_ERROR(BasePointMismatch);
MAXRANK_DEFINE_ERROR(MaximalRankViolation);
MAXRANK_DEFINE_ERROR(DriftExceeded);
MAXRANK_DEFINE_ERROR(NotCompact);
MAXRANK_DEFINE_ERROR(Unreachable);
MAXRANK_DEFINE_ERROR(InsufficientSamples);
MAXRANK_DEFINE_ERROR(FullnessFailed);
MAXRANK_DEFINE_ERROR(NonPositiveR);
MAXRANK_DEFINE_ERROR(InvalidArgument);
MAXRANK_DEFINE_ERROR(DescriptorError);

#undef MAXRANK_DEFINE_ERROR

}  // namespace maxrank
