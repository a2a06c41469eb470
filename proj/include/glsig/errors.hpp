#pragma once

#include <stdexcept>
#include <string>

namespace glsig {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define GLSIG_DEFINE_ERROR(Name)          \
  class Name : public Error {             \
   public:                                \
    using Error::Error;                   \
  }

// topology
GLSIG_DEFINE_ERROR(InvalidGeometry);
GLSIG_DEFINE_ERROR(DegenerateGeometry);
GLSIG_DEFINE_ERROR(NonIntegralSignature);

// grasp graph
GLSIG_DEFINE_ERROR(NoParticipants);
GLSIG_DEFINE_ERROR(DisconnectedPaths);
GLSIG_DEFINE_ERROR(MismatchedSkeleton);

// simulator
GLSIG_DEFINE_ERROR(OutOfRange);
GLSIG_DEFINE_ERROR(ExcessVelocity);
GLSIG_DEFINE_ERROR(OutOfReach);
GLSIG_DEFINE_ERROR(RejectedOverlap);
GLSIG_DEFINE_ERROR(NotGrasping);
GLSIG_DEFINE_ERROR(AlreadyGrasping);
GLSIG_DEFINE_ERROR(PathBlocked);

// tasks
GLSIG_DEFINE_ERROR(NonPlanarLoop);

// scenario io
GLSIG_DEFINE_ERROR(ParseError);
GLSIG_DEFINE_ERROR(ValidationError);

#undef GLSIG_DEFINE_ERROR

}  // namespace glsig
