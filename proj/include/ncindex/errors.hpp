#pragma once

#include <stdexcept>
#include <string>

namespace ncindex {

/// Base class of every error raised by the library. `kind()` is the stable
/// identifier that ends up in report rows.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual const char* kind() const noexcept { return "Error"; }
};

#define NCINDEX_DEFINE_ERROR(Name)                                        \
    class Name : public Error {                                           \
    public:                                                               \
        using Error::Error;                                               \
        const char* kind() const noexcept override { return #Name; }      \
    }

NCINDEX_DEFINE_ERROR(TruncationOverflow);
NCINDEX_DEFINE_ERROR(NotInvertibleInBudget);
NCINDEX_DEFINE_ERROR(UnsupportedDegree);
NCINDEX_DEFINE_ERROR(NotAProjection);
NCINDEX_DEFINE_ERROR(NotUnitary);
NCINDEX_DEFINE_ERROR(BadCover);
NCINDEX_DEFINE_ERROR(DegreeMismatch);
NCINDEX_DEFINE_ERROR(UnsupportedManifold);
NCINDEX_DEFINE_ERROR(IllConditioned);
NCINDEX_DEFINE_ERROR(InsufficientTruncation);
NCINDEX_DEFINE_ERROR(PhaseJump);
NCINDEX_DEFINE_ERROR(EndpointDegenerate);
NCINDEX_DEFINE_ERROR(CrossingUnresolved);
NCINDEX_DEFINE_ERROR(PreconditionViolation);
NCINDEX_DEFINE_ERROR(ConfigError);

#undef NCINDEX_DEFINE_ERROR

}  // namespace ncindex
