#pragma once

#include <stdexcept>
#include <string>

namespace hsv {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define HSV_DEFINE_ERROR(Name)                                                                               \
    class Name : public Error {                                                                              \
    public:                                                                                                  \
        using Error::Error;                                                                                  \
    }

HSV_DEFINE_ERROR(ConstructionError);
HSV_DEFINE_ERROR(DegenerateBox);
HSV_DEFINE_ERROR(DimMismatch);
HSV_DEFINE_ERROR(DomainError);
HSV_DEFINE_ERROR(StripStraddle);
HSV_DEFINE_ERROR(BudgetExceeded);
HSV_DEFINE_ERROR(HypothesisFailed);
HSV_DEFINE_ERROR(NotASlab);
HSV_DEFINE_ERROR(NotPhaseForm);
HSV_DEFINE_ERROR(EmptyWord);
HSV_DEFINE_ERROR(AlphabetMismatch);
HSV_DEFINE_ERROR(NotDisjoint);
HSV_DEFINE_ERROR(PrerequisiteFailed);
HSV_DEFINE_ERROR(SetsIntersect);
HSV_DEFINE_ERROR(EmptySet);
HSV_DEFINE_ERROR(PreconditionFailed);
HSV_DEFINE_ERROR(ParseError);

#undef HSV_DEFINE_ERROR

} // namespace hsv
