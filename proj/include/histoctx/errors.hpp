#pragma once

#include <stdexcept>
#include <string>

namespace histoctx {

// Base class for all pipeline errors so callers can catch one type.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define HISTOCTX_DEFINE_ERROR(Name)                                   \
    class Name : public Error {                                       \
    public:                                                           \
        explicit Name(const std::string& msg) : Error(msg) {}         \
    }

HISTOCTX_DEFINE_ERROR(InvalidArgument);
HISTOCTX_DEFINE_ERROR(InvalidFactor);
HISTOCTX_DEFINE_ERROR(NoVariance);
HISTOCTX_DEFINE_ERROR(OutOfBounds);
HISTOCTX_DEFINE_ERROR(AmbiguousAnnotation);
HISTOCTX_DEFINE_ERROR(DegenerateTexture);
HISTOCTX_DEFINE_ERROR(InvalidTrainingSet);
HISTOCTX_DEFINE_ERROR(EmptyTrainingSet);
HISTOCTX_DEFINE_ERROR(InvalidFeature);
HISTOCTX_DEFINE_ERROR(MissingContext);
HISTOCTX_DEFINE_ERROR(IncompatibleModel);
HISTOCTX_DEFINE_ERROR(ParseError);
HISTOCTX_DEFINE_ERROR(IoError);

#undef HISTOCTX_DEFINE_ERROR

} // namespace histoctx
