#pragma once

#include <stdexcept>
#include <string>

namespace qbn {

// Base class for every error thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CycleDetected : Error {
    using Error::Error;
};
struct DimensionMismatch : Error {
    using Error::Error;
};
struct StoryCapExceeded : Error {
    using Error::Error;
};
struct UnknownAxis : Error {
    using Error::Error;
};
struct EmptyResult : Error {
    using Error::Error;
};
struct ZeroProbability : Error {
    using Error::Error;
};
struct ZeroDenominator : Error {
    using Error::Error;
};
struct EmptyGamma : Error {
    using Error::Error;
};
struct NotHermitian : Error {
    using Error::Error;
};
struct NotPsd : Error {
    using Error::Error;
};
struct NotUnitarizable : Error {
    using Error::Error;
};
struct NotNormalized : Error {
    using Error::Error;
};
struct DomainError : Error {
    using Error::Error;
};
struct EmptyExpression : Error {
    using Error::Error;
};

// Parse failure with a character position (0-based offset into the input).
struct SyntaxError : Error {
    size_t position;
    SyntaxError(const std::string& what, size_t pos) : Error(what), position(pos) {}
};

}  // namespace qbn
