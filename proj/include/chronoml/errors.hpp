#pragma once

#include <stdexcept>
#include <string>

namespace chronoml {

struct Error : std::runtime_error {
    explicit Error(const std::string &msg) : std::runtime_error(msg) {}
};

struct ParseError : Error {
    using Error::Error;
};

struct SchemaError : Error {
    using Error::Error;
};

struct OrderingError : Error {
    using Error::Error;
};

struct InsufficientLengthError : Error {
    using Error::Error;
};

struct UndefinedScaleError : Error {
    using Error::Error;
};

struct NumericalError : Error {
    using Error::Error;
};

struct TimedOutError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

}  // namespace chronoml
