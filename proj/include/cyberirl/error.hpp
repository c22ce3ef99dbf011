#pragma once

#include <stdexcept>
#include <string>

namespace cyberirl {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input document (scenario, log, params).
class ParseError : public Error {
public:
    using Error::Error;
};

/// Well-formed document that breaks a domain invariant. The message names the field.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Caller broke an operation's precondition (illegal action, bad hyperparameter, empty data).
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// State space larger than the configured host cap allows.
class CapacityError : public Error {
public:
    using Error::Error;
};

/// Gradient ascent is moving downhill; the learning rate is too large.
class DivergenceError : public Error {
public:
    using Error::Error;
};

}  // namespace cyberirl
