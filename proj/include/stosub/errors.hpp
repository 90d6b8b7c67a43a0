#ifndef STOSUB_ERRORS_HPP
#define STOSUB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace stosub {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed instance, realization, or argument (bad ids, probabilities, ...).
class InvalidInputError : public Error {
public:
    using Error::Error;
};

/// An exact computation would exceed the configured enumeration cap.
/// The message names the Monte Carlo alternative where one exists.
class CapExceededError : public Error {
public:
    using Error::Error;
};

/// Operation requires a matroid kind that does not support it
/// (e.g. polytope description of an explicit matroid).
class UnsupportedMatroidError : public Error {
public:
    using Error::Error;
};

/// A fractional point lies outside the required polytope.
class InvalidPointError : public Error {
public:
    using Error::Error;
};

/// File could not be read or written.
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace stosub

#endif
