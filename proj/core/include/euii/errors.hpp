#pragma once

#include <stdexcept>
#include <string>

namespace euii {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Power of exactly 0 or 1 gives an infinite or zero likelihood ratio.
class DegenerateEvidenceError : public DomainError {
public:
    using DomainError::DomainError;
};

/// A series, bisection or root finder failed to converge.
class NumericError : public Error {
public:
    using Error::Error;
};

/// Input data is malformed or too sparse to estimate a quantity
/// (e.g. an empty outcome cell that carries posterior weight).
class DataError : public Error {
public:
    using Error::Error;
};

}  // namespace euii
