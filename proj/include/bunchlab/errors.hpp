#pragma once

#include <stdexcept>
#include <string>

namespace bunchlab {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Operands have incompatible shapes.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// An input fails a mathematical precondition (not Hermitian, not a Gram
/// matrix, not unitary, not a contraction, malformed mesh, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A hard size cap was exceeded (factorial or exponential blowup guard).
class SizeCapError : public Error {
public:
    using Error::Error;
};

/// A numerical routine failed to converge or produced an implausible result.
class NumericError : public Error {
public:
    using Error::Error;
};

/// A row/column index is out of range.
class IndexError : public Error {
public:
    using Error::Error;
};

/// A scalar parameter is outside its admissible range.
class RangeError : public Error {
public:
    using Error::Error;
};

/// The input is degenerate for the requested quantity (for example a zero
/// permanent where a ratio is needed).
class DegenerateError : public Error {
public:
    using Error::Error;
};

/// A file could not be read or written.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace bunchlab
