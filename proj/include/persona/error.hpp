#ifndef PERSONA_ERROR_HPP
#define PERSONA_ERROR_HPP

#include <stdexcept>
#include <string>

namespace persona {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Record/prototype/attribute lists disagree in length.
class AlignmentError : public Error {
public:
    using Error::Error;
};

/// A measure was asked to operate on attributes it does not support,
/// or a policy parameter is out of range.
class PolicyError : public Error {
public:
    using Error::Error;
};

/// The requested cluster count cannot be realised on the data.
class InfeasibleError : public Error {
public:
    using Error::Error;
};

/// Malformed user input: response files, report documents, model documents, curves.
class InputError : public Error {
public:
    using Error::Error;
};

class SchemaError : public Error {
public:
    using Error::Error;
};

/// A profile whose raw scores are all zero cannot be normalised.
class DegenerateProfileError : public Error {
public:
    using Error::Error;
};

class EmptyClusterError : public Error {
public:
    using Error::Error;
};

/// Raised by debug-mode checks inside the clustering loop.
class InvariantViolation : public Error {
public:
    using Error::Error;
};

} // namespace persona

#endif
