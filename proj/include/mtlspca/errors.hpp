#pragma once

#include <stdexcept>
#include <string>

namespace mtlspca {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Caller supplied something malformed: bad shapes, out-of-range indices,
// unreadable files. The CLI maps these to exit code 1.
class InputError : public Error {
public:
    using Error::Error;
};

class ParseError : public InputError {
public:
    ParseError(const std::string& source, long line, const std::string& what)
        : InputError(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

    long line() const noexcept { return line_; }

private:
    long line_;
};

// A class has too few samples for the split-half estimator.
class EstimationError : public InputError {
public:
    using InputError::InputError;
};

// The numbers themselves went wrong. The CLI maps these to exit code 2.
class NumericalError : public Error {
public:
    using Error::Error;
};

class NotPsdError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class SingularError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

// Xy vanished, so the matched filter has no direction.
class DegenerateDirectionError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace mtlspca
