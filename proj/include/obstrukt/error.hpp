#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace obstrukt {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed or out-of-contract input (bad file, bad flag, bad size).
class InputError : public Error {
public:
    using Error::Error;
};

// Argument lies outside the mathematical domain of an operation.
class DomainError : public InputError {
public:
    using InputError::InputError;
};

// Matrix or vector dimensions do not fit the operation.
class ShapeError : public InputError {
public:
    using InputError::InputError;
};

// A computation could not deliver a trustworthy answer.
class NumericalError : public Error {
public:
    using Error::Error;
};

class NotAttainedError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class OpenCurveError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class ProximityError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class ProjectionError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class PoleError : public NumericalError {
public:
    PoleError(const std::string& what, std::vector<double> suggested)
        : NumericalError(what), suggested_pole_(std::move(suggested)) {}

    const std::vector<double>& suggested_pole() const { return suggested_pole_; }

private:
    std::vector<double> suggested_pole_;
};

// A zero list is not closed under the symmetry it must carry.
class ConsistencyError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class InvalidMoveError : public InputError {
public:
    using InputError::InputError;
};

class DegenerateRepresentationError : public InputError {
public:
    using InputError::InputError;
};

class NotACharacterError : public InputError {
public:
    using InputError::InputError;
};

}  // namespace obstrukt
