#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace amoc {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input data violates a structural precondition (empty, non-finite values).
class InvalidData : public Error {
public:
    using Error::Error;
};

/// A change-point index outside the range where the statistic is defined.
class IndexError : public Error {
public:
    using Error::Error;
};

/// A real argument outside the domain of a function.
class DomainError : public Error {
public:
    using Error::Error;
};

/// The statistic is undefined for this sample (all observations equal).
class DegenerateData : public Error {
public:
    using Error::Error;
};

class ModelError : public Error {
public:
    using Error::Error;
};

/// A root search or quadrature failed to converge or bracket.
class NumericalError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class UsageError : public Error {
public:
    using Error::Error;
};

} // namespace amoc
