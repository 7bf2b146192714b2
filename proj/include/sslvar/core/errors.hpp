#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sslvar {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class NonFiniteInput : public Error {
public:
    NonFiniteInput() : Error("input contains non-finite values") {}
    using Error::Error;
};

class ConstantColumn : public Error {
public:
    explicit ConstantColumn(std::size_t column)
        : Error("column " + std::to_string(column) + " has zero variance"), column_(column) {}

    std::size_t column() const noexcept { return column_; }

private:
    std::size_t column_;
};

class NotStandardized : public Error {
public:
    NotStandardized() : Error("dataset is not standardized") {}
};

/// Raised when a fit selects at least as many coefficients as observations.
class DegenerateFit : public Error {
public:
    using Error::Error;
};

class SingularDesign : public Error {
public:
    using Error::Error;
};

class InsufficientDof : public Error {
public:
    using Error::Error;
};

/// Scalar root or fixed-point search that failed to settle.
class NoConvergence : public Error {
public:
    using Error::Error;
};

/// Iterative solver that hit its iteration cap. Carries the partial result.
template <class Partial>
class DidNotConverge : public Error {
public:
    DidNotConverge(std::string what, Partial partial)
        : Error(std::move(what)), partial_(std::move(partial)) {}

    const Partial& partial() const noexcept { return partial_; }

private:
    Partial partial_;
};

/// Malformed text input. Line and column are 1-based; column 0 means "whole line".
class ParseError : public Error {
public:
    ParseError(const std::string& source, std::size_t line, std::size_t column, const std::string& msg)
        : Error(source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + msg),
          line_(line), column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

} // namespace sslvar
