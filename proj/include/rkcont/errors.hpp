#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace rkcont {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A point lies outside the kernel's domain of validity, or a kernel
/// parameter is out of range.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Two points of an instance coincide (separation <= 1e-12 in max-norm).
/// Index -1 refers to the continuation target.
class DuplicatePointError : public Error {
public:
    DuplicatePointError(int first, int second, const std::string& what)
        : Error(what), first_(first), second_(second) {}
    int first() const noexcept { return first_; }
    int second() const noexcept { return second_; }

private:
    int first_;
    int second_;
};

class EmptyDataError : public Error {
public:
    using Error::Error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

/// An operation was requested outside the regime in which it is defined.
class RegimeError : public Error {
public:
    using Error::Error;
};

class BracketError : public Error {
public:
    using Error::Error;
};

class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// Configuration file error; carries the offending field path.
class ConfigError : public Error {
public:
    ConfigError(std::string field, const std::string& what)
        : Error(field + ": " + what), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

}  // namespace rkcont
