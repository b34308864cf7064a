#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tvor {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

// Two-parameter least-squares problem without a unique solution.
class SingularFit : public Error {
public:
    using Error::Error;
};

// An operation needed data that was not there (empty window, empty side of a split).
class NoData : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace tvor
