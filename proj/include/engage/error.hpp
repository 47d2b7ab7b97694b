#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace engage {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Value outside the mathematical domain of an operation (e.g. quality > 1).
class DomainError : public Error {
public:
    using Error::Error;
};

// Malformed input file. `line` is 1-based; 0 when not applicable.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// A remote classifier or generator could not produce an answer.
class ClassificationUnavailable : public Error {
public:
    using Error::Error;
};

class BackendUnavailable : public Error {
public:
    using Error::Error;
};

class SessionEnded : public Error {
public:
    using Error::Error;
};

class InsufficientData : public Error {
public:
    using Error::Error;
};

}  // namespace engage
