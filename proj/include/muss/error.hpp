#pragma once

#include <stdexcept>
#include <string>

namespace muss {

/// Base class for all toolkit errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Violated precondition or unusable argument (maps to CLI exit code 1).
class InvalidArgument : public Error {
public:
    explicit InvalidArgument(const std::string& what) : Error(what) {}
};

/// Malformed files, unreadable paths, inconsistent data (CLI exit code 2).
class DataError : public Error {
public:
    explicit DataError(const std::string& what) : Error(what) {}
};

}  // namespace muss
