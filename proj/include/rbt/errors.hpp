#pragma once

#include <stdexcept>
#include <string>

namespace rbt {

/// Bad user input: config fields, scenario files, operation preconditions.
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(const std::string& msg) : std::invalid_argument(msg) {}
};

/// Unreadable, truncated or malformed files.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace rbt
