#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace ulln {

// Bad arguments, malformed specs, preconditions violated by the caller.
// The CLI maps these to exit code 2.
class ValidationError : public std::invalid_argument {
public:
    ValidationError(std::string code, const std::string& detail)
        : std::invalid_argument(code + ": " + detail), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

// A numeric contract did not hold at runtime (e.g. an intensity exceeded its
// declared bound, or a series tail failed to converge). CLI exit code 3.
class NumericError : public std::runtime_error {
public:
    NumericError(std::string code, const std::string& detail)
        : std::runtime_error(code + ": " + detail), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

} // namespace ulln
