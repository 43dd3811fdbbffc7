#pragma once

#include <stdexcept>
#include <string>

namespace zenoguard {

enum class ErrorCode {
    NotHermitian,
    DimensionMismatch,
    UnknownLabel,
    NotNormalized,
    InvalidState,
    InvalidArgument,
    NonConvergence,
    CutoffTooSmall,
    DimensionOverflow,
    NonIntegrable,
    OddQubitCount,
    ConfigError,
};

const char* to_string(ErrorCode code) noexcept;

// All library failures derive from this; callers dispatch on code().
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

    // CutoffTooSmall, NonIntegrable and NonConvergence are numerical failures;
    // everything else is a caller/config problem.
    bool is_numerical() const noexcept {
        return code_ == ErrorCode::CutoffTooSmall || code_ == ErrorCode::NonIntegrable ||
               code_ == ErrorCode::NonConvergence;
    }

private:
    ErrorCode code_;
};

}  // namespace zenoguard
