#include "zenoguard/errors.hpp"

namespace zenoguard {

const char* to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::NotHermitian: return "NotHermitian";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::UnknownLabel: return "UnknownLabel";
        case ErrorCode::NotNormalized: return "NotNormalized";
        case ErrorCode::InvalidState: return "InvalidState";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::NonConvergence: return "NonConvergence";
        case ErrorCode::CutoffTooSmall: return "CutoffTooSmall";
        case ErrorCode::DimensionOverflow: return "DimensionOverflow";
        case ErrorCode::NonIntegrable: return "NonIntegrable";
        case ErrorCode::OddQubitCount: return "OddQubitCount";
        case ErrorCode::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

}  // namespace zenoguard
