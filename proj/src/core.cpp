#include "specfreq/core.hpp"

namespace specfreq {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::NonFiniteValue: return "NonFiniteValue";
        case ErrorCode::NonNumericCell: return "NonNumericCell";
        case ErrorCode::RaggedRows: return "RaggedRows";
        case ErrorCode::InsufficientLength: return "InsufficientLength";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::InvalidFrequency: return "InvalidFrequency";
        case ErrorCode::InvalidBandwidth: return "InvalidBandwidth";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::NonPositiveAutoSpectrum: return "NonPositiveAutoSpectrum";
        case ErrorCode::NonStationary: return "NonStationary";
        case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

bool is_validation_error(ErrorCode code) noexcept { return code != ErrorCode::Io; }

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace specfreq
