#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace specfreq {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;
using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

enum class ErrorCode {
    EmptyInput,
    NonFiniteValue,
    NonNumericCell,
    RaggedRows,
    InsufficientLength,
    InvalidArgument,
    InvalidFrequency,
    InvalidBandwidth,
    DimensionMismatch,
    NonPositiveAutoSpectrum,
    NonStationary,
    Io,
};

[[nodiscard]] std::string_view to_string(ErrorCode code) noexcept;

// Validation errors map to CLI exit code 2; the rest (Io) are runtime failures.
[[nodiscard]] bool is_validation_error(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace specfreq
