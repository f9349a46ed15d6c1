#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mtphase {

enum class ErrorCode {
    NonPositiveParameter,
    K1NotPositive,
    NotAnEigenvalue,
    NoSignChange,
    ComplexCrossing,
    CurveLeftDomain,
    StepCollapse,
    DegenerateAlpha,
    Resonance,
    BoundaryMismatch,
    OutOfTheory,
    GridTooCoarse,
    StepUnstable,
    InsufficientData,
    ParseError,
    ValidationError,
    UnknownKey,
    Io,
};

std::string_view error_code_name(ErrorCode code);

/// Exception carrying a machine-readable code. `detail` names the offending
/// field or quantity when there is one.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, std::string message, std::string detail = {})
        : std::runtime_error(std::move(message)), code_(code), detail_(std::move(detail)) {}

    ErrorCode code() const noexcept { return code_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    ErrorCode code_;
    std::string detail_;
};

}  // namespace mtphase
