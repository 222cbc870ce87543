#pragma once

#include <stdexcept>
#include <string>

namespace csrkn {

enum class ErrorCode {
    InvalidArgument,
    DegreeOverflow,
    UnsupportedStageCount,
    SymmetryViolation,
    ExpansionConstraint,
    StageDivergence,
    InvalidGrid,
    DegenerateFit,
    Parse,
    Io,
};

/// Exception type thrown by every module of the core library. The C API
/// maps code() onto its status enum.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Raised by the stage solver; carries the last fixed-point increment.
class StageDivergence : public Error {
public:
    StageDivergence(const std::string& what, double last_residual)
        : Error(ErrorCode::StageDivergence, what), residual_(last_residual) {}

    [[nodiscard]] double last_residual() const noexcept { return residual_; }

private:
    double residual_;
};

} // namespace csrkn
