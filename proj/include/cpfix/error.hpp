#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cpfix {

enum class ErrorKind {
    NotHermitian,
    NoConvergence,
    NotPSD,
    ShapeMismatch,
    NotProjection,
    NotUnitary,
    NotCP,
    NotContractive,
    NotEndomorphism,
    NotCommuting,
    CoInvarianceViolated,
    SemigroupLawViolated,
    NotMinimal,
    Divergent,
    NotInCStar,
    NotFixed,
    Inconsistent,
    InvalidArgument,
    ParseError,
    ValidationFailed,
    UnknownFamily,
};

std::string_view to_string(ErrorKind kind);

/// Single exception type for the toolkit; callers switch on kind().
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace cpfix
