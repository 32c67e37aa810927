#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace steinb {

enum class ErrorKind {
    NonConvergence,
    NonFinite,
    TruncationUnsafe,
    InvalidParameter,
    UnsupportedRole,
    BoundaryViolation,
    NotStronglyUnimodal,
    NotApplicable,
    DivergentMoment,
    Parse,
};

std::string_view to_string(ErrorKind kind);

class SteinError : public std::runtime_error {
public:
    SteinError(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind)
    {
    }

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace steinb
