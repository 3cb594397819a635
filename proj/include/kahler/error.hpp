#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace kahler {

enum class ErrorCode {
    NonFiniteIntegrand,
    NoBracket,
    NoConvergence,
    RankDeficient,
    NonFiniteCurvature,
    NotAdmissible,
    OutOfDomain,
    SearchFailed,
    BadDirection,
    WeightSignError,
    NotTraceless,
    InvalidConfig,
};

std::string_view to_string(ErrorCode code);

/// Single exception type for the library; the code says what went wrong.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace kahler
