#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hfm {

enum class ErrorCode {
    IndexOutOfRange,
    Overflow,
    ScaleMismatch,
    GridTooCoarse,
    InvalidS,
    TooLarge,
    InvalidEta,
    InvalidEps,
    InvalidInput,
    StageTooLarge,
    DegenerateFit,
    NoBracket,
};

std::string_view to_string(ErrorCode code);

// Single exception type for the library; callers branch on code().
class MeasureError : public std::runtime_error {
public:
    MeasureError(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace hfm
