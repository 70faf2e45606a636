#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gofperm {

enum class ErrorKind {
    RankDeficient,
    DegenerateSample,
    NonFinite,
    DegenerateVariance,
    IndexOutOfRange,
    InvalidArgument,
    TooLarge,
    NoTraces,
    InvalidParams,
    ParseError,
    MissingValue,
    UnknownColumn,
    IoError,
};

[[nodiscard]] std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries one of the ErrorKind tags so
/// callers (the CLI in particular) can report it in machine-readable form.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace gofperm
