#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace journey {

enum class ErrorCode {
    InvalidArgument,
    MalformedRow,
    EmptyDataset,
    MissingOutcome,
    DegenerateConfig,
    InvalidK,
    InvalidAssignment,
    TooFewPoints,
    NoConvergence,
    EmptyModel,
    SingleClassDataset,
    NoCandidates,
    NotFound,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries a stable code so the CLI and
/// the HTTP layer can map it to exit statuses and response codes.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace journey
