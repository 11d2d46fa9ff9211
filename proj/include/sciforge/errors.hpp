#pragma once

#include <stdexcept>
#include <string>

namespace sciforge {

enum class Errc {
    // corpus loading
    MalformedLine,
    DuplicateId,
    UnknownSubject,
    EmptyInput,
    // gateway
    TransportError,
    NonRetryable,
    MockExhausted,
    // judging / annotation
    UnparseableLabel,
    MissingPrior,
    MissingReferenceAnswer,
    // quality filter
    DegenerateData,
    DimensionMismatch,
    ProviderError,
    // assembly / evaluation
    MissingSteps,
    EmptyProof,
    EmptyTask,
    // plumbing
    IoError,
    ConfigError,
    InvalidArgument,
};

const char* errc_name(Errc code);

/// Error carrier for the named failure variants of the pipeline modules.
/// `arg` holds the variant's numeric payload where one exists (line number,
/// HTTP status); -1 otherwise.
class Error : public std::runtime_error {
public:
    Error(Errc code, std::string message, long long arg = -1)
        : std::runtime_error(std::move(message)), code_(code), arg_(arg) {}

    Errc code() const noexcept { return code_; }
    long long arg() const noexcept { return arg_; }

    // Transport-family errors map to CLI exit code 2.
    bool is_transport() const noexcept {
        return code_ == Errc::TransportError || code_ == Errc::NonRetryable ||
               code_ == Errc::MockExhausted;
    }

private:
    Errc code_;
    long long arg_;
};

} // namespace sciforge
