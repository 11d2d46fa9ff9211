#include "sciforge/errors.hpp"

namespace sciforge {

const char* errc_name(Errc code) {
    switch (code) {
    case Errc::MalformedLine: return "MalformedLine";
    case Errc::DuplicateId: return "DuplicateId";
    case Errc::UnknownSubject: return "UnknownSubject";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::TransportError: return "TransportError";
    case Errc::NonRetryable: return "NonRetryable";
    case Errc::MockExhausted: return "MockExhausted";
    case Errc::UnparseableLabel: return "UnparseableLabel";
    case Errc::MissingPrior: return "MissingPrior";
    case Errc::MissingReferenceAnswer: return "MissingReferenceAnswer";
    case Errc::DegenerateData: return "DegenerateData";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::ProviderError: return "ProviderError";
    case Errc::MissingSteps: return "MissingSteps";
    case Errc::EmptyProof: return "EmptyProof";
    case Errc::EmptyTask: return "EmptyTask";
    case Errc::IoError: return "IoError";
    case Errc::ConfigError: return "ConfigError";
    case Errc::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

} // namespace sciforge
