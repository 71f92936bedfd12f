#include "pat/error.hpp"

namespace pat {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::Io: return "IoError";
    case ErrorKind::BadMagic: return "BadMagic";
    case ErrorKind::UnsupportedVersion: return "UnsupportedVersion";
    case ErrorKind::UnsupportedDtype: return "UnsupportedDtype";
    case ErrorKind::TruncatedHeader: return "TruncatedHeader";
    case ErrorKind::TruncatedPayload: return "TruncatedPayload";
    case ErrorKind::TrailingBytes: return "TrailingBytes";
    case ErrorKind::NonFiniteValue: return "NonFiniteValue";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::SchemaError: return "SchemaError";
    case ErrorKind::DuplicateLabel: return "DuplicateLabel";
    case ErrorKind::TruthOutOfRange: return "TruthOutOfRange";
    case ErrorKind::MissingEmbedding: return "MissingEmbedding";
    case ErrorKind::DuplicateId: return "DuplicateId";
    case ErrorKind::MissingLabelSlot: return "MissingLabelSlot";
    case ErrorKind::MultipleLabelSlots: return "MultipleLabelSlots";
    case ErrorKind::UnresolvedSlot: return "UnresolvedSlot";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NotNormalized: return "NotNormalized";
    case ErrorKind::TaskMismatch: return "TaskMismatch";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::NoPositives: return "NoPositives";
    case ErrorKind::MetricMismatch: return "MetricMismatch";
    case ErrorKind::DatasetMismatch: return "DatasetMismatch";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::DuplicatePair: return "DuplicatePair";
    }
    return "Unknown";
}

ErrorCategory category_of(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::InvalidArgument:
    case ErrorKind::DuplicatePair:
    case ErrorKind::MetricMismatch:
    case ErrorKind::DatasetMismatch:
        return ErrorCategory::Config;
    case ErrorKind::DimensionMismatch:
    case ErrorKind::NotNormalized:
    case ErrorKind::NoPositives:
    case ErrorKind::TaskMismatch:
    case ErrorKind::LengthMismatch:
        return ErrorCategory::Numeric;
    default:
        return ErrorCategory::Data;
    }
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind), detail_(message) {}

} // namespace pat
