#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pat {

enum class ErrorKind {
    // I/O and tensor files
    Io,
    BadMagic,
    UnsupportedVersion,
    UnsupportedDtype,
    TruncatedHeader,
    TruncatedPayload,
    TrailingBytes,
    NonFiniteValue,
    ShapeMismatch,
    // manifests
    SchemaError,
    DuplicateLabel,
    TruthOutOfRange,
    MissingEmbedding,
    // datastore
    DuplicateId,
    MissingLabelSlot,
    MultipleLabelSlots,
    UnresolvedSlot,
    // numerics
    DimensionMismatch,
    NotNormalized,
    // evaluation
    TaskMismatch,
    LengthMismatch,
    NoPositives,
    MetricMismatch,
    DatasetMismatch,
    // configuration
    InvalidArgument,
    DuplicatePair,
};

/// Broad failure class. The CLI maps these onto process exit codes.
enum class ErrorCategory { Config, Data, Numeric };

std::string_view to_string(ErrorKind kind);
ErrorCategory category_of(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message);

    ErrorKind kind() const noexcept { return kind_; }
    ErrorCategory category() const noexcept { return category_of(kind_); }
    /// The message without the kind prefix.
    const std::string& detail() const noexcept { return detail_; }

private:
    ErrorKind kind_;
    std::string detail_;
};

} // namespace pat
