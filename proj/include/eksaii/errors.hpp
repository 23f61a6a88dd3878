#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace eksaii {

// Stable error names. They appear verbatim in CLI diagnostics.
enum class Errc {
    LexError,
    ParseError,
    ValidationError,
    MissingFeature,
    UnknownAtom,
    WeightsNotFitted,
    EmptyDataset,
    EmptyNeighborhood,
    EmptyClass,
    NoClasses,
    UntrainedClassifier,
    EmptyPartition,
    DuplicateId,
    ExternalScoreMissing,
    SchemaMismatch,
    UnknownInstance,
    UnknownLabel,
    RareClassAbsent,
    PoolEmpty,
    LabelSetMismatch,
    VersionMismatch,
    FingerprintMismatch,
    TooFewSamples,
    InvalidConfig,
    UnlabeledData,
    IoError,
};

std::string_view errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    Errc code() const noexcept { return code_; }
    std::string_view name() const noexcept { return errc_name(code_); }

private:
    Errc code_;
};

struct SourcePosition {
    int line = 1;
    int column = 1;

    friend bool operator==(const SourcePosition&, const SourcePosition&) = default;
    friend auto operator<=>(const SourcePosition&, const SourcePosition&) = default;
};

class LexError : public Error {
public:
    LexError(SourcePosition pos, std::string offending);

    SourcePosition position() const noexcept { return pos_; }
    const std::string& offending() const noexcept { return offending_; }

private:
    SourcePosition pos_;
    std::string offending_;
};

class ParseError : public Error {
public:
    ParseError(SourcePosition pos, std::string expected, std::string found);

    SourcePosition position() const noexcept { return pos_; }
    // Human-readable alternatives, e.g. "')'" or "'prop' or 'rule'".
    const std::string& expected() const noexcept { return expected_; }

private:
    SourcePosition pos_;
    std::string expected_;
};

class ValidationError : public Error {
public:
    ValidationError(std::string name, std::string reason, SourcePosition pos = {});

    const std::string& subject() const noexcept { return name_; }
    const std::string& reason() const noexcept { return reason_; }
    SourcePosition position() const noexcept { return pos_; }

private:
    std::string name_;
    std::string reason_;
    SourcePosition pos_;
};

}  // namespace eksaii
