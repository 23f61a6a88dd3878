#include "eksaii/errors.hpp"

namespace eksaii {

std::string_view errc_name(Errc code) noexcept
{
    switch (code) {
    case Errc::LexError: return "LexError";
    case Errc::ParseError: return "ParseError";
    case Errc::ValidationError: return "ValidationError";
    case Errc::MissingFeature: return "MissingFeature";
    case Errc::UnknownAtom: return "UnknownAtom";
    case Errc::WeightsNotFitted: return "WeightsNotFitted";
    case Errc::EmptyDataset: return "EmptyDataset";
    case Errc::EmptyNeighborhood: return "EmptyNeighborhood";
    case Errc::EmptyClass: return "EmptyClass";
    case Errc::NoClasses: return "NoClasses";
    case Errc::UntrainedClassifier: return "UntrainedClassifier";
    case Errc::EmptyPartition: return "EmptyPartition";
    case Errc::DuplicateId: return "DuplicateId";
    case Errc::ExternalScoreMissing: return "ExternalScoreMissing";
    case Errc::SchemaMismatch: return "SchemaMismatch";
    case Errc::UnknownInstance: return "UnknownInstance";
    case Errc::UnknownLabel: return "UnknownLabel";
    case Errc::RareClassAbsent: return "RareClassAbsent";
    case Errc::PoolEmpty: return "PoolEmpty";
    case Errc::LabelSetMismatch: return "LabelSetMismatch";
    case Errc::VersionMismatch: return "VersionMismatch";
    case Errc::FingerprintMismatch: return "FingerprintMismatch";
    case Errc::TooFewSamples: return "TooFewSamples";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::UnlabeledData: return "UnlabeledData";
    case Errc::IoError: return "IoError";
    }
    return "Unknown";
}

namespace {

std::string at(SourcePosition pos)
{
    return std::to_string(pos.line) + ":" + std::to_string(pos.column);
}

}  // namespace

LexError::LexError(SourcePosition pos, std::string offending)
    : Error(Errc::LexError, at(pos) + ": unexpected character '" + offending + "'"),
      pos_(pos),
      offending_(std::move(offending))
{
}

ParseError::ParseError(SourcePosition pos, std::string expected, std::string found)
    : Error(Errc::ParseError, at(pos) + ": expected " + expected + ", found " + found),
      pos_(pos),
      expected_(std::move(expected))
{
}

ValidationError::ValidationError(std::string name, std::string reason, SourcePosition pos)
    : Error(Errc::ValidationError, at(pos) + ": '" + name + "': " + reason),
      name_(std::move(name)),
      reason_(std::move(reason)),
      pos_(pos)
{
}

}  // namespace eksaii
