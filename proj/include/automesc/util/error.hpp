#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace automesc {

enum class ErrorCode {
    // core-model
    ParseError,
    DuplicateMapping,
    UnknownTool,
    DanglingCanonicalId,
    ThresholdMismatch,
    UnknownCanonicalId,
    // github-miner
    RateLimited,
    AuthFailure,
    NetworkError,
    CloneFailure,
    MissingBlob,
    MalformedHunkHeader,
    LineCountMismatch,
    // nvd-ingest
    ChecksumMismatch,
    SchemaMismatch,
    // tool-executor
    ImageMissing,
    FixtureMissing,
    UnparseableOutput,
    // pair-store
    IntegrityViolation,
    UnsupportedFormat,
    StoreError,
    // quality
    UnknownField,
    // cli
    AlreadyRunning,
    ConfigError,
    IoError,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace automesc
