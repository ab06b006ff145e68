#pragma once

#include <stdexcept>
#include <string>

namespace obfscore {

/// Base class for all recoverable errors raised by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// --- bytecode ---
struct MalformedHex : Error { using Error::Error; };
struct EmptyBytecode : Error { using Error::Error; };

// --- model ---
struct ShapeError : Error { using Error::Error; };
struct VocabError : Error { using Error::Error; };
struct EmptyContract : Error { using Error::Error; };
struct NumericError : Error { using Error::Error; };

// --- statistics ---
struct CorrelationUndefined : Error { using Error::Error; };
struct EmptyInput : Error { using Error::Error; };
struct EmptyTail : Error { using Error::Error; };
struct EmptySet : Error { using Error::Error; };

// --- pipeline ---
struct UnknownChain : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };
struct AbortThresholdExceeded : Error { using Error::Error; };

/// A pipeline stage was invoked before the stage it depends on.
struct StageDependencyError : Error {
    explicit StageDependencyError(std::string missing)
        : Error("missing artifact from stage: " + missing), missing_stage(std::move(missing)) {}
    std::string missing_stage;
};

}  // namespace obfscore
