#pragma once

#include <stdexcept>
#include <string>

namespace fsat {

// Error taxonomy shared by the library and the CLI exit-code mapping:
// IoError -> 1, NumericError -> 3, everything else -> 2.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Filesystem-level failures (unwritable path, short write, ...).
struct IoError : Error {
    using Error::Error;
};

// Structurally broken input file (truncated RIFF, bad manifest line, ...).
struct FormatError : Error {
    using Error::Error;
};

// File parsed but uses an unsupported encoding.
struct DecodeError : Error {
    using Error::Error;
};

// Argument outside its documented domain.
struct DomainError : Error {
    using Error::Error;
};

// Shape or length mismatch between buffers.
struct SizeError : Error {
    using Error::Error;
};

// Invalid configuration (failed validation, non-COLA STFT setup, ...).
struct ConfigError : Error {
    using Error::Error;
};

// Non-finite value where the pipeline requires finite arithmetic.
struct NumericError : Error {
    using Error::Error;
};

// API misuse detected at runtime (stale trace, revision mismatch).
struct ContractError : Error {
    using Error::Error;
};

}  // namespace fsat
