#pragma once

#include <stdexcept>
#include <string>

namespace rotsys {

// Exception taxonomy mirrored by the C API status codes.
struct DomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CorruptSeedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidCertificateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Certificate arithmetic succeeded but the recomputed bound exceeds the claim;
// carries the witness catalog entry.
struct VerifyFailedError : std::runtime_error {
    std::string witness;
    VerifyFailedError(const std::string& msg, std::string witness_line)
        : std::runtime_error(msg), witness(std::move(witness_line)) {}
};

}  // namespace rotsys
