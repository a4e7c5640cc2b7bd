#pragma once

#include <string>

namespace rotsys {

// Lowercase hex SHA-256 of a byte string.
std::string sha256_hex(const std::string& data);

// Digest of a file's contents, streamed.
std::string sha256_file(const std::string& path);

}  // namespace rotsys
