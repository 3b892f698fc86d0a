#pragma once

#include <string>
#include <string_view>

namespace hypsearch {

// Lowercase 64-hex SHA-256 digest of a byte string.
std::string sha256_hex(std::string_view bytes);

// Digest of a file's raw bytes. Throws Error(MissingFile) when the file
// cannot be opened.
std::string sha256_file(const std::string& path);

}  // namespace hypsearch
