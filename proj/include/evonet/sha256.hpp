#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

namespace evonet {

// Hex digest of the given bytes.
std::string sha256_hex(const void* data, std::size_t len);
std::string sha256_hex(const std::string& data);

// Content hash of a file, reported as "sha256:<hex>".
std::string sha256_file(const std::filesystem::path& path);

}  // namespace evonet
