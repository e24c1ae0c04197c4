#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace biq {

/// Throws ErrorKind::kIo when the file cannot be read.
std::string ReadFile(const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it over `path`.
void WriteFileAtomic(const std::filesystem::path& path, std::string_view content);

/// Splits on '\n', dropping a trailing '\r' from each line. A final empty
/// line after the last newline is not returned.
std::vector<std::string_view> SplitLines(std::string_view content);

/// Lowercase hex SHA-256 of `data`.
std::string Sha256Hex(std::string_view data);

}  // namespace biq
