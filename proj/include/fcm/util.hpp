#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fcm {

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

/// Strict full-string parse of a decimal number; nullopt on any junk.
std::optional<double> parse_double(std::string_view text);

std::string trim(std::string_view text);
std::vector<std::string> split(std::string_view text, char sep);

std::string read_text_file(const std::filesystem::path& path);

/// Write via a sibling temporary file and rename, so readers never observe a
/// partially written file.
void write_text_file_atomic(const std::filesystem::path& path, std::string_view content);

/// 64-bit FNV-1a, used for stable content-derived identifiers.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t value);

}  // namespace fcm
