#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace utpada::text {

std::string_view trim(std::string_view s);
std::string to_lower(std::string_view s);

// Collapses every run of ASCII whitespace to one space and trims the ends.
std::string collapse_whitespace(std::string_view s);

std::vector<std::string> split(std::string_view s, char sep);
// Splits on `sep`, trims each piece and drops empty pieces.
std::vector<std::string> split_list(std::string_view s, char sep = ',');
std::vector<std::string> split_whitespace(std::string_view s);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

bool starts_with(std::string_view s, std::string_view prefix);
bool is_blank(std::string_view s);

std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t v);

// UTC wall clock in ISO-8601 with a trailing Z.
std::string now_iso8601();

// Throws Error{IoError} on failure.
std::string read_file(const std::filesystem::path& path);
// Writes via a temporary sibling and rename so readers never see a partial file.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace utpada::text
