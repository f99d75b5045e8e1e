#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace fastlight::cli {

using Cell = std::variant<double, std::int64_t, std::string>;

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;
};

/// RFC 4180 text with '\n' line endings, header first, numbers in shortest
/// round-trip form. Throws InvalidParameter for ragged rows.
std::string to_csv(const Table& table);

/// Writes to a sibling temporary and renames over `path`. Throws Error(Io).
void write_csv(const Table& table, const std::filesystem::path& path);

/// Writes `content` atomically, same contract as write_csv.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// Parses RFC 4180 text; every cell comes back as a string.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

std::string read_file(const std::filesystem::path& path);

}  // namespace fastlight::cli
