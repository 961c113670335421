#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace mrgp::csvio {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// Plain comma separation; our fields never contain commas or quotes.
Table parse(const std::string& text);
Table read_file(const std::filesystem::path& path);
std::string to_text(const Table& table);

// Write to <path>.tmp then rename, so readers never observe partial files.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace mrgp::csvio
