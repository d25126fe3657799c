#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace langcheck::table {

// RFC 4180 style: quoted fields may hold delimiters, doubled quotes and line
// breaks; CRLF and LF both end a record. A leading UTF-8 BOM is dropped.
std::vector<std::vector<std::string>> parse_delimited(std::string_view content, char delimiter);

using Row = std::map<std::string, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<Row> rows;

  bool has_column(std::string_view name) const;
};

// Picks the reader by extension: .csv, .tsv, .jsonl/.json (one object per
// line; non-string values are stored as their JSON text). The first row of a
// delimited file is the header. An unnamed first CSV column (pandas index)
// is kept under the name "".
Table read_table(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace langcheck::table
