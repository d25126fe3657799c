#include "langcheck/table.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "langcheck/errors.hpp"
#include "langcheck/text.hpp"

namespace langcheck::table {

std::vector<std::vector<std::string>> parse_delimited(std::string_view content, char delimiter) {
  if (content.substr(0, 3) == "\xEF\xBB\xBF") content.remove_prefix(3);
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool field_started = false;

  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_row = [&] {
    end_field();
    if (!(row.size() == 1 && row[0].empty())) rows.push_back(std::move(row));
    row.clear();
  };

  for (std::size_t i = 0; i < content.size(); ++i) {
    const char c = content[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < content.size() && content[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    if (c == '"' && !field_started) {
      quoted = true;
      field_started = true;
    } else if (c == delimiter) {
      end_field();
    } else if (c == '\n') {
      end_row();
    } else if (c == '\r') {
      if (i + 1 < content.size() && content[i + 1] == '\n') ++i;
      end_row();
    } else {
      field.push_back(c);
      field_started = true;
    }
  }
  if (quoted) throw IngestionError("unterminated quoted field");
  if (field_started || !field.empty() || !row.empty()) end_row();
  return rows;
}

bool Table::has_column(std::string_view name) const {
  return std::find(columns.begin(), columns.end(), name) != columns.end();
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestionError(fmt::format("cannot open '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Table read_table(const std::filesystem::path& path) {
  const std::string ext = text::ascii_lower(path.extension().string());
  const std::string content = read_text_file(path);
  Table table;

  if (ext == ".jsonl" || ext == ".json") {
    std::set<std::string> seen;
    std::size_t lineno = 0;
    for (std::string_view line : text::split_lines(content)) {
      ++lineno;
      if (text::trim(line).empty()) continue;
      nlohmann::json obj;
      try {
        obj = nlohmann::json::parse(line);
      } catch (const nlohmann::json::exception& e) {
        throw IngestionError(fmt::format("{}:{}: {}", path.string(), lineno, e.what()));
      }
      if (!obj.is_object()) {
        throw IngestionError(fmt::format("{}:{}: expected a JSON object", path.string(), lineno));
      }
      Row row;
      for (const auto& [key, value] : obj.items()) {
        if (seen.insert(key).second) table.columns.push_back(key);
        if (value.is_string()) {
          row[key] = value.get<std::string>();
        } else if (!value.is_null()) {
          row[key] = value.dump();
        }
      }
      table.rows.push_back(std::move(row));
    }
    return table;
  }

  char delimiter = ',';
  if (ext == ".tsv") {
    delimiter = '\t';
  } else if (ext != ".csv") {
    throw IngestionError(
        fmt::format("'{}': unsupported extension (expected .csv, .tsv or .jsonl)", path.string()));
  }
  auto rows = parse_delimited(content, delimiter);
  if (rows.empty()) return table;
  table.columns = rows.front();
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != table.columns.size()) {
      throw IngestionError(fmt::format("'{}' row {} has {} fields, header has {}", path.string(),
                                       r + 1, rows[r].size(), table.columns.size()));
    }
    Row row;
    for (std::size_t c = 0; c < table.columns.size(); ++c) row[table.columns[c]] = rows[r][c];
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace langcheck::table
