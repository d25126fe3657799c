#include "langcheck/record_io.hpp"

#include <array>
#include <fstream>

#include <fmt/format.h>
#include <json.hpp>

#include "langcheck/errors.hpp"
#include "langcheck/text.hpp"

namespace langcheck::records {
namespace {

using ordered_json = nlohmann::ordered_json;

constexpr std::array<std::string_view, 7> kKeys{"id",       "source",   "text",  "gold",
                                                "document", "question", "answer"};

ordered_json optional_string(const std::optional<std::string>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

std::optional<std::string> read_optional(const ordered_json& j, std::string_view key) {
  const auto& v = j.at(std::string(key));
  if (v.is_null()) return std::nullopt;
  if (!v.is_string()) throw InputError(fmt::format("record field '{}' must be string or null", key));
  return v.get<std::string>();
}

std::string read_string(const ordered_json& j, std::string_view key) {
  const auto& v = j.at(std::string(key));
  if (!v.is_string()) throw InputError(fmt::format("record field '{}' must be a string", key));
  return v.get<std::string>();
}

}  // namespace

std::string to_line(const ClaimRecord& record) {
  ordered_json j;
  j["id"] = record.id;
  j["source"] = std::string(to_string(record.source));
  j["text"] = record.text;
  j["gold"] = record.gold ? ordered_json(std::string(to_string(*record.gold))) : ordered_json(nullptr);
  j["document"] = optional_string(record.document);
  j["question"] = optional_string(record.question);
  j["answer"] = optional_string(record.answer);
  try {
    return j.dump();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(fmt::format("record '{}' is not valid UTF-8: {}", record.id, e.what()));
  }
}

ClaimRecord from_line(std::string_view line) {
  ordered_json j;
  try {
    j = ordered_json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(fmt::format("malformed record line: {}", e.what()));
  }
  if (!j.is_object() || j.size() != kKeys.size()) {
    throw InputError("record must be an object with exactly 7 fields");
  }
  std::size_t i = 0;
  for (const auto& [key, value] : j.items()) {
    if (key != kKeys[i]) {
      throw InputError(fmt::format("record field {} must be '{}', found '{}'", i, kKeys[i], key));
    }
    ++i;
  }
  ClaimRecord r;
  r.id = read_string(j, "id");
  r.source = source_from_string(read_string(j, "source"));
  r.text = read_string(j, "text");
  if (auto gold = read_optional(j, "gold")) r.gold = label_from_string(*gold);
  r.document = read_optional(j, "document");
  r.question = read_optional(j, "question");
  r.answer = read_optional(j, "answer");
  r.validate();
  return r;
}

std::vector<ClaimRecord> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}'", path.string()));
  std::vector<ClaimRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    try {
      out.push_back(from_line(line));
    } catch (const InputError& e) {
      throw InputError(fmt::format("{}:{}: {}", path.string(), lineno, e.what()));
    }
  }
  return out;
}

void write_file(const std::filesystem::path& path, const std::vector<ClaimRecord>& records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot write '{}'", path.string()));
  for (const auto& r : records) out << to_line(r) << '\n';
  if (!out) throw IoError(fmt::format("write to '{}' failed", path.string()));
}

}  // namespace langcheck::records
