#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "langcheck/types.hpp"

// Canonical line-delimited record format: one compact JSON object per line
// with the keys id, source, text, gold, document, question, answer in exactly
// that order. Absent optionals are written as null.
namespace langcheck::records {

std::string to_line(const ClaimRecord& record);

// Strict: rejects missing, unknown or reordered keys and records that fail
// ClaimRecord::validate(). Throws InputError.
ClaimRecord from_line(std::string_view line);

std::vector<ClaimRecord> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::vector<ClaimRecord>& records);

}  // namespace langcheck::records
