#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "langcheck/provider.hpp"

namespace langcheck {

// Hex SHA-256 over (provider id, prompt, temperature, stop list). Fields are
// length-prefixed so no two distinct requests share an encoding.
std::string cache_key(std::string_view provider_id, const CompletionRequest& request);

bool is_cache_key(std::string_view name);

// One file per key inside `dir`, named by the key and holding the raw
// completion text. Writes go through a temporary file and a rename, so a
// reader never observes a partial entry.
class DiskCache {
 public:
  // Creates `dir` when missing. Throws IoError when that fails.
  explicit DiskCache(std::filesystem::path dir);

  std::optional<std::string> get(std::string_view key) const;
  void put(std::string_view key, std::string_view text) const;

  std::size_t size() const;
  std::size_t clear() const;

  // Archive: one JSON object per line, {"key": ..., "text": ...}, sorted by
  // key. Returns the number of entries written or imported.
  std::size_t export_to(const std::filesystem::path& archive) const;
  std::size_t import_from(const std::filesystem::path& archive) const;

  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
};

}  // namespace langcheck
