#include "langcheck/cache.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>
#include <openssl/evp.h>

#include "langcheck/errors.hpp"
#include "langcheck/text.hpp"

namespace langcheck {
namespace fs = std::filesystem;
namespace {

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new()) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_, EVP_sha256(), nullptr) != 1) {
      throw Error("SHA-256 initialisation failed");
    }
  }
  ~Sha256() { EVP_MD_CTX_free(ctx_); }
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;

  void field(std::string_view bytes) {
    const std::string len = fmt::format("{}:", bytes.size());
    EVP_DigestUpdate(ctx_, len.data(), len.size());
    EVP_DigestUpdate(ctx_, bytes.data(), bytes.size());
  }

  std::string hex() {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int n = 0;
    EVP_DigestFinal_ex(ctx_, digest, &n);
    std::string out;
    out.reserve(n * 2);
    for (unsigned int i = 0; i < n; ++i) out += fmt::format("{:02x}", digest[i]);
    return out;
  }

 private:
  EVP_MD_CTX* ctx_;
};

std::string read_all(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::atomic<unsigned long> g_tmp_counter{0};

}  // namespace

std::string cache_key(std::string_view provider_id, const CompletionRequest& request) {
  Sha256 h;
  h.field(provider_id);
  h.field(request.prompt);
  h.field(fmt::format("{:.17g}", request.temperature));
  h.field(fmt::format("{}", request.stop.size()));
  for (const auto& s : request.stop) h.field(s);
  return h.hex();
}

bool is_cache_key(std::string_view name) {
  return name.size() == 64 && std::all_of(name.begin(), name.end(), [](char c) {
           return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
         });
}

DiskCache::DiskCache(fs::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec || !fs::is_directory(dir_)) {
    throw IoError(fmt::format("cannot create cache directory '{}': {}", dir_.string(), ec.message()));
  }
}

std::optional<std::string> DiskCache::get(std::string_view key) const {
  if (!is_cache_key(key)) return std::nullopt;
  const fs::path path = dir_ / std::string(key);
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void DiskCache::put(std::string_view key, std::string_view text) const {
  if (!is_cache_key(key)) throw InputError(fmt::format("'{}' is not a cache key", key));
  const auto tid = std::hash<std::thread::id>{}(std::this_thread::get_id());
  const fs::path tmp =
      dir_ / fmt::format(".{}.{}.{}.tmp", key, tid, g_tmp_counter.fetch_add(1));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(fmt::format("cannot write cache entry in '{}'", dir_.string()));
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw IoError(fmt::format("cache write to '{}' failed", tmp.string()));
  }
  std::error_code ec;
  fs::rename(tmp, dir_ / std::string(key), ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError(fmt::format("cannot commit cache entry {}", key));
  }
}

std::size_t DiskCache::size() const {
  std::size_t n = 0;
  for (const auto& entry : fs::directory_iterator(dir_)) {
    if (entry.is_regular_file() && is_cache_key(entry.path().filename().string())) ++n;
  }
  return n;
}

std::size_t DiskCache::clear() const {
  std::vector<fs::path> victims;
  for (const auto& entry : fs::directory_iterator(dir_)) {
    if (entry.is_regular_file() && is_cache_key(entry.path().filename().string())) {
      victims.push_back(entry.path());
    }
  }
  for (const auto& p : victims) {
    std::error_code ec;
    if (!fs::remove(p, ec) || ec) throw IoError(fmt::format("cannot remove '{}'", p.string()));
  }
  return victims.size();
}

std::size_t DiskCache::export_to(const fs::path& archive) const {
  std::vector<std::string> keys;
  for (const auto& entry : fs::directory_iterator(dir_)) {
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && is_cache_key(name)) keys.push_back(name);
  }
  std::sort(keys.begin(), keys.end());
  std::ofstream out(archive, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot write archive '{}'", archive.string()));
  for (const auto& key : keys) {
    nlohmann::ordered_json line;
    line["key"] = key;
    line["text"] = read_all(dir_ / key);
    out << line.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) << '\n';
  }
  if (!out) throw IoError(fmt::format("write to '{}' failed", archive.string()));
  return keys.size();
}

std::size_t DiskCache::import_from(const fs::path& archive) const {
  std::ifstream in(archive, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open archive '{}'", archive.string()));
  std::size_t n = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (text::trim(line).empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      put(j.at("key").get<std::string>(), j.at("text").get<std::string>());
    } catch (const nlohmann::json::exception& e) {
      throw DataError(fmt::format("malformed archive line {}: {}", n + 1, e.what()));
    }
    ++n;
  }
  return n;
}

}  // namespace langcheck
