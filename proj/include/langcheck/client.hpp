#pragma once

#include <atomic>
#include <chrono>
#include <memory>
#include <mutex>
#include <optional>

#include "langcheck/cache.hpp"
#include "langcheck/provider.hpp"

namespace langcheck {

// Requests-per-minute ceiling shared by every worker. Acquisitions are
// spaced 60s/rpm apart; with rpm == 0 the limiter is a no-op.
class RateLimiter {
 public:
  explicit RateLimiter(double requests_per_minute);
  void acquire();

 private:
  using Clock = std::chrono::steady_clock;
  Clock::duration interval_{};
  std::mutex mu_;
  Clock::time_point next_slot_{};
};

struct RetryPolicy {
  int max_retries = 4;
  std::chrono::milliseconds initial_backoff{500};
  std::chrono::milliseconds max_backoff{30'000};
};

struct ClientOptions {
  RetryPolicy retry;
  double requests_per_minute = 0.0;
  std::optional<std::filesystem::path> cache_dir;
};

// Front door to a completion provider: cache lookup, rate limiting and retry
// with exponential backoff. Safe for concurrent use.
class CompletionClient {
 public:
  CompletionClient(CompletionProvider& provider, ClientOptions options = {});

  // Throws ProviderError carrying the last cause once retries are exhausted,
  // and AuthError immediately.
  CompletionResult complete(const CompletionRequest& request);

  // Calls that reached the provider (retries included).
  std::size_t provider_calls() const { return provider_calls_.load(); }
  std::size_t cache_hits() const { return cache_hits_.load(); }
  const std::string& provider_id() const { return provider_id_; }

 private:
  CompletionProvider& provider_;
  std::string provider_id_;
  ClientOptions options_;
  std::optional<DiskCache> cache_;
  RateLimiter limiter_;
  std::atomic<std::size_t> provider_calls_{0};
  std::atomic<std::size_t> cache_hits_{0};
};

}  // namespace langcheck
