#include "langcheck/client.hpp"

#include <algorithm>
#include <thread>

#include <fmt/format.h>

#include "langcheck/errors.hpp"

namespace langcheck {

RateLimiter::RateLimiter(double requests_per_minute) {
  if (requests_per_minute > 0.0) {
    interval_ = std::chrono::duration_cast<Clock::duration>(
        std::chrono::duration<double>(60.0 / requests_per_minute));
  }
}

void RateLimiter::acquire() {
  if (interval_ == Clock::duration::zero()) return;
  Clock::time_point slot;
  {
    std::lock_guard lock(mu_);
    slot = std::max(Clock::now(), next_slot_);
    next_slot_ = slot + interval_;
  }
  std::this_thread::sleep_until(slot);
}

CompletionClient::CompletionClient(CompletionProvider& provider, ClientOptions options)
    : provider_(provider),
      provider_id_(provider.id()),
      options_(std::move(options)),
      limiter_(options_.requests_per_minute) {
  if (options_.cache_dir) cache_.emplace(*options_.cache_dir);
}

CompletionResult CompletionClient::complete(const CompletionRequest& request) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  auto elapsed_ms = [&] {
    return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start).count();
  };

  std::string key;
  if (cache_) {
    key = cache_key(provider_id_, request);
    if (auto hit = cache_->get(key)) {
      ++cache_hits_;
      return {std::move(*hit), provider_id_, true, elapsed_ms()};
    }
  }

  auto backoff = options_.retry.initial_backoff;
  for (int attempt = 0;; ++attempt) {
    limiter_.acquire();
    ++provider_calls_;
    try {
      std::string text = provider_.complete(request);
      if (cache_) cache_->put(key, text);
      return {std::move(text), provider_id_, false, elapsed_ms()};
    } catch (const TransientProviderError& e) {
      if (attempt >= options_.retry.max_retries) {
        throw ProviderError(
            fmt::format("gave up after {} attempts: {}", attempt + 1, e.what()));
      }
    }
    std::this_thread::sleep_for(backoff);
    backoff = std::min(backoff * 2, options_.retry.max_backoff);
  }
}

}  // namespace langcheck
