#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "langcheck/entailment.hpp"

namespace langcheck {

struct CompletionRequest {
  static constexpr double kDefaultTemperature = 0.1;

  std::string prompt;
  double temperature = kDefaultTemperature;
  int max_samples = 1;
  std::vector<std::string> stop;
};

struct CompletionResult {
  std::string text;
  std::string provider;
  bool cached = false;
  std::int64_t latency_ms = 0;
};

// A backend that turns one prompt into one completion. Implementations must
// be safe to call concurrently. Throw TransientProviderError for failures
// worth retrying, AuthError for rejected credentials, ProviderError
// otherwise.
class CompletionProvider {
 public:
  virtual ~CompletionProvider() = default;
  virtual std::string id() const = 0;
  virtual std::string complete(const CompletionRequest& request) = 0;
};

// Exact prompt -> completion map.
class ScriptedProvider : public CompletionProvider {
 public:
  explicit ScriptedProvider(std::map<std::string, std::string> script, std::string id = "mock");

  std::string id() const override { return id_; }
  std::string complete(const CompletionRequest& request) override;
  std::size_t calls() const { return calls_.load(); }

 private:
  std::map<std::string, std::string> script_;
  std::string id_;
  std::atomic<std::size_t> calls_{0};
};

// Rule-driven mock used for fixture runs. A prompt is classified by its
// closing cue into one of the kinds
//   zero     "...Question: Is it fair to say that?" with no fact line
//   verdict  "...Question: Is it fair to say that?" with a fact line
//   fact     "...The claim mentions that"
//   question "...Question:"
//   answer   "...Answer:"
// and only its last block (after the final blank line) is searched for each
// rule's needle. The first rule of the right kind whose needle occurs wins.
// A rule may be scripted to fail instead of answering.
//
// Script file (JSON):
//   {"completions": [{"kind": "...", "contains": "...", "text": "..."}
//                    | {"kind": "...", "contains": "...", "fail": "message"}],
//    "entailment":  [{"contains": "...", "scores": [e, n, c]}]}
class FixtureProvider : public CompletionProvider {
 public:
  struct Rule {
    std::string kind;
    std::string contains;
    std::string text;
    std::optional<std::string> fail;
  };

  explicit FixtureProvider(std::vector<Rule> rules);
  static std::unique_ptr<FixtureProvider> from_file(const std::filesystem::path& script);

  std::string id() const override { return "mock"; }
  std::string complete(const CompletionRequest& request) override;
  std::size_t calls() const { return calls_.load(); }

  static std::string classify(std::string_view prompt);

 private:
  std::vector<Rule> rules_;
  std::atomic<std::size_t> calls_{0};
};

// Entailment rules from the same script file.
std::unique_ptr<ScriptedEntailmentProvider> entailment_from_script(
    const std::filesystem::path& script);

struct OpenAiConfig {
  // Scheme, host and optional path prefix, e.g. "https://api.openai.com/v1".
  std::string base_url = "https://api.openai.com/v1";
  std::string api_key;
  std::string model = "gpt-3.5-turbo";
  int timeout_seconds = 60;
};

// Chat-completions endpoint of an OpenAI-compatible server. Each prompt is
// sent as a single user message.
class OpenAiProvider : public CompletionProvider {
 public:
  explicit OpenAiProvider(OpenAiConfig config);

  std::string id() const override { return "openai:" + config_.model; }
  std::string complete(const CompletionRequest& request) override;

 private:
  OpenAiConfig config_;
  std::string origin_;
  std::string path_prefix_;
};

}  // namespace langcheck
