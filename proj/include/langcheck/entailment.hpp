#pragma once

#include <atomic>
#include <chrono>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "langcheck/prompting.hpp"
#include "langcheck/types.hpp"

namespace langcheck {

// Hypothesis/premise pair sent to an NLI scorer.
struct EntailmentRequest {
  std::string premise;
  std::string hypothesis;

  friend bool operator==(const EntailmentRequest&, const EntailmentRequest&) = default;
};

// Splits a supposition at " is_entailed_by ": the left side is the
// hypothesis, the right side the premise. Throws InputError when the token is
// missing.
EntailmentRequest split_supposition(std::string_view supposition);

class EntailmentProvider {
 public:
  virtual ~EntailmentProvider() = default;
  virtual std::string id() const = 0;
  // Must be safe to call concurrently.
  virtual EntailmentScores score(const EntailmentRequest& request) = 0;
};

// entail > contradict is Unacceptable; everything else, ties included, is
// Acceptable. Neutral never participates. Throws InputError on an invalid
// triple.
Verdict decide(const EntailmentScores& scores);

struct EntailmentOutcome {
  Verdict verdict;
  SuppositionText supposition;
  EntailmentScores scores;
};

// Builds the supposition for `grounding` (falling back to `claim` when the
// summary is missing), scores it and applies decide().
EntailmentOutcome check_with_entailment(const GroundingResult& grounding, std::string_view claim,
                                        EntailmentProvider& provider);

// Returns scripted triples. Rules are tried in order; a rule matches when its
// needle occurs in the premise. Without a match the default is used, or a
// ProviderError is thrown when there is none.
class ScriptedEntailmentProvider : public EntailmentProvider {
 public:
  struct Rule {
    std::string premise_contains;
    EntailmentScores scores;
  };

  explicit ScriptedEntailmentProvider(std::vector<Rule> rules,
                                      std::optional<EntailmentScores> fallback = std::nullopt);

  std::string id() const override { return "mock"; }
  EntailmentScores score(const EntailmentRequest& request) override;

  std::size_t calls() const { return calls_.load(); }
  std::vector<EntailmentRequest> requests() const;

 private:
  std::vector<Rule> rules_;
  std::optional<EntailmentScores> fallback_;
  std::atomic<std::size_t> calls_{0};
  mutable std::mutex mu_;
  std::vector<EntailmentRequest> requests_;
};

struct SidecarHealth {
  std::string status;
  std::string model_id;
};

// Client for the local NLI sidecar: POST /entail with {"premise",
// "hypothesis"} returning {"entail","neutral","contradict"}, and GET /health
// returning {"status","model_id"}. Response bodies with missing or unknown
// fields are rejected.
class SidecarEntailmentProvider : public EntailmentProvider {
 public:
  // base_url like "http://127.0.0.1:8765".
  explicit SidecarEntailmentProvider(std::string base_url,
                                     std::chrono::milliseconds timeout = std::chrono::seconds(30));

  std::string id() const override { return "sidecar:" + base_url_; }
  EntailmentScores score(const EntailmentRequest& request) override;
  SidecarHealth health();

 private:
  std::string base_url_;
  std::chrono::milliseconds timeout_;
};

}  // namespace langcheck
