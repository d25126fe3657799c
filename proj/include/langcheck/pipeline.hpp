#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "langcheck/client.hpp"
#include "langcheck/entailment.hpp"
#include "langcheck/errors.hpp"
#include "langcheck/prompting.hpp"
#include "langcheck/types.hpp"

namespace langcheck {

enum class Strategy {
  ZeroCls,
  FewFpZeroCls,
  FewFpFewCls,
  FewFpEntailZeroCls,
  FewFpEntailFewCls,
  MgfnChain,
};

// CLI spellings: zero, fewfp-zero, fewfp-few, fewfp-entail-zero,
// fewfp-entail-few, mgfn.
std::string_view to_string(Strategy strategy);
Strategy strategy_from_string(std::string_view name);
bool uses_entailment(Strategy strategy);

enum class GroundedClassifier { ZeroCls, FewCls, Entailment };

struct CheckResult {
  std::string claim_id;
  Strategy strategy = Strategy::ZeroCls;
  ExemplarMode exemplar_mode = ExemplarMode::NotApplicable;
  std::optional<GroundingResult> grounding;
  Verdict verdict{DecisionPath::GenerativeNonAnswer, ""};
  int provider_calls = 0;
  int entailment_calls = 0;
  bool degraded = false;
  // Set on the entailment path.
  std::optional<std::string> supposition;
  bool summary_from_claim = false;
  // Raw completions in call order, for audit.
  std::vector<std::string> completions;
};

// Raised for a single claim; names the claim and, for the chain, the step.
class ClaimError : public Error {
 public:
  ClaimError(std::string claim_id, std::string message)
      : Error(std::move(message)), claim_id_(std::move(claim_id)) {}
  const std::string& claim_id() const { return claim_id_; }

 private:
  std::string claim_id_;
};

struct PipelineConfig {
  double temperature = CompletionRequest::kDefaultTemperature;
  std::vector<std::string> stop;
};

class Checker {
 public:
  // `entailment` may be null when no entailment strategy is run.
  Checker(CompletionClient& client, EntailmentProvider* entailment, PipelineConfig config = {});

  CheckResult run_zero_cls(const ClaimRecord& claim);
  CheckResult run_few_fp(const ClaimRecord& claim, ExemplarMode mode,
                         GroundedClassifier classifier);
  CheckResult run_mgfn(const ClaimRecord& record, ExemplarMode mode);

  // Dispatches on strategy. FewFpEntailZeroCls and FewFpEntailFewCls both
  // classify with the entailment provider.
  CheckResult run(const ClaimRecord& claim, Strategy strategy, ExemplarMode mode);

 private:
  CompletionResult call(const PromptText& prompt);

  CompletionClient& client_;
  EntailmentProvider* entailment_;
  PipelineConfig config_;
};

struct BatchEntry {
  std::string claim_id;
  std::optional<CheckResult> result;
  std::optional<std::string> error;
};

struct BatchOutcome {
  std::vector<BatchEntry> entries;  // input order
  std::size_t succeeded = 0;
  std::size_t failed = 0;
  std::size_t degraded = 0;
};

// Runs `strategy` over `records` on at most `parallelism` worker threads.
// Per-claim failures are collected; throws only when every claim failed.
BatchOutcome run_batch(Checker& checker, const std::vector<ClaimRecord>& records,
                       Strategy strategy, ExemplarMode mode, std::size_t parallelism);

// Result file: one JSON object per line, successes and failures alike.
std::string result_to_line(const BatchEntry& entry, Strategy strategy, ExemplarMode mode);
BatchEntry result_from_line(std::string_view line);
void write_results(const std::filesystem::path& path, const BatchOutcome& outcome,
                   Strategy strategy, ExemplarMode mode);
std::vector<BatchEntry> read_results(const std::filesystem::path& path);

}  // namespace langcheck
