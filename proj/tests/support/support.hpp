#pragma once

#include <filesystem>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "langcheck/pipeline.hpp"
#include "langcheck/types.hpp"

namespace langcheck::testing {

std::filesystem::path fixture_dir();
std::string slurp(const std::filesystem::path& path);
void spit(const std::filesystem::path& path, std::string_view body);

// Set LANGCHECK_UPDATE_GOLDEN=1 to rewrite golden files instead of comparing.
bool updating_golden();

class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(std::string_view name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

// Golden prompts: every prompt strategy under each exemplar mode it accepts,
// plus the two supposition shapes.
struct GoldenCase {
  std::string name;
  std::string text;
};
std::vector<GoldenCase> golden_prompt_cases();
// Compares (or rewrites) tests/fixtures/prompts. Returns one message per
// mismatch.
std::vector<std::string> check_golden_prompts();

// Completion corpus: NNN.txt next to NNN.expected.json.
struct CorpusItem {
  std::string name;
  std::string completion;
  std::string parser;  // "fact_prediction" or "yes_no"
  std::string expected_json;
};
std::vector<CorpusItem> load_parser_corpus();
// Empty when the parse agrees with the expectation.
std::optional<std::string> corpus_disagreement(const CorpusItem& item);

// Generative-path property: random completions built from fragments near the
// explicit-no grammar; only those whose leading word is "no" may come out
// Unacceptable.
struct ExplicitNoReport {
  std::size_t samples = 0;
  std::size_t explicit_no = 0;
  std::size_t violations = 0;
  std::string first_violation;
};
ExplicitNoReport check_explicit_no_property(std::size_t n, std::uint64_t seed);

// Independent scoring oracle: fills a 2x2 table by brute force and derives
// the rates from it.
struct OracleScores {
  std::size_t table[2][2] = {{0, 0}, {0, 0}};  // [predicted positive][gold positive]
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};
OracleScores oracle_scores(std::span<const Label> preds, std::span<const Label> gold,
                           Label positive);
std::vector<Label> random_labels(std::mt19937_64& rng, std::size_t n);

// A random valid three-way score triple.
EntailmentScores random_triple(std::mt19937_64& rng);

// Decision-rule properties over `n` random triples. Each field counts the
// triples that violated the property.
struct EntailmentPropertyReport {
  std::size_t triples = 0;
  std::size_t ties = 0;
  std::size_t argmax_pair = 0;
  std::size_t monotonic = 0;
  std::size_t neutral_independent = 0;
  std::size_t tie_acceptable = 0;
  std::size_t oracle = 0;
  bool ok() const { return argmax_pair + monotonic + neutral_independent + tie_acceptable + oracle == 0; }
};
EntailmentPropertyReport check_entailment_properties(std::size_t n, std::uint64_t seed);

// End-to-end fixture run: every strategy over tests/fixtures/e2e with the
// scripted mock, writing <strategy>.results.jsonl and <strategy>.report.json
// into `out_dir`.
struct E2eRun {
  std::size_t provider_calls = 0;
  std::size_t cache_hits = 0;
  std::size_t entailment_calls = 0;
  std::vector<std::string> files;  // names written, in strategy order
};
E2eRun run_e2e(const std::filesystem::path& out_dir, std::size_t parallelism,
               const std::optional<std::filesystem::path>& cache_dir);
inline constexpr Strategy kAllStrategies[] = {
    Strategy::ZeroCls,         Strategy::FewFpZeroCls,      Strategy::FewFpFewCls,
    Strategy::FewFpEntailZeroCls, Strategy::FewFpEntailFewCls, Strategy::MgfnChain,
};

}  // namespace langcheck::testing
