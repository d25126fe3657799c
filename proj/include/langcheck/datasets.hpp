#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "langcheck/types.hpp"

namespace langcheck::datasets {

struct ClassCounts {
  std::size_t acceptable = 0;
  std::size_t unacceptable = 0;
  std::size_t total() const { return acceptable + unacceptable; }
  friend bool operator==(const ClassCounts&, const ClassCounts&) = default;
};

// Published per-class counts of each evaluation split.
ClassCounts reference_counts(Source source);
// Whether a loader aborts when its counts differ from reference_counts().
// SBIC is reported only: its published total and class counts disagree.
bool counts_enforced(Source source);

// Toxicity scores strictly above this are toxic (Unacceptable).
inline constexpr double kDefaultToxigenThreshold = 2.5;

struct LoadOptions {
  // Compare against reference_counts() where enforced. Disable for partial
  // files.
  bool check_counts = true;
  double toxigen_threshold = kDefaultToxigenThreshold;
};

struct Dataset {
  Source source = Source::Climate;
  std::vector<ClaimRecord> records;
  ClassCounts counts;
  // Rows dropped by the label filter (disputed, mixed, ...).
  std::size_t excluded = 0;
};

// Hate speech forum corpus. `path` is either the corpus directory
// (annotations_metadata.csv + sampled_test/*.txt) or a .csv/.tsv/.jsonl
// table with text and label columns. hate -> Unacceptable, noHate ->
// Acceptable.
Dataset load_hsd(const std::filesystem::path& path, const LoadOptions& options = {});

// Social bias frames test file (raw per-annotation or aggregated). Rows are
// grouped by post; Unacceptable iff any sexYN or offensiveYN score is > 0.
Dataset load_sbic(const std::filesystem::path& path, const LoadOptions& options = {});

// Climate claims; SUPPORTS -> Acceptable, REFUTES -> Unacceptable,
// DISPUTED and NOT_ENOUGH_INFO dropped.
Dataset load_climate(const std::filesystem::path& path, const LoadOptions& options = {});

// Public health claims; true -> Acceptable, false -> Unacceptable, mixture
// and unproven dropped.
Dataset load_health(const std::filesystem::path& path, const LoadOptions& options = {});

// Annotated test split; Unacceptable iff toxicity_human > threshold. On a
// count mismatch the error lists thresholds that would reproduce the
// reference split.
Dataset load_toxigen(const std::filesystem::path& path, const LoadOptions& options = {});

// QA extension of the machine-generated news benchmark: article, question,
// machine answer, fake/real label. Record text is "{question} Answer:
// {answer}".
Dataset load_mgfn(const std::filesystem::path& path, const LoadOptions& options = {});

Dataset load(Source source, const std::filesystem::path& path, const LoadOptions& options = {});

// Deterministic label-stratified subsample of `n` records (all of them when
// n >= size), returned in input order.
std::vector<ClaimRecord> stratified_sample(const std::vector<ClaimRecord>& records, std::size_t n,
                                           std::uint64_t seed);

std::string make_id(Source source, std::size_t ordinal);

}  // namespace langcheck::datasets
