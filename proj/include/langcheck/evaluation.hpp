#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "langcheck/pipeline.hpp"
#include "langcheck/types.hpp"

namespace langcheck::eval {

struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;
  Label positive = Label::Unacceptable;

  std::size_t total() const { return tp + fp + fn + tn; }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

// All rates are percentages in [0, 100], unrounded.
struct BinaryScores {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  ConfusionCounts counts;
};

ConfusionCounts confusion(std::span<const Label> preds, std::span<const Label> gold,
                          Label positive);

// Precision, recall and F1 are 0 when their denominators are. Throws
// InputError on a length mismatch or empty input.
BinaryScores score(std::span<const Label> preds, std::span<const Label> gold, Label positive);

double macro_f1(double f1_positive, double f1_negative);

struct TaskScore {
  double accuracy = 0.0;
  double f1 = 0.0;
};

struct GroupAverages {
  TaskScore fact;      // Climate, Health
  TaskScore fairness;  // HSD, SBIC
  TaskScore all;       // the four above
};

// Unweighted means. Throws DataError when one of Climate, Health, HSD or
// SBIC is missing; ToxiGen and MGFN never enter the averages.
GroupAverages aggregate(const std::map<Source, TaskScore>& per_task);

struct CategoryBucket {
  std::string category;  // "None" for no category, "other" for the folded tail
  std::size_t count = 0;
  std::size_t correct = 0;
  double accuracy = 0.0;
};

inline constexpr std::size_t kMaxCategories = 10;
inline constexpr std::string_view kNoneBucket = "None";
inline constexpr std::string_view kOtherBucket = "other";

// Per grounding category: how many claims landed there and how many of them
// were classified correctly. The ten largest named categories are kept
// (ties by name), the rest fold into "other", and claims without a category
// go to "None". Results without grounding are skipped. `gold` is parallel to
// `results`.
std::vector<CategoryBucket> task_recognition(const std::vector<CheckResult>& results,
                                             std::span<const Label> gold);

struct TaskReport {
  Source source = Source::Climate;
  std::size_t records = 0;
  std::size_t scored = 0;
  std::size_t failed = 0;
  std::size_t degraded = 0;
  double accuracy = 0.0;
  // Unacceptable-class (fake / unfair / toxic) scores.
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  // Acceptable-class (real / fair / benign) F1.
  double f1_acceptable = 0.0;
  double macro_f1 = 0.0;
  ConfusionCounts counts;
  std::vector<CategoryBucket> categories;
};

struct MetricsReport {
  std::vector<TaskReport> tasks;  // ordered by Source
  std::optional<GroupAverages> averages;
  std::size_t failed = 0;
  std::size_t degraded = 0;
};

// Joins results to gold records by id. Throws DataError for results naming
// unknown ids, duplicate results, or gold records without a label. Gold
// records with no result count as failures, as do error entries.
MetricsReport build_report(const std::vector<BatchEntry>& results,
                           const std::vector<ClaimRecord>& gold);

// Half-up rounding to two decimals, applied only when rendering.
double round2(double value);

// Machine-readable report with full-precision values.
std::string report_to_json(const MetricsReport& report);
// Fixed-width text tables laid out like the published result tables,
// including the cited baseline rows.
std::string render_tables(const MetricsReport& report);
// task,category,count,correct,accuracy
std::string histogram_csv(const MetricsReport& report);

}  // namespace langcheck::eval
