#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace langcheck {

// Unified binary outcome: factual-and-fair vs nonfactual-or-unfair.
enum class Label { Acceptable, Unacceptable };

enum class DecisionPath {
  GenerativeYes,
  GenerativeExplicitNo,
  GenerativeNonAnswer,
  EntailWins,
  ContradictWinsOrTie,
};

// Corpus a record was ingested from.
enum class Source { Hsd, Sbic, Climate, Health, Toxigen, Mgfn };

// Which family of checking an exemplar (or a task) belongs to.
enum class TaskGroup { Fact, Fairness };

std::string_view to_string(Label label);
std::string_view to_string(DecisionPath path);
std::string_view to_string(Source source);
std::string_view to_string(TaskGroup group);

// Parsers for the names produced by to_string. Throw InputError on unknown
// names.
Label label_from_string(std::string_view name);
DecisionPath decision_path_from_string(std::string_view name);
Source source_from_string(std::string_view name);

TaskGroup task_group_of(Source source);

// The label a decision path implies. The mapping is fixed, so a Verdict never
// stores a label that disagrees with its path.
Label label_for(DecisionPath path);

class Verdict {
 public:
  Verdict(DecisionPath path, std::string raw_answer)
      : path_(path), raw_answer_(std::move(raw_answer)) {}

  Label label() const { return label_for(path_); }
  DecisionPath decision_path() const { return path_; }
  const std::string& raw_answer() const { return raw_answer_; }

  friend bool operator==(const Verdict&, const Verdict&) = default;

 private:
  DecisionPath path_;
  std::string raw_answer_;
};

// Parsed output of a fact-prediction completion.
struct GroundingResult {
  std::string summary;
  // Lower-cased, trimmed; nullopt is the "None" bucket.
  std::optional<std::string> category;
  std::string fact;
  std::string raw;
  // Set when no fact line was found and `fact` holds the whole completion.
  bool degraded = false;

  friend bool operator==(const GroundingResult&, const GroundingResult&) = default;
};

struct Exemplar {
  std::string claim;
  std::string summary;
  std::string category;
  std::string fact;
  std::string verdict_answer;  // "yes" or "no"
  TaskGroup source_task = TaskGroup::Fact;

  friend bool operator==(const Exemplar&, const Exemplar&) = default;
};

// Three-way entailment probabilities. Construct through make() to get the
// range and sum checks.
struct EntailmentScores {
  double entail = 0.0;
  double neutral = 0.0;
  double contradict = 0.0;

  static constexpr double kSumTolerance = 1e-4;

  // Throws InputError unless each value is in [0,1] and the sum is within
  // kSumTolerance of 1.
  static EntailmentScores make(double entail, double neutral, double contradict);
  bool valid() const;
};

struct ClaimRecord {
  std::string id;
  Source source = Source::Climate;
  std::string text;
  std::optional<Label> gold;
  std::optional<std::string> document;
  std::optional<std::string> question;
  std::optional<std::string> answer;

  // Throws InputError when text is blank or the MGFN-only fields are present
  // (or absent) on the wrong source.
  void validate() const;

  friend bool operator==(const ClaimRecord&, const ClaimRecord&) = default;
};

}  // namespace langcheck
