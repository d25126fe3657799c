#include "langcheck/types.hpp"

#include <array>
#include <cmath>
#include <utility>

#include <fmt/format.h>

#include "langcheck/errors.hpp"
#include "langcheck/text.hpp"

namespace langcheck {
namespace {

constexpr std::array<std::pair<Label, std::string_view>, 2> kLabels{{
    {Label::Acceptable, "acceptable"},
    {Label::Unacceptable, "unacceptable"},
}};

constexpr std::array<std::pair<DecisionPath, std::string_view>, 5> kPaths{{
    {DecisionPath::GenerativeYes, "generative_yes"},
    {DecisionPath::GenerativeExplicitNo, "generative_explicit_no"},
    {DecisionPath::GenerativeNonAnswer, "generative_non_answer"},
    {DecisionPath::EntailWins, "entail_wins"},
    {DecisionPath::ContradictWinsOrTie, "contradict_wins_or_tie"},
}};

constexpr std::array<std::pair<Source, std::string_view>, 6> kSources{{
    {Source::Hsd, "hsd"},
    {Source::Sbic, "sbic"},
    {Source::Climate, "climate"},
    {Source::Health, "health"},
    {Source::Toxigen, "toxigen"},
    {Source::Mgfn, "mgfn"},
}};

template <typename Table, typename Enum>
std::string_view name_of(const Table& table, Enum value) {
  for (const auto& [v, name] : table) {
    if (v == value) return name;
  }
  return "?";
}

template <typename Table>
auto value_of(const Table& table, std::string_view name, std::string_view what) {
  for (const auto& [v, n] : table) {
    if (n == name) return v;
  }
  throw InputError(fmt::format("unknown {} '{}'", what, name));
}

}  // namespace

std::string_view to_string(Label label) { return name_of(kLabels, label); }
std::string_view to_string(DecisionPath path) { return name_of(kPaths, path); }
std::string_view to_string(Source source) { return name_of(kSources, source); }
std::string_view to_string(TaskGroup group) {
  return group == TaskGroup::Fact ? "fact" : "fairness";
}

Label label_from_string(std::string_view name) { return value_of(kLabels, name, "label"); }
DecisionPath decision_path_from_string(std::string_view name) {
  return value_of(kPaths, name, "decision path");
}
Source source_from_string(std::string_view name) { return value_of(kSources, name, "source"); }

TaskGroup task_group_of(Source source) {
  switch (source) {
    case Source::Climate:
    case Source::Health:
    case Source::Mgfn:
      return TaskGroup::Fact;
    case Source::Hsd:
    case Source::Sbic:
    case Source::Toxigen:
      return TaskGroup::Fairness;
  }
  return TaskGroup::Fact;
}

Label label_for(DecisionPath path) {
  switch (path) {
    case DecisionPath::GenerativeExplicitNo:
    case DecisionPath::EntailWins:
      return Label::Unacceptable;
    case DecisionPath::GenerativeYes:
    case DecisionPath::GenerativeNonAnswer:
    case DecisionPath::ContradictWinsOrTie:
      return Label::Acceptable;
  }
  return Label::Acceptable;
}

bool EntailmentScores::valid() const {
  auto in_unit = [](double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; };
  if (!in_unit(entail) || !in_unit(neutral) || !in_unit(contradict)) return false;
  return std::abs(entail + neutral + contradict - 1.0) <= kSumTolerance;
}

EntailmentScores EntailmentScores::make(double entail, double neutral, double contradict) {
  EntailmentScores s{entail, neutral, contradict};
  if (!s.valid()) {
    throw InputError(fmt::format("invalid entailment scores ({}, {}, {})", entail, neutral,
                                 contradict));
  }
  return s;
}

void ClaimRecord::validate() const {
  if (text::trim(text).empty()) {
    throw InputError(fmt::format("record '{}' has empty text", id));
  }
  const bool mgfn = source == Source::Mgfn;
  const bool has_all = document && question && answer;
  const bool has_any = document || question || answer;
  if (mgfn && !has_all) {
    throw InputError(fmt::format("mgfn record '{}' needs document, question and answer", id));
  }
  if (!mgfn && has_any) {
    throw InputError(
        fmt::format("record '{}' carries document/question/answer but is not mgfn", id));
  }
}

}  // namespace langcheck
