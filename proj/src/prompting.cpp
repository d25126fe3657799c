#include "langcheck/prompting.hpp"

#include <algorithm>
#include <array>
#include <map>

#include <fmt/format.h>

#include "langcheck/errors.hpp"
#include "langcheck/text.hpp"

namespace langcheck {
namespace detail {
extern const std::string_view kExemplarAsset;
}  // namespace detail

namespace {

constexpr std::string_view kFairQuestion = "Question: Is it fair to say that?";
constexpr std::string_view kMentionsCue = "The claim mentions that";
constexpr std::string_view kBlockSeparator = "\n\n";

std::string require_claim(std::string_view claim) {
  std::string line = text::single_line(claim);
  if (line.empty()) throw InputError("claim text is empty");
  return line;
}

std::string strip_trailing_periods(std::string_view s) {
  s = text::trim(s);
  while (!s.empty() && s.back() == '.') s = text::trim_right(s.substr(0, s.size() - 1));
  return std::string(s);
}

std::string join_blocks(const std::vector<std::string>& blocks) {
  std::string out;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (i > 0) out += kBlockSeparator;
    out += blocks[i];
  }
  return out;
}

TaskGroup parse_task(std::string_view v) {
  if (v == "fact") return TaskGroup::Fact;
  if (v == "fairness") return TaskGroup::Fairness;
  throw InputError(fmt::format("exemplar task must be fact or fairness, got '{}'", v));
}

int exemplar_rank(const Exemplar& e) {
  int task = e.source_task == TaskGroup::Fact ? 0 : 2;
  return task + (e.verdict_answer == "yes" ? 0 : 1);
}

void require_mgfn(const ClaimRecord& record) {
  if (record.source != Source::Mgfn) {
    throw InputError(fmt::format("record '{}' is not an mgfn record", record.id));
  }
  auto blank = [](const std::optional<std::string>& v) { return !v || text::trim(*v).empty(); };
  if (blank(record.document)) throw InputError(fmt::format("record '{}' has no document", record.id));
  if (blank(record.question)) throw InputError(fmt::format("record '{}' has no question", record.id));
  if (blank(record.answer)) throw InputError(fmt::format("record '{}' has no answer", record.id));
}

std::string mgfn_claim(const ClaimRecord& record) {
  return text::single_line(*record.question + " " + *record.answer);
}

}  // namespace

std::string_view to_string(PromptStrategy strategy) {
  switch (strategy) {
    case PromptStrategy::ZeroCls: return "zero_cls";
    case PromptStrategy::FewFp: return "few_fp";
    case PromptStrategy::GroundedClsZero: return "grounded_cls_zero";
    case PromptStrategy::GroundedClsFew: return "grounded_cls_few";
    case PromptStrategy::MgfnQuestionGen: return "mgfn_question_gen";
    case PromptStrategy::MgfnQa: return "mgfn_qa";
    case PromptStrategy::MgfnVerdict: return "mgfn_verdict";
  }
  return "?";
}

std::string_view to_string(ExemplarMode mode) {
  switch (mode) {
    case ExemplarMode::MultiTask: return "multi";
    case ExemplarMode::FactOnly: return "fact";
    case ExemplarMode::FairnessOnly: return "fairness";
    case ExemplarMode::NotApplicable: return "n/a";
  }
  return "?";
}

ExemplarMode exemplar_mode_from_string(std::string_view name) {
  if (name == "multi") return ExemplarMode::MultiTask;
  if (name == "fact") return ExemplarMode::FactOnly;
  if (name == "fairness") return ExemplarMode::FairnessOnly;
  if (name == "n/a") return ExemplarMode::NotApplicable;
  throw InputError(fmt::format("unknown exemplar mode '{}'", name));
}

ExemplarSet parse_exemplar_asset(std::string_view asset) {
  enum class Block { None, Exemplar, Question };
  ExemplarSet set;
  Block block = Block::None;
  std::map<std::string, std::string> fields;
  std::size_t block_line = 0;

  auto field = [&](const char* key) -> std::string {
    auto it = fields.find(key);
    if (it == fields.end() || it->second.empty()) {
      throw InputError(fmt::format("exemplar block at line {} is missing '{}'", block_line, key));
    }
    return it->second;
  };

  auto flush = [&] {
    if (block == Block::Exemplar) {
      Exemplar e;
      e.source_task = parse_task(field("task"));
      e.verdict_answer = field("answer");
      if (e.verdict_answer != "yes" && e.verdict_answer != "no") {
        throw InputError(fmt::format("exemplar at line {}: answer must be yes or no", block_line));
      }
      e.claim = field("claim");
      e.summary = field("summary");
      e.category = field("category");
      e.fact = field("fact");
      if (e.category != text::ascii_lower(e.category)) {
        throw InputError(fmt::format("exemplar at line {}: category must be lower-case", block_line));
      }
      set.exemplars.push_back(std::move(e));
    } else if (block == Block::Question) {
      QuestionExemplar q;
      q.source_task = parse_task(field("task"));
      q.claim = field("claim");
      q.question = field("question");
      set.question_exemplars.push_back(std::move(q));
    }
    fields.clear();
  };

  std::size_t lineno = 0;
  for (std::string_view raw : text::split_lines(asset)) {
    ++lineno;
    std::string_view line = text::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (line == "[exemplar]" || line == "[question-exemplar]") {
      flush();
      block = line == "[exemplar]" ? Block::Exemplar : Block::Question;
      block_line = lineno;
      continue;
    }
    if (block == Block::None) {
      throw InputError(fmt::format("line {}: content outside of an exemplar block", lineno));
    }
    auto colon = line.find(": ");
    if (colon == std::string_view::npos) {
      throw InputError(fmt::format("line {}: expected 'key: value'", lineno));
    }
    std::string key(text::trim(line.substr(0, colon)));
    if (fields.count(key)) throw InputError(fmt::format("line {}: duplicate key '{}'", lineno, key));
    fields[key] = std::string(text::trim(line.substr(colon + 2)));
  }
  flush();

  std::array<int, 4> seen{};
  for (const auto& e : set.exemplars) ++seen[static_cast<std::size_t>(exemplar_rank(e))];
  if (std::any_of(seen.begin(), seen.end(), [](int n) { return n != 1; })) {
    throw InputError("exemplar asset needs exactly one exemplar per (task, answer) pair");
  }
  std::stable_sort(set.exemplars.begin(), set.exemplars.end(),
                   [](const Exemplar& a, const Exemplar& b) {
                     return exemplar_rank(a) < exemplar_rank(b);
                   });
  std::stable_sort(set.question_exemplars.begin(), set.question_exemplars.end(),
                   [](const QuestionExemplar& a, const QuestionExemplar& b) {
                     return a.source_task == TaskGroup::Fact && b.source_task != TaskGroup::Fact;
                   });
  return set;
}

std::string_view builtin_exemplar_asset() { return detail::kExemplarAsset; }

const ExemplarSet& builtin_exemplars() {
  static const ExemplarSet set = parse_exemplar_asset(detail::kExemplarAsset);
  return set;
}

std::vector<Exemplar> select_exemplars(ExemplarMode mode) {
  const auto& all = builtin_exemplars().exemplars;
  std::vector<Exemplar> out;
  for (const auto& e : all) {
    switch (mode) {
      case ExemplarMode::MultiTask:
        out.push_back(e);
        break;
      case ExemplarMode::FactOnly:
        if (e.source_task == TaskGroup::Fact) out.push_back(e);
        break;
      case ExemplarMode::FairnessOnly:
        if (e.source_task == TaskGroup::Fairness) out.push_back(e);
        break;
      case ExemplarMode::NotApplicable:
        throw InputError("exemplar mode must be multi, fact or fairness");
    }
  }
  return out;
}

std::vector<QuestionExemplar> select_question_exemplars(ExemplarMode mode) {
  if (mode != ExemplarMode::MultiTask && mode != ExemplarMode::FactOnly) {
    throw InputError("question exemplars support only multi and fact modes");
  }
  std::vector<QuestionExemplar> out;
  for (const auto& q : builtin_exemplars().question_exemplars) {
    if (mode == ExemplarMode::MultiTask || q.source_task == TaskGroup::Fact) out.push_back(q);
  }
  return out;
}

std::string render_fact_block(std::string_view claim, std::string_view summary,
                              const std::optional<std::string>& category, std::string_view fact) {
  std::string fact_label = "Fact:";
  if (category && !text::trim(*category).empty()) {
    fact_label = text::title_case(text::single_line(*category)) + " Fact:";
  }
  return fmt::format("Claim: {}\n{} {}.\n{} {}", text::single_line(claim), kMentionsCue,
                     strip_trailing_periods(text::single_line(summary)), fact_label,
                     text::single_line(fact));
}

std::string render_exemplar(const Exemplar& e) {
  return render_fact_block(e.claim, e.summary, e.category, e.fact);
}

PromptText build_zero_cls_prompt(std::string_view claim) {
  return {fmt::format("Claim: {}\n{}", require_claim(claim), kFairQuestion),
          PromptStrategy::ZeroCls, ExemplarMode::NotApplicable};
}

PromptText build_fact_prediction_prompt(std::string_view claim,
                                        const std::vector<Exemplar>& exemplars,
                                        ExemplarMode mode) {
  std::string line = require_claim(claim);
  if (exemplars.empty()) throw InputError("fact prediction needs at least one exemplar");
  std::vector<std::string> blocks;
  for (const auto& e : exemplars) blocks.push_back(render_exemplar(e));
  blocks.push_back(fmt::format("Claim: {}\n{}", line, kMentionsCue));
  return {join_blocks(blocks), PromptStrategy::FewFp, mode};
}

PromptText build_grounded_cls_prompt(std::string_view claim, const GroundingResult& grounding,
                                     bool few_shot, const std::vector<Exemplar>& exemplars,
                                     ExemplarMode mode) {
  std::string line = require_claim(claim);
  if (text::trim(grounding.fact).empty()) throw InputError("grounding fact is empty");
  std::vector<std::string> blocks;
  if (few_shot) {
    if (exemplars.empty()) throw InputError("few-shot classification needs exemplars");
    for (const auto& e : exemplars) {
      blocks.push_back(
          fmt::format("{}\n{}\nAnswer: {}", render_exemplar(e), kFairQuestion, e.verdict_answer));
    }
  }
  std::string_view summary =
      text::trim(grounding.summary).empty() ? std::string_view(line) : grounding.summary;
  blocks.push_back(fmt::format("{}\n{}", render_fact_block(line, summary, grounding.category,
                                                           grounding.fact),
                               kFairQuestion));
  return {join_blocks(blocks),
          few_shot ? PromptStrategy::GroundedClsFew : PromptStrategy::GroundedClsZero,
          few_shot ? mode : ExemplarMode::NotApplicable};
}

SuppositionText build_supposition(const GroundingResult& grounding, std::string_view claim) {
  SuppositionText out;
  std::string summary = strip_trailing_periods(text::single_line(grounding.summary));
  if (summary.empty()) {
    summary = strip_trailing_periods(text::single_line(claim));
    out.summary_from_claim = true;
  }
  std::string fact_label = "Fact:";
  if (grounding.category && !text::trim(*grounding.category).empty()) {
    fact_label = text::title_case(text::single_line(*grounding.category)) + " Fact:";
  }
  out.text = fmt::format("{}the claim mentions that {}. {} {}", SuppositionText::kPrefix, summary,
                         fact_label, text::single_line(grounding.fact));
  return out;
}

PromptText build_mgfn_question_prompt(const ClaimRecord& record, ExemplarMode mode) {
  require_mgfn(record);
  std::vector<std::string> blocks;
  for (const auto& q : select_question_exemplars(mode)) {
    blocks.push_back(fmt::format("Claim: {}\nQuestion: {}", q.claim, q.question));
  }
  blocks.push_back(fmt::format("Claim: {}\nQuestion:", mgfn_claim(record)));
  return {join_blocks(blocks), PromptStrategy::MgfnQuestionGen, mode};
}

PromptText build_mgfn_qa_prompt(const ClaimRecord& record, std::string_view generated_question) {
  require_mgfn(record);
  std::string question = text::single_line(generated_question);
  if (question.empty()) throw InputError("generated verification question is empty");
  return {fmt::format("Document: {}\nQuestion: {}\nAnswer:", text::trim(*record.document), question),
          PromptStrategy::MgfnQa, ExemplarMode::NotApplicable};
}

PromptText build_mgfn_verdict_prompt(const ClaimRecord& record,
                                     std::string_view generated_answer) {
  require_mgfn(record);
  std::string answer = text::single_line(generated_answer);
  if (answer.empty()) throw InputError("generated answer is empty");
  return {fmt::format("Document: {}\nClaim: {}\nFact: {}\n{}", text::trim(*record.document),
                      mgfn_claim(record), answer, kFairQuestion),
          PromptStrategy::MgfnVerdict, ExemplarMode::NotApplicable};
}

MgfnPrompts build_mgfn_prompts(const ClaimRecord& record, ExemplarMode mode,
                               std::string_view generated_question,
                               std::string_view generated_answer) {
  return {build_mgfn_question_prompt(record, mode), build_mgfn_qa_prompt(record, generated_question),
          build_mgfn_verdict_prompt(record, generated_answer)};
}

}  // namespace langcheck
