#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "langcheck/types.hpp"

namespace langcheck {

enum class PromptStrategy {
  ZeroCls,
  FewFp,
  GroundedClsZero,
  GroundedClsFew,
  MgfnQuestionGen,
  MgfnQa,
  MgfnVerdict,
};

enum class ExemplarMode { MultiTask, FactOnly, FairnessOnly, NotApplicable };

std::string_view to_string(PromptStrategy strategy);
std::string_view to_string(ExemplarMode mode);
ExemplarMode exemplar_mode_from_string(std::string_view name);

struct PromptText {
  std::string text;
  PromptStrategy strategy = PromptStrategy::ZeroCls;
  ExemplarMode exemplar_mode = ExemplarMode::NotApplicable;
};

struct SuppositionText {
  static constexpr std::string_view kPrefix =
      "The claim does not align with the fact is_entailed_by ";

  std::string text;
  // True when the grounding had no summary and the claim text stood in.
  bool summary_from_claim = false;
};

// Verification-question exemplar for the machine-generated news chain.
struct QuestionExemplar {
  std::string claim;
  std::string question;
  TaskGroup source_task = TaskGroup::Fact;
};

struct ExemplarSet {
  std::vector<Exemplar> exemplars;
  std::vector<QuestionExemplar> question_exemplars;
};

// Parses the block grammar documented at the top of assets/exemplars.txt.
// Throws InputError on malformed input or on a set that does not hold exactly
// one exemplar per (task, answer) pair.
ExemplarSet parse_exemplar_asset(std::string_view asset);

// The asset compiled into the library.
std::string_view builtin_exemplar_asset();
const ExemplarSet& builtin_exemplars();

// MultiTask: fact-yes, fact-no, fairness-yes, fairness-no. FactOnly and
// FairnessOnly: the matching yes/no pair. Throws InputError for
// NotApplicable.
std::vector<Exemplar> select_exemplars(ExemplarMode mode);
std::vector<QuestionExemplar> select_question_exemplars(ExemplarMode mode);

// "Claim: ...\nThe claim mentions that ....\n<Category> Fact: ..."
std::string render_fact_block(std::string_view claim, std::string_view summary,
                              const std::optional<std::string>& category, std::string_view fact);
std::string render_exemplar(const Exemplar& exemplar);

PromptText build_zero_cls_prompt(std::string_view claim);
PromptText build_fact_prediction_prompt(std::string_view claim,
                                        const std::vector<Exemplar>& exemplars,
                                        ExemplarMode mode = ExemplarMode::MultiTask);
PromptText build_grounded_cls_prompt(std::string_view claim, const GroundingResult& grounding,
                                     bool few_shot, const std::vector<Exemplar>& exemplars,
                                     ExemplarMode mode = ExemplarMode::MultiTask);
SuppositionText build_supposition(const GroundingResult& grounding, std::string_view claim);

// Steps of the document-grounded chain. Step 2 and 3 take the cleaned output
// of the previous step.
PromptText build_mgfn_question_prompt(const ClaimRecord& record, ExemplarMode mode);
PromptText build_mgfn_qa_prompt(const ClaimRecord& record, std::string_view generated_question);
PromptText build_mgfn_verdict_prompt(const ClaimRecord& record,
                                     std::string_view generated_answer);

struct MgfnPrompts {
  PromptText question_gen;
  PromptText qa;
  PromptText verdict;
};

MgfnPrompts build_mgfn_prompts(const ClaimRecord& record, ExemplarMode mode,
                               std::string_view generated_question,
                               std::string_view generated_answer);

}  // namespace langcheck
