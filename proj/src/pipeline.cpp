#include "langcheck/pipeline.hpp"

#include <array>
#include <atomic>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include <fmt/format.h>
#include <json.hpp>

#include "langcheck/parser.hpp"
#include "langcheck/text.hpp"

namespace langcheck {
namespace {

using ordered_json = nlohmann::ordered_json;

constexpr std::array<std::pair<Strategy, std::string_view>, 6> kStrategies{{
    {Strategy::ZeroCls, "zero"},
    {Strategy::FewFpZeroCls, "fewfp-zero"},
    {Strategy::FewFpFewCls, "fewfp-few"},
    {Strategy::FewFpEntailZeroCls, "fewfp-entail-zero"},
    {Strategy::FewFpEntailFewCls, "fewfp-entail-few"},
    {Strategy::MgfnChain, "mgfn"},
}};

template <typename Fn>
auto for_claim(const std::string& id, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const ClaimError&) {
    throw;
  } catch (const Error& e) {
    throw ClaimError(id, fmt::format("claim {}: {}", id, e.what()));
  }
}

ordered_json grounding_json(const GroundingResult& g) {
  ordered_json j;
  j["summary"] = g.summary;
  j["category"] = g.category ? ordered_json(*g.category) : ordered_json(nullptr);
  j["fact"] = g.fact;
  j["raw"] = g.raw;
  j["degraded"] = g.degraded;
  return j;
}

GroundingResult grounding_from_json(const ordered_json& j) {
  GroundingResult g;
  g.summary = j.at("summary").get<std::string>();
  if (!j.at("category").is_null()) g.category = j.at("category").get<std::string>();
  g.fact = j.at("fact").get<std::string>();
  g.raw = j.at("raw").get<std::string>();
  g.degraded = j.at("degraded").get<bool>();
  return g;
}

std::string dump(const ordered_json& j) {
  return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

}  // namespace

std::string_view to_string(Strategy strategy) {
  for (const auto& [s, name] : kStrategies) {
    if (s == strategy) return name;
  }
  return "?";
}

Strategy strategy_from_string(std::string_view name) {
  for (const auto& [s, n] : kStrategies) {
    if (n == name) return s;
  }
  throw InputError(fmt::format("unknown strategy '{}'", name));
}

bool uses_entailment(Strategy strategy) {
  return strategy == Strategy::FewFpEntailZeroCls || strategy == Strategy::FewFpEntailFewCls;
}

Checker::Checker(CompletionClient& client, EntailmentProvider* entailment, PipelineConfig config)
    : client_(client), entailment_(entailment), config_(std::move(config)) {}

CompletionResult Checker::call(const PromptText& prompt) {
  CompletionRequest request;
  request.prompt = prompt.text;
  request.temperature = config_.temperature;
  request.stop = config_.stop;
  return client_.complete(request);
}

CheckResult Checker::run_zero_cls(const ClaimRecord& claim) {
  return for_claim(claim.id, [&] {
    CheckResult r;
    r.claim_id = claim.id;
    r.strategy = Strategy::ZeroCls;
    auto completion = call(build_zero_cls_prompt(claim.text));
    r.provider_calls = 1;
    r.verdict = parse_yes_no(completion.text);
    r.completions.push_back(std::move(completion.text));
    return r;
  });
}

CheckResult Checker::run_few_fp(const ClaimRecord& claim, ExemplarMode mode,
                                GroundedClassifier classifier) {
  return for_claim(claim.id, [&] {
    if (classifier == GroundedClassifier::Entailment && entailment_ == nullptr) {
      throw ConfigError("entailment strategy requested without an entailment provider");
    }
    CheckResult r;
    r.claim_id = claim.id;
    r.exemplar_mode = mode;
    const std::vector<Exemplar> exemplars = select_exemplars(mode);

    auto fp = call(build_fact_prediction_prompt(claim.text, exemplars, mode));
    r.provider_calls = 1;
    r.completions.push_back(fp.text);
    GroundingResult grounding = parse_fact_prediction(fp.text);
    if (grounding.fact.empty()) throw ProviderError("fact prediction returned an empty completion");
    r.degraded = grounding.degraded;

    switch (classifier) {
      case GroundedClassifier::ZeroCls:
      case GroundedClassifier::FewCls: {
        const bool few = classifier == GroundedClassifier::FewCls;
        r.strategy = few ? Strategy::FewFpFewCls : Strategy::FewFpZeroCls;
        auto cls = call(build_grounded_cls_prompt(claim.text, grounding, few, exemplars, mode));
        r.provider_calls = 2;
        r.summary_from_claim = text::trim(grounding.summary).empty();
        r.verdict = parse_yes_no(cls.text);
        r.completions.push_back(std::move(cls.text));
        break;
      }
      case GroundedClassifier::Entailment: {
        r.strategy = Strategy::FewFpEntailZeroCls;
        auto outcome = check_with_entailment(grounding, claim.text, *entailment_);
        r.entailment_calls = 1;
        r.verdict = outcome.verdict;
        r.supposition = outcome.supposition.text;
        r.summary_from_claim = outcome.supposition.summary_from_claim;
        break;
      }
    }
    r.grounding = std::move(grounding);
    return r;
  });
}

CheckResult Checker::run_mgfn(const ClaimRecord& record, ExemplarMode mode) {
  return for_claim(record.id, [&] {
    int step = 0;
    auto at_step = [&](auto&& fn) {
      ++step;
      try {
        return fn();
      } catch (const ConfigError&) {
        throw;
      } catch (const Error& e) {
        throw ClaimError(record.id, fmt::format("claim {}: mgfn step {}: {}", record.id, step, e.what()));
      }
    };
    CheckResult r;
    r.claim_id = record.id;
    r.strategy = Strategy::MgfnChain;
    r.exemplar_mode = mode;

    const std::string question = at_step([&] {
      auto c = call(build_mgfn_question_prompt(record, mode));
      r.completions.push_back(c.text);
      std::string q = first_line(c.text);
      if (q.empty()) throw ProviderError("empty verification question");
      return q;
    });
    const std::string answer = at_step([&] {
      auto c = call(build_mgfn_qa_prompt(record, question));
      r.completions.push_back(c.text);
      std::string a = first_line(c.text);
      if (a.empty()) throw ProviderError("empty answer");
      return a;
    });
    r.verdict = at_step([&] {
      auto c = call(build_mgfn_verdict_prompt(record, answer));
      r.completions.push_back(c.text);
      return parse_yes_no(c.text);
    });
    r.provider_calls = 3;
    r.grounding = GroundingResult{question, std::nullopt, answer, r.completions[1], false};
    return r;
  });
}

CheckResult Checker::run(const ClaimRecord& claim, Strategy strategy, ExemplarMode mode) {
  switch (strategy) {
    case Strategy::ZeroCls:
      return run_zero_cls(claim);
    case Strategy::FewFpZeroCls:
      return run_few_fp(claim, mode, GroundedClassifier::ZeroCls);
    case Strategy::FewFpFewCls:
      return run_few_fp(claim, mode, GroundedClassifier::FewCls);
    case Strategy::FewFpEntailZeroCls:
      return run_few_fp(claim, mode, GroundedClassifier::Entailment);
    case Strategy::FewFpEntailFewCls: {
      CheckResult r = run_few_fp(claim, mode, GroundedClassifier::Entailment);
      r.strategy = Strategy::FewFpEntailFewCls;
      return r;
    }
    case Strategy::MgfnChain:
      return run_mgfn(claim, mode);
  }
  throw InputError("unknown strategy");
}

BatchOutcome run_batch(Checker& checker, const std::vector<ClaimRecord>& records,
                       Strategy strategy, ExemplarMode mode, std::size_t parallelism) {
  if (parallelism == 0) throw InputError("parallelism must be at least 1");
  BatchOutcome outcome;
  outcome.entries.resize(records.size());

  std::atomic<std::size_t> next{0};
  std::atomic<bool> abort{false};
  std::exception_ptr fatal;
  std::mutex fatal_mu;

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= records.size() || abort.load()) return;
      BatchEntry& entry = outcome.entries[i];
      entry.claim_id = records[i].id;
      try {
        entry.result = checker.run(records[i], strategy, mode);
      } catch (const ConfigError&) {
        std::lock_guard lock(fatal_mu);
        if (!fatal) fatal = std::current_exception();
        abort = true;
        return;
      } catch (const std::exception& e) {
        entry.error = e.what();
      }
    }
  };

  {
    const std::size_t n = std::min(parallelism, std::max<std::size_t>(records.size(), 1));
    std::vector<std::jthread> pool;
    pool.reserve(n);
    for (std::size_t t = 0; t < n; ++t) pool.emplace_back(worker);
  }
  if (fatal) std::rethrow_exception(fatal);

  for (const auto& e : outcome.entries) {
    if (e.result) {
      ++outcome.succeeded;
      if (e.result->degraded) ++outcome.degraded;
    } else {
      ++outcome.failed;
    }
  }
  if (!records.empty() && outcome.succeeded == 0) {
    throw Error(fmt::format("all {} claims failed; first error: {}", records.size(),
                            outcome.entries.front().error.value_or("?")));
  }
  return outcome;
}

std::string result_to_line(const BatchEntry& entry, Strategy strategy, ExemplarMode mode) {
  ordered_json j;
  j["claim_id"] = entry.claim_id;
  if (!entry.result) {
    j["strategy"] = std::string(to_string(strategy));
    j["mode"] = std::string(to_string(strategy == Strategy::ZeroCls ? ExemplarMode::NotApplicable : mode));
    j["error"] = entry.error.value_or("unknown error");
    return dump(j);
  }
  const CheckResult& r = *entry.result;
  j["strategy"] = std::string(to_string(r.strategy));
  j["mode"] = std::string(to_string(r.exemplar_mode));
  j["label"] = std::string(to_string(r.verdict.label()));
  j["decision_path"] = std::string(to_string(r.verdict.decision_path()));
  j["raw_answer"] = r.verdict.raw_answer();
  j["grounding"] = r.grounding ? grounding_json(*r.grounding) : ordered_json(nullptr);
  j["supposition"] = r.supposition ? ordered_json(*r.supposition) : ordered_json(nullptr);
  j["summary_from_claim"] = r.summary_from_claim;
  j["provider_calls"] = r.provider_calls;
  j["entailment_calls"] = r.entailment_calls;
  j["degraded"] = r.degraded;
  j["completions"] = r.completions;
  return dump(j);
}

BatchEntry result_from_line(std::string_view line) {
  try {
    const auto j = ordered_json::parse(line);
    BatchEntry entry;
    entry.claim_id = j.at("claim_id").get<std::string>();
    if (j.contains("error")) {
      entry.error = j.at("error").get<std::string>();
      return entry;
    }
    CheckResult r;
    r.claim_id = entry.claim_id;
    r.strategy = strategy_from_string(j.at("strategy").get<std::string>());
    r.exemplar_mode = exemplar_mode_from_string(j.at("mode").get<std::string>());
    r.verdict = Verdict(decision_path_from_string(j.at("decision_path").get<std::string>()),
                        j.at("raw_answer").get<std::string>());
    if (to_string(r.verdict.label()) != j.at("label").get<std::string>()) {
      throw DataError(fmt::format("result '{}': label disagrees with decision path", r.claim_id));
    }
    if (!j.at("grounding").is_null()) r.grounding = grounding_from_json(j.at("grounding"));
    if (!j.at("supposition").is_null()) r.supposition = j.at("supposition").get<std::string>();
    r.summary_from_claim = j.at("summary_from_claim").get<bool>();
    r.provider_calls = j.at("provider_calls").get<int>();
    r.entailment_calls = j.at("entailment_calls").get<int>();
    r.degraded = j.at("degraded").get<bool>();
    r.completions = j.at("completions").get<std::vector<std::string>>();
    entry.result = std::move(r);
    return entry;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(fmt::format("malformed result line: {}", e.what()));
  } catch (const InputError& e) {
    throw DataError(fmt::format("malformed result line: {}", e.what()));
  }
}

void write_results(const std::filesystem::path& path, const BatchOutcome& outcome,
                   Strategy strategy, ExemplarMode mode) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot write '{}'", path.string()));
  for (const auto& e : outcome.entries) out << result_to_line(e, strategy, mode) << '\n';
  if (!out) throw IoError(fmt::format("write to '{}' failed", path.string()));
}

std::vector<BatchEntry> read_results(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}'", path.string()));
  std::vector<BatchEntry> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    try {
      out.push_back(result_from_line(line));
    } catch (const DataError& e) {
      throw DataError(fmt::format("{}:{}: {}", path.string(), lineno, e.what()));
    }
  }
  return out;
}

}  // namespace langcheck
