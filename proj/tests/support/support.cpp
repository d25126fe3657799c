#include "support.hpp"

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>
#include <json.hpp>

#include "langcheck/client.hpp"
#include "langcheck/entailment.hpp"
#include "langcheck/evaluation.hpp"
#include "langcheck/parser.hpp"
#include "langcheck/prompting.hpp"
#include "langcheck/provider.hpp"
#include "langcheck/record_io.hpp"

namespace langcheck::testing {

namespace fs = std::filesystem;

fs::path fixture_dir() { return LANGCHECK_FIXTURE_DIR; }

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& path, std::string_view body) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << body;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

bool updating_golden() {
  const char* v = std::getenv("LANGCHECK_UPDATE_GOLDEN");
  return v != nullptr && std::string_view(v) == "1";
}

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
  path_ = fs::temp_directory_path() / fmt::format("langcheck-test-{}-{}", stamp, counter++);
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

namespace {

ClaimRecord golden_mgfn_record() {
  ClaimRecord r;
  r.id = "mgfn-00001";
  r.source = Source::Mgfn;
  r.document = "The city council approved a new budget on Monday that adds funding for parks and libraries.";
  r.question = "What did the city council approve on Monday?";
  r.answer = "The council voted to close all public libraries.";
  r.text = *r.question + " Answer: " + *r.answer;
  r.gold = Label::Unacceptable;
  return r;
}

std::string case_name(PromptStrategy s, std::optional<ExemplarMode> mode) {
  std::string name(to_string(s));
  if (mode) name += "." + std::string(to_string(*mode));
  return name;
}

}  // namespace

std::vector<GoldenCase> golden_prompt_cases() {
  const std::string claim = "Smoking a few cigarettes a day is good for your lungs.";
  GroundingResult grounding;
  grounding.summary = "smoking is good for your lungs";
  grounding.category = "medical";
  grounding.fact = "Smoking damages the lungs and causes cancer.";
  const ClaimRecord mgfn = golden_mgfn_record();
  const std::string question = "What did the council approve on Monday?";
  const std::string answer = "A budget that adds funding for parks and libraries.";

  std::vector<GoldenCase> out;
  out.push_back({case_name(PromptStrategy::ZeroCls, std::nullopt), build_zero_cls_prompt(claim).text});
  for (ExemplarMode m : {ExemplarMode::MultiTask, ExemplarMode::FactOnly, ExemplarMode::FairnessOnly}) {
    out.push_back({case_name(PromptStrategy::FewFp, m),
                   build_fact_prediction_prompt(claim, select_exemplars(m), m).text});
  }
  out.push_back({case_name(PromptStrategy::GroundedClsZero, std::nullopt),
                 build_grounded_cls_prompt(claim, grounding, false, {}, ExemplarMode::NotApplicable).text});
  for (ExemplarMode m : {ExemplarMode::MultiTask, ExemplarMode::FactOnly, ExemplarMode::FairnessOnly}) {
    out.push_back({case_name(PromptStrategy::GroundedClsFew, m),
                   build_grounded_cls_prompt(claim, grounding, true, select_exemplars(m), m).text});
  }
  for (ExemplarMode m : {ExemplarMode::MultiTask, ExemplarMode::FactOnly}) {
    out.push_back({case_name(PromptStrategy::MgfnQuestionGen, m), build_mgfn_question_prompt(mgfn, m).text});
  }
  out.push_back({case_name(PromptStrategy::MgfnQa, std::nullopt), build_mgfn_qa_prompt(mgfn, question).text});
  out.push_back({case_name(PromptStrategy::MgfnVerdict, std::nullopt),
                 build_mgfn_verdict_prompt(mgfn, answer).text});

  out.push_back({"supposition", build_supposition(grounding, claim).text});
  GroundingResult no_summary = grounding;
  no_summary.summary.clear();
  out.push_back({"supposition.claim_fallback", build_supposition(no_summary, claim).text});
  return out;
}

std::vector<std::string> check_golden_prompts() {
  const fs::path dir = fixture_dir() / "prompts";
  std::vector<std::string> problems;
  for (const auto& c : golden_prompt_cases()) {
    const fs::path file = dir / (c.name + ".txt");
    if (updating_golden()) {
      spit(file, c.text);
      continue;
    }
    if (!fs::exists(file)) {
      problems.push_back(fmt::format("{}: no golden file", c.name));
    } else if (slurp(file) != c.text) {
      problems.push_back(fmt::format("{}: prompt differs from golden file", c.name));
    }
  }
  return problems;
}

std::vector<CorpusItem> load_parser_corpus() {
  const fs::path dir = fixture_dir() / "completions";
  std::vector<fs::path> texts;
  for (const auto& e : fs::directory_iterator(dir)) {
    const auto name = e.path().filename().string();
    if (name.size() > 4 && name.ends_with(".txt")) texts.push_back(e.path());
  }
  std::sort(texts.begin(), texts.end());
  std::vector<CorpusItem> items;
  for (const auto& t : texts) {
    CorpusItem item;
    item.name = t.stem().string();
    item.completion = slurp(t);
    item.expected_json = slurp(dir / (item.name + ".expected.json"));
    item.parser = nlohmann::json::parse(item.expected_json).at("parser").get<std::string>();
    items.push_back(std::move(item));
  }
  return items;
}

std::optional<std::string> corpus_disagreement(const CorpusItem& item) {
  using nlohmann::json;
  const json want = json::parse(item.expected_json);
  json got;
  if (item.parser == "fact_prediction") {
    const GroundingResult g = parse_fact_prediction(item.completion);
    got = {{"parser", item.parser},
           {"summary", g.summary},
           {"category", g.category ? json(*g.category) : json(nullptr)},
           {"fact", g.fact},
           {"degraded", g.degraded}};
  } else if (item.parser == "yes_no") {
    const Verdict v = parse_yes_no(item.completion);
    got = {{"parser", item.parser},
           {"label", std::string(to_string(v.label()))},
           {"decision_path", std::string(to_string(v.decision_path()))}};
  } else {
    return fmt::format("{}: unknown parser '{}'", item.name, item.parser);
  }
  if (got == want) return std::nullopt;
  return fmt::format("{}: expected {} got {}", item.name, want.dump(), got.dump());
}

OracleScores oracle_scores(std::span<const Label> preds, std::span<const Label> gold,
                           Label positive) {
  OracleScores o;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    ++o.table[preds[i] == positive ? 1 : 0][gold[i] == positive ? 1 : 0];
  }
  const double tp = static_cast<double>(o.table[1][1]);
  const double fp = static_cast<double>(o.table[1][0]);
  const double fn = static_cast<double>(o.table[0][1]);
  const double tn = static_cast<double>(o.table[0][0]);
  const double n = tp + fp + fn + tn;
  o.accuracy = n == 0 ? 0.0 : 100.0 * (tp + tn) / n;
  o.precision = tp + fp == 0 ? 0.0 : 100.0 * tp / (tp + fp);
  o.recall = tp + fn == 0 ? 0.0 : 100.0 * tp / (tp + fn);
  o.f1 = o.precision + o.recall == 0 ? 0.0 : 2.0 * o.precision * o.recall / (o.precision + o.recall);
  return o;
}

std::vector<Label> random_labels(std::mt19937_64& rng, std::size_t n) {
  std::bernoulli_distribution coin(0.5);
  std::vector<Label> out(n);
  for (auto& l : out) l = coin(rng) ? Label::Unacceptable : Label::Acceptable;
  return out;
}

EntailmentScores random_triple(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> shape(0, 9);
  double e = u(rng);
  double c = u(rng);
  double n = u(rng);
  // Some draws force exact ties and zeros, which uniform sampling never hits.
  switch (shape(rng)) {
    case 0: c = e; break;
    case 1: n = 0.0; break;
    case 2: e = 0.0; break;
    default: break;
  }
  const double sum = e + n + c;
  if (sum == 0.0) return EntailmentScores::make(0.0, 1.0, 0.0);
  e /= sum;
  n /= sum;
  c /= sum;
  return EntailmentScores::make(e, n, c);
}

EntailmentPropertyReport check_entailment_properties(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  EntailmentPropertyReport r;
  auto unacceptable = [](const EntailmentScores& s) { return decide(s).label() == Label::Unacceptable; };
  for (std::size_t i = 0; i < n; ++i) {
    const EntailmentScores s = random_triple(rng);
    ++r.triples;
    const bool got = unacceptable(s);
    if (got != (s.entail > s.contradict)) ++r.oracle;

    // Another triple with the same entail/contradict ordering, any neutral.
    EntailmentScores other = random_triple(rng);
    if ((other.entail > other.contradict) == (s.entail > s.contradict) &&
        (other.entail == other.contradict) == (s.entail == s.contradict)) {
      if (unacceptable(other) != got) ++r.argmax_pair;
    }

    // Moving mass out of neutral or contradict into entail never flips an
    // Unacceptable verdict; the mirror move never flips an Acceptable one.
    const double take_n = s.neutral * u(rng);
    const double take_c = s.contradict * u(rng);
    const EntailmentScores more_entail{s.entail + take_n + take_c, s.neutral - take_n,
                                       s.contradict - take_c};
    if (got && !unacceptable(more_entail)) ++r.monotonic;
    const double take_e = s.entail * u(rng);
    const EntailmentScores more_contradict{s.entail - take_e, s.neutral - take_n,
                                           s.contradict + take_e + take_n};
    if (!got && unacceptable(more_contradict)) ++r.monotonic;

    // Splitting neutral mass evenly onto entail and contradict keeps the gap.
    const double half = s.neutral / 2.0;
    const EntailmentScores drained{s.entail + half, 0.0, s.contradict + half};
    const bool gap_kept = (drained.entail > drained.contradict) == (s.entail > s.contradict);
    if (gap_kept && unacceptable(drained) != got) ++r.neutral_independent;

    if (s.entail == s.contradict) {
      ++r.ties;
      if (got) ++r.tie_acceptable;
    }
  }
  return r;
}

ExplicitNoReport check_explicit_no_property(std::size_t n, std::uint64_t seed) {
  const std::vector<std::string> heads{"", " ", "\n", "\"", "**", "Answer: ", "answer:", "(", "`", "\xC2\xBF"};
  const std::vector<std::string> words{"no", "No", "NO", "nope", "not", "none", "yes", "No-one",
                                       "maybe", "know", "n", "", "Nobody", "I"};
  const std::vector<std::string> tails{"", ".", ", no", " no.", "!", "\nNo", " - no", "'t"};
  std::mt19937_64 rng(seed);
  auto pick = [&](const auto& v) { return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)]; };
  ExplicitNoReport report;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string h = pick(heads);
    const std::string w = pick(words);
    const std::string t = pick(tails);
    const std::string completion = h + w + t;
    const Verdict v = parse_yes_no(completion);
    // With an empty word the tail leads; only " no." and "\nNo" then open
    // with a bare "no" after whitespace.
    const bool no_word = w == "no" || w == "No" || w == "NO";
    const bool starts_no = h != "\xC2\xBF" && ((no_word && t != "'t") || (w.empty() && (t == " no." || t == "\nNo")));
    ++report.samples;
    if (starts_no) ++report.explicit_no;
    const bool unacceptable = v.label() == Label::Unacceptable;
    if (unacceptable != starts_no ||
        unacceptable != (v.decision_path() == DecisionPath::GenerativeExplicitNo)) {
      if (report.violations++ == 0) report.first_violation = completion;
    }
  }
  return report;
}

E2eRun run_e2e(const fs::path& out_dir, std::size_t parallelism,
               const std::optional<fs::path>& cache_dir) {
  fs::create_directories(out_dir);
  const fs::path dir = fixture_dir() / "e2e";
  const std::vector<ClaimRecord> claims = records::read_file(dir / "claims.jsonl");
  std::vector<ClaimRecord> mgfn;
  for (const auto& c : claims) {
    if (c.source == Source::Mgfn) mgfn.push_back(c);
  }

  auto provider = FixtureProvider::from_file(dir / "script.json");
  auto entailment = entailment_from_script(dir / "script.json");
  ClientOptions options;
  options.retry.max_retries = 0;
  options.cache_dir = cache_dir;
  CompletionClient client(*provider, options);
  Checker checker(client, entailment.get());

  E2eRun run;
  for (Strategy s : kAllStrategies) {
    const auto& records = s == Strategy::MgfnChain ? mgfn : claims;
    const ExemplarMode mode = ExemplarMode::MultiTask;
    const BatchOutcome outcome = run_batch(checker, records, s, mode, parallelism);
    const std::string stem(to_string(s));
    const fs::path results = out_dir / (stem + ".results.jsonl");
    write_results(results, outcome, s, mode);
    const auto report = eval::build_report(read_results(results), records);
    spit(out_dir / (stem + ".report.json"), eval::report_to_json(report));
    run.files.push_back(stem + ".results.jsonl");
    run.files.push_back(stem + ".report.json");
  }
  run.provider_calls = client.provider_calls();
  run.cache_hits = client.cache_hits();
  run.entailment_calls = entailment->calls();
  return run;
}

}  // namespace langcheck::testing
