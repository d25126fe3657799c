#include "langcheck/evaluation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <unordered_map>

#include <fmt/format.h>
#include <json.hpp>

#include "langcheck/errors.hpp"

namespace langcheck::eval {
namespace {

using ordered_json = nlohmann::ordered_json;

double pct(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : 100.0 * static_cast<double>(num) / static_cast<double>(den);
}

double f1_of(double precision, double recall) {
  return precision + recall == 0.0 ? 0.0 : 2.0 * precision * recall / (precision + recall);
}

std::string cell(std::optional<double> v, int width) {
  return v ? fmt::format("{:>{}.2f}", round2(*v), width) : fmt::format("{:>{}}", "-", width);
}

const TaskReport* find_task(const MetricsReport& report, Source s) {
  for (const auto& t : report.tasks) {
    if (t.source == s && t.scored > 0) return &t;
  }
  return nullptr;
}

constexpr double kNa = -1.0;

}  // namespace

ConfusionCounts confusion(std::span<const Label> preds, std::span<const Label> gold,
                          Label positive) {
  if (preds.size() != gold.size()) {
    throw InputError(fmt::format("{} predictions vs {} gold labels", preds.size(), gold.size()));
  }
  ConfusionCounts c;
  c.positive = positive;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const bool p = preds[i] == positive;
    const bool g = gold[i] == positive;
    if (p && g) {
      ++c.tp;
    } else if (p) {
      ++c.fp;
    } else if (g) {
      ++c.fn;
    } else {
      ++c.tn;
    }
  }
  return c;
}

BinaryScores score(std::span<const Label> preds, std::span<const Label> gold, Label positive) {
  if (preds.empty() && gold.empty()) throw InputError("cannot score an empty prediction list");
  BinaryScores s;
  s.counts = confusion(preds, gold, positive);
  const auto& c = s.counts;
  s.accuracy = pct(c.tp + c.tn, c.total());
  s.precision = pct(c.tp, c.tp + c.fp);
  s.recall = pct(c.tp, c.tp + c.fn);
  s.f1 = f1_of(s.precision, s.recall);
  return s;
}

double macro_f1(double f1_positive, double f1_negative) { return (f1_positive + f1_negative) / 2.0; }

GroupAverages aggregate(const std::map<Source, TaskScore>& per_task) {
  auto get = [&](Source s) {
    auto it = per_task.find(s);
    if (it == per_task.end()) {
      throw DataError(fmt::format("aggregation needs task '{}'", to_string(s)));
    }
    return it->second;
  };
  const TaskScore climate = get(Source::Climate);
  const TaskScore health = get(Source::Health);
  const TaskScore hsd = get(Source::Hsd);
  const TaskScore sbic = get(Source::Sbic);
  GroupAverages out;
  out.fact = {(climate.accuracy + health.accuracy) / 2.0, (climate.f1 + health.f1) / 2.0};
  out.fairness = {(hsd.accuracy + sbic.accuracy) / 2.0, (hsd.f1 + sbic.f1) / 2.0};
  out.all = {(climate.accuracy + health.accuracy + hsd.accuracy + sbic.accuracy) / 4.0,
             (climate.f1 + health.f1 + hsd.f1 + sbic.f1) / 4.0};
  return out;
}

std::vector<CategoryBucket> task_recognition(const std::vector<CheckResult>& results,
                                             std::span<const Label> gold) {
  if (results.size() != gold.size()) {
    throw InputError("task_recognition needs one gold label per result");
  }
  std::map<std::string, CategoryBucket> named;
  CategoryBucket none{std::string(kNoneBucket)};
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    if (!r.grounding) continue;
    CategoryBucket& b = r.grounding->category
                            ? named.try_emplace(*r.grounding->category,
                                                CategoryBucket{*r.grounding->category})
                                  .first->second
                            : none;
    ++b.count;
    if (r.verdict.label() == gold[i]) ++b.correct;
  }
  std::vector<CategoryBucket> ranked;
  for (auto& [name, bucket] : named) ranked.push_back(bucket);
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.count > b.count;
  });
  std::vector<CategoryBucket> out;
  CategoryBucket other{std::string(kOtherBucket)};
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    if (i < kMaxCategories) {
      out.push_back(ranked[i]);
    } else {
      other.count += ranked[i].count;
      other.correct += ranked[i].correct;
    }
  }
  if (other.count > 0) out.push_back(other);
  if (none.count > 0) out.push_back(none);
  for (auto& b : out) b.accuracy = pct(b.correct, b.count);
  return out;
}

MetricsReport build_report(const std::vector<BatchEntry>& results,
                           const std::vector<ClaimRecord>& gold) {
  std::unordered_map<std::string, const ClaimRecord*> by_id;
  for (const auto& g : gold) {
    if (!g.gold) throw DataError(fmt::format("gold record '{}' has no label", g.id));
    if (!by_id.emplace(g.id, &g).second) throw DataError(fmt::format("duplicate gold id '{}'", g.id));
  }

  struct Bucket {
    std::size_t records = 0;
    std::size_t failed = 0;
    std::vector<Label> preds;
    std::vector<Label> golds;
    std::vector<CheckResult> results;
  };
  std::map<Source, Bucket> buckets;
  for (const auto& g : gold) ++buckets[g.source].records;

  std::set<std::string> seen;
  for (const auto& entry : results) {
    auto it = by_id.find(entry.claim_id);
    if (it == by_id.end()) throw DataError(fmt::format("result for unknown claim id '{}'", entry.claim_id));
    if (!seen.insert(entry.claim_id).second) {
      throw DataError(fmt::format("duplicate result for claim id '{}'", entry.claim_id));
    }
    Bucket& b = buckets[it->second->source];
    if (!entry.result) {
      ++b.failed;
      continue;
    }
    b.preds.push_back(entry.result->verdict.label());
    b.golds.push_back(*it->second->gold);
    b.results.push_back(*entry.result);
  }

  MetricsReport report;
  std::map<Source, TaskScore> four;
  for (auto& [source, b] : buckets) {
    TaskReport t;
    t.source = source;
    t.records = b.records;
    t.scored = b.preds.size();
    t.failed = b.records - t.scored;
    t.degraded = static_cast<std::size_t>(std::count_if(
        b.results.begin(), b.results.end(), [](const CheckResult& r) { return r.degraded; }));
    if (t.scored > 0) {
      const BinaryScores pos = score(b.preds, b.golds, Label::Unacceptable);
      const BinaryScores neg = score(b.preds, b.golds, Label::Acceptable);
      t.accuracy = pos.accuracy;
      t.precision = pos.precision;
      t.recall = pos.recall;
      t.f1 = pos.f1;
      t.f1_acceptable = neg.f1;
      t.macro_f1 = macro_f1(pos.f1, neg.f1);
      t.counts = pos.counts;
      t.categories = task_recognition(b.results, b.golds);
      if (source == Source::Climate || source == Source::Health || source == Source::Hsd ||
          source == Source::Sbic) {
        four[source] = {t.accuracy, t.f1};
      }
    }
    report.failed += t.failed;
    report.degraded += t.degraded;
    report.tasks.push_back(std::move(t));
  }
  if (four.size() == 4) report.averages = aggregate(four);
  return report;
}

double round2(double value) {
  const double scaled = value * 100.0;
  double whole = std::floor(scaled);
  if (scaled - whole >= 0.5 - 1e-9) whole += 1.0;
  return whole / 100.0;
}

std::string report_to_json(const MetricsReport& report) {
  ordered_json j;
  j["tasks"] = ordered_json::array();
  for (const auto& t : report.tasks) {
    ordered_json tj;
    tj["task"] = std::string(to_string(t.source));
    tj["records"] = t.records;
    tj["scored"] = t.scored;
    tj["failed"] = t.failed;
    tj["degraded"] = t.degraded;
    tj["accuracy"] = t.accuracy;
    tj["precision"] = t.precision;
    tj["recall"] = t.recall;
    tj["f1"] = t.f1;
    tj["f1_acceptable"] = t.f1_acceptable;
    tj["macro_f1"] = t.macro_f1;
    tj["confusion"] = {{"positive", std::string(to_string(t.counts.positive))},
                       {"tp", t.counts.tp},
                       {"fp", t.counts.fp},
                       {"fn", t.counts.fn},
                       {"tn", t.counts.tn}};
    tj["categories"] = ordered_json::array();
    for (const auto& c : t.categories) {
      tj["categories"].push_back(ordered_json{{"category", c.category},
                                              {"count", c.count},
                                              {"correct", c.correct},
                                              {"accuracy", c.accuracy}});
    }
    j["tasks"].push_back(std::move(tj));
  }
  if (report.averages) {
    auto pair = [](const TaskScore& s) { return ordered_json{{"accuracy", s.accuracy}, {"f1", s.f1}}; };
    j["averages"] = {{"fact", pair(report.averages->fact)},
                     {"fairness", pair(report.averages->fairness)},
                     {"all", pair(report.averages->all)}};
  } else {
    j["averages"] = nullptr;
  }
  j["failed"] = report.failed;
  j["degraded"] = report.degraded;
  return j.dump(2) + "\n";
}

std::string render_tables(const MetricsReport& report) {
  std::string out;
  const int w = 8;

  // Fact and fairness checking on human-written claims.
  out += "Fact and fairness checking (F1: fake-F1 for fact tasks, unfair-F1 for fairness tasks)\n";
  out += fmt::format("{:<14}", "Model");
  for (std::string_view h : {"Climate", "PubHealth", "Fact Avg.", "Hate speech", "SBIC",
                             "Fairness Avg.", "All Avg."}) {
    out += fmt::format(" | {:^{}}", h, 2 * w + 1);
  }
  out += "\n" + fmt::format("{:<14}", "Metric (%)");
  for (int i = 0; i < 7; ++i) out += fmt::format(" | {:>{}} {:>{}}", "Acc.", w, "F1", w);
  out += "\n";

  auto opt = [](double v) { return v == kNa ? std::optional<double>() : std::optional<double>(v); };
  const std::array<double, 14> baseline{63.95, 55.99, 62.61, 64.07, 63.28, 60.03, 78.0,
                                        76.0,  kNa,   78.8,  kNa,   77.4,  kNa,   68.75};
  out += fmt::format("{:<14}", "Baseline*");
  for (std::size_t i = 0; i < baseline.size(); i += 2) {
    out += fmt::format(" | {} {}", cell(opt(baseline[i]), w), cell(opt(baseline[i + 1]), w));
  }
  out += "\n" + fmt::format("{:<14}", "This run");
  auto task_pair = [&](Source s) {
    const TaskReport* t = find_task(report, s);
    return t ? fmt::format(" | {} {}", cell(t->accuracy, w), cell(t->f1, w))
             : fmt::format(" | {} {}", cell(std::nullopt, w), cell(std::nullopt, w));
  };
  auto avg_pair = [&](auto pick) {
    if (!report.averages) return fmt::format(" | {} {}", cell(std::nullopt, w), cell(std::nullopt, w));
    const TaskScore s = pick(*report.averages);
    return fmt::format(" | {} {}", cell(s.accuracy, w), cell(s.f1, w));
  };
  out += task_pair(Source::Climate);
  out += task_pair(Source::Health);
  out += avg_pair([](const GroupAverages& a) { return a.fact; });
  out += task_pair(Source::Hsd);
  out += task_pair(Source::Sbic);
  out += avg_pair([](const GroupAverages& a) { return a.fairness; });
  out += avg_pair([](const GroupAverages& a) { return a.all; });
  out += "\n* retrieval + stance detection for fact tasks; cited supervised results for fairness tasks.\n\n";

  auto four_col = [&](std::string_view title, std::string_view pos, std::string_view neg,
                      std::vector<std::pair<std::string_view, std::array<double, 4>>> cited, Source s) {
    out += fmt::format("{}\n{:<22} | {:>{}} | {:>{}} | {:>{}} | {:>{}}\n", title, "Model", "Acc", w,
                       pos, w + 2, neg, w + 2, "Macro-F1", w + 2);
    for (const auto& [name, v] : cited) {
      out += fmt::format("{:<22} | {} | {} | {} | {}\n", name, cell(v[0], w), cell(v[1], w + 2),
                         cell(v[2], w + 2), cell(v[3], w + 2));
    }
    const TaskReport* t = find_task(report, s);
    out += fmt::format("{:<22} | {} | {} | {} | {}\n\n", "This run",
                       cell(t ? std::optional(t->accuracy) : std::nullopt, w),
                       cell(t ? std::optional(t->f1) : std::nullopt, w + 2),
                       cell(t ? std::optional(t->f1_acceptable) : std::nullopt, w + 2),
                       cell(t ? std::optional(t->macro_f1) : std::nullopt, w + 2));
  };
  four_col("Machine-generated toxic statements (ToxiGen)", "Toxic-F1", "Benign-F1",
           {{"Finetuned HateBERT", {80.96, 79.26, 82.40, 80.82}},
            {"Finetuned RoBERTa", {80.96, 74.32, 84.87, 79.59}}},
           Source::Toxigen);
  four_col("Machine-generated fake news (MGFN)", "Fake-F1", "Real-F1",
           {{"Finetuned Grover-Mega", {71.00, 71.50, 70.50, 71.00}}}, Source::Mgfn);

  out += fmt::format("Failed claims: {}  Degraded groundings: {}\n", report.failed, report.degraded);
  return out;
}

std::string histogram_csv(const MetricsReport& report) {
  std::string out = "task,category,count,correct,accuracy\n";
  for (const auto& t : report.tasks) {
    for (const auto& c : t.categories) {
      std::string name = c.category;
      if (name.find_first_of(",\"\n") != std::string::npos) {
        std::string quoted = "\"";
        for (char ch : name) {
          if (ch == '"') quoted += '"';
          quoted += ch;
        }
        name = quoted + "\"";
      }
      out += fmt::format("{},{},{},{},{:.2f}\n", to_string(t.source), name, c.count, c.correct,
                         round2(c.accuracy));
    }
  }
  return out;
}

}  // namespace langcheck::eval
