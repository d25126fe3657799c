#include "langcheck/datasets.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <unordered_map>

#include <fmt/format.h>

#include "langcheck/errors.hpp"
#include "langcheck/table.hpp"
#include "langcheck/text.hpp"

namespace langcheck::datasets {
namespace fs = std::filesystem;
namespace {

// Collects kept rows and assigns ids in order.
class Builder {
 public:
  explicit Builder(Source source) { dataset_.source = source; }

  ClaimRecord& add(std::string_view raw_text, Label gold, std::string_view where) {
    ClaimRecord r;
    r.source = dataset_.source;
    r.text = text::normalize(raw_text);
    if (r.text.empty()) {
      throw IngestionError(fmt::format("{}: {} has empty claim text", to_string(dataset_.source), where));
    }
    r.gold = gold;
    r.id = make_id(dataset_.source, dataset_.records.size() + 1);
    (gold == Label::Acceptable ? dataset_.counts.acceptable : dataset_.counts.unacceptable) += 1;
    dataset_.records.push_back(std::move(r));
    return dataset_.records.back();
  }

  void exclude() { ++dataset_.excluded; }

  Dataset finish(const LoadOptions& options) && {
    if (dataset_.records.empty()) {
      throw IngestionError(fmt::format("{}: no records found", to_string(dataset_.source)));
    }
    if (options.check_counts && counts_enforced(dataset_.source)) {
      const ClassCounts want = reference_counts(dataset_.source);
      if (!(dataset_.counts == want)) {
        throw IngestionError(fmt::format(
            "{}: expected {} records ({} acceptable / {} unacceptable), got {} ({} / {})",
            to_string(dataset_.source), want.total(), want.acceptable, want.unacceptable,
            dataset_.counts.total(), dataset_.counts.acceptable, dataset_.counts.unacceptable));
      }
    }
    return std::move(dataset_);
  }

 private:
  Dataset dataset_;
};

const std::string& require_column(const table::Table& t, std::initializer_list<const char*> names,
                                  std::string_view what) {
  for (const char* n : names) {
    auto it = std::find(t.columns.begin(), t.columns.end(), n);
    if (it != t.columns.end()) return *it;
  }
  std::string wanted;
  for (const char* n : names) wanted += fmt::format("{}'{}'", wanted.empty() ? "" : " or ", n);
  throw IngestionError(fmt::format("{}: missing column {}", what, wanted));
}

std::string cell(const table::Row& row, const std::string& column) {
  auto it = row.find(column);
  return it == row.end() ? std::string() : it->second;
}

std::string row_name(std::size_t i) { return fmt::format("row {}", i + 1); }

double parse_score(std::string_view raw, std::string_view where) {
  std::string_view s = text::trim(raw);
  if (s.empty()) return 0.0;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw IngestionError(fmt::format("{}: '{}' is not a number", where, s));
  }
  return v;
}

table::Table read_nonempty(const fs::path& path, Source source) {
  if (!fs::exists(path)) {
    throw IngestionError(fmt::format("{}: '{}' does not exist", to_string(source), path.string()));
  }
  auto t = table::read_table(path);
  if (t.rows.empty()) {
    throw IngestionError(fmt::format("{}: '{}' holds no rows", to_string(source), path.string()));
  }
  return t;
}

std::optional<Label> hsd_label(std::string_view raw, std::string_view where) {
  const std::string v = text::ascii_lower(text::trim(raw));
  if (v == "hate") return Label::Unacceptable;
  if (v == "nohate") return Label::Acceptable;
  if (v == "relation" || v == "idk/skip") return std::nullopt;
  throw IngestionError(fmt::format("hsd {}: unknown label '{}'", where, raw));
}

Dataset load_hsd_directory(const fs::path& dir, const LoadOptions& options) {
  const fs::path meta_path = dir / "annotations_metadata.csv";
  const fs::path test_dir = dir / "sampled_test";
  if (!fs::exists(meta_path) || !fs::is_directory(test_dir)) {
    throw IngestionError(fmt::format(
        "hsd: '{}' must contain annotations_metadata.csv and sampled_test/", dir.string()));
  }
  const auto meta = table::read_table(meta_path);
  const auto& id_col = require_column(meta, {"file_id"}, "hsd metadata");
  const auto& label_col = require_column(meta, {"label"}, "hsd metadata");
  std::unordered_map<std::string, std::string> labels;
  for (const auto& row : meta.rows) labels[cell(row, id_col)] = cell(row, label_col);

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(test_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  Builder b(Source::Hsd);
  for (const auto& f : files) {
    const std::string id = f.stem().string();
    auto it = labels.find(id);
    if (it == labels.end()) {
      throw IngestionError(fmt::format("hsd: no metadata label for '{}'", id));
    }
    if (auto label = hsd_label(it->second, id)) {
      b.add(table::read_text_file(f), *label, id);
    } else {
      b.exclude();
    }
  }
  return std::move(b).finish(options);
}

double best_threshold_hint(const std::vector<double>& scores, ClassCounts want,
                           std::vector<double>& matches) {
  std::set<double> distinct(scores.begin(), scores.end());
  std::vector<double> cut_points;
  double prev = -1e300;
  for (double s : distinct) {
    if (prev > -1e300) cut_points.push_back((prev + s) / 2.0);
    prev = s;
  }
  for (double t : cut_points) {
    std::size_t toxic = std::count_if(scores.begin(), scores.end(), [t](double s) { return s > t; });
    if (toxic == want.unacceptable && scores.size() - toxic == want.acceptable) matches.push_back(t);
  }
  return matches.empty() ? 0.0 : matches.front();
}

}  // namespace

ClassCounts reference_counts(Source source) {
  switch (source) {
    case Source::Hsd: return {239, 239};
    case Source::Sbic: return {1323, 3368};
    case Source::Climate: return {654, 253};
    case Source::Health: return {599, 388};
    case Source::Toxigen: return {406, 534};
    case Source::Mgfn: return {102, 107};
  }
  return {};
}

bool counts_enforced(Source source) { return source != Source::Sbic; }

std::string make_id(Source source, std::size_t ordinal) {
  return fmt::format("{}-{:05}", to_string(source), ordinal);
}

Dataset load_hsd(const fs::path& path, const LoadOptions& options) {
  if (fs::is_directory(path)) return load_hsd_directory(path, options);
  const auto t = read_nonempty(path, Source::Hsd);
  const auto& text_col = require_column(t, {"text"}, "hsd");
  const auto& label_col = require_column(t, {"label"}, "hsd");
  Builder b(Source::Hsd);
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    if (auto label = hsd_label(cell(t.rows[i], label_col), row_name(i))) {
      b.add(cell(t.rows[i], text_col), *label, row_name(i));
    } else {
      b.exclude();
    }
  }
  return std::move(b).finish(options);
}

Dataset load_sbic(const fs::path& path, const LoadOptions& options) {
  const auto t = read_nonempty(path, Source::Sbic);
  const auto& post_col = require_column(t, {"post"}, "sbic");
  const auto& sex_col = require_column(t, {"sexYN"}, "sbic");
  const auto& off_col = require_column(t, {"offensiveYN"}, "sbic");

  // Posts in first-appearance order; raw files carry one row per annotation.
  std::vector<std::string> order;
  std::unordered_map<std::string, bool> positive;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& row = t.rows[i];
    const std::string post = text::normalize(cell(row, post_col));
    const double sex = parse_score(cell(row, sex_col), "sbic " + row_name(i));
    const double off = parse_score(cell(row, off_col), "sbic " + row_name(i));
    auto [it, inserted] = positive.try_emplace(post, false);
    if (inserted) order.push_back(post);
    it->second = it->second || sex > 0.0 || off > 0.0;
  }
  Builder b(Source::Sbic);
  for (std::size_t i = 0; i < order.size(); ++i) {
    b.add(order[i], positive[order[i]] ? Label::Unacceptable : Label::Acceptable,
          fmt::format("post {}", i + 1));
  }
  return std::move(b).finish(options);
}

Dataset load_climate(const fs::path& path, const LoadOptions& options) {
  const auto t = read_nonempty(path, Source::Climate);
  const auto& claim_col = require_column(t, {"claim"}, "climate");
  const auto& label_col = require_column(t, {"claim_label", "label"}, "climate");
  Builder b(Source::Climate);
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const std::string raw = cell(t.rows[i], label_col);
    const std::string v = text::ascii_lower(text::trim(raw));
    if (v == "supports" || v == "0") {
      b.add(cell(t.rows[i], claim_col), Label::Acceptable, row_name(i));
    } else if (v == "refutes" || v == "1") {
      b.add(cell(t.rows[i], claim_col), Label::Unacceptable, row_name(i));
    } else if (v == "disputed" || v == "not_enough_info" || v == "2" || v == "3") {
      b.exclude();
    } else {
      throw IngestionError(fmt::format("climate {}: unknown label '{}'", row_name(i), raw));
    }
  }
  return std::move(b).finish(options);
}

Dataset load_health(const fs::path& path, const LoadOptions& options) {
  const auto t = read_nonempty(path, Source::Health);
  const auto& claim_col = require_column(t, {"claim"}, "health");
  const auto& label_col = require_column(t, {"label"}, "health");
  Builder b(Source::Health);
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const std::string raw = cell(t.rows[i], label_col);
    const std::string v = text::ascii_lower(text::trim(raw));
    if (v == "true") {
      b.add(cell(t.rows[i], claim_col), Label::Acceptable, row_name(i));
    } else if (v == "false") {
      b.add(cell(t.rows[i], claim_col), Label::Unacceptable, row_name(i));
    } else if (v == "mixture" || v == "mixed" || v == "unproven" || v == "unknown") {
      b.exclude();
    } else {
      throw IngestionError(fmt::format("health {}: unknown label '{}'", row_name(i), raw));
    }
  }
  return std::move(b).finish(options);
}

Dataset load_toxigen(const fs::path& path, const LoadOptions& options) {
  const auto t = read_nonempty(path, Source::Toxigen);
  const auto& text_col = require_column(t, {"text"}, "toxigen");
  const auto& score_col = require_column(t, {"toxicity_human"}, "toxigen");
  Builder b(Source::Toxigen);
  std::vector<double> scores;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const double score = parse_score(cell(t.rows[i], score_col), "toxigen " + row_name(i));
    scores.push_back(score);
    b.add(cell(t.rows[i], text_col),
          score > options.toxigen_threshold ? Label::Unacceptable : Label::Acceptable, row_name(i));
  }
  try {
    return std::move(b).finish(options);
  } catch (const IngestionError& e) {
    std::vector<double> matches;
    best_threshold_hint(scores, reference_counts(Source::Toxigen), matches);
    if (matches.empty()) throw;
    std::string hint;
    for (double m : matches) hint += fmt::format("{}{:.4g}", hint.empty() ? "" : ", ", m);
    throw IngestionError(fmt::format("{}; thresholds reproducing the reference split: {}",
                                     e.what(), hint));
  }
}

Dataset load_mgfn(const fs::path& path, const LoadOptions& options) {
  const auto t = read_nonempty(path, Source::Mgfn);
  const auto& doc_col = require_column(t, {"article", "document", "context"}, "mgfn");
  const auto& question_col = require_column(t, {"question"}, "mgfn");
  const auto& answer_col = require_column(t, {"answer", "generated_answer"}, "mgfn");
  const auto& label_col = require_column(t, {"label"}, "mgfn");
  Builder b(Source::Mgfn);
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& row = t.rows[i];
    const std::string where = "mgfn " + row_name(i);
    std::string document = text::normalize(cell(row, doc_col));
    std::string question = text::normalize(cell(row, question_col));
    std::string answer = text::normalize(cell(row, answer_col));
    if (document.empty()) throw IngestionError(where + ": missing article text");
    if (question.empty()) throw IngestionError(where + ": missing question");
    if (answer.empty()) throw IngestionError(where + ": missing answer");
    const std::string raw = cell(row, label_col);
    const std::string v = text::ascii_lower(text::trim(raw));
    Label gold;
    if (v == "fake") {
      gold = Label::Unacceptable;
    } else if (v == "real") {
      gold = Label::Acceptable;
    } else {
      throw IngestionError(fmt::format("{}: unknown label '{}'", where, raw));
    }
    ClaimRecord& r = b.add(fmt::format("{} Answer: {}", question, answer), gold, where);
    r.document = std::move(document);
    r.question = std::move(question);
    r.answer = std::move(answer);
  }
  return std::move(b).finish(options);
}

Dataset load(Source source, const fs::path& path, const LoadOptions& options) {
  switch (source) {
    case Source::Hsd: return load_hsd(path, options);
    case Source::Sbic: return load_sbic(path, options);
    case Source::Climate: return load_climate(path, options);
    case Source::Health: return load_health(path, options);
    case Source::Toxigen: return load_toxigen(path, options);
    case Source::Mgfn: return load_mgfn(path, options);
  }
  throw InputError("unknown dataset");
}

std::vector<ClaimRecord> stratified_sample(const std::vector<ClaimRecord>& records, std::size_t n,
                                           std::uint64_t seed) {
  if (n >= records.size()) return records;
  std::map<int, std::vector<std::size_t>> strata;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const int key = records[i].gold ? static_cast<int>(*records[i].gold) : -1;
    strata[key].push_back(i);
  }
  // Largest-remainder allocation of n across strata.
  std::vector<std::pair<int, std::size_t>> quota;
  std::vector<std::pair<double, int>> remainders;
  std::size_t assigned = 0;
  for (const auto& [key, idx] : strata) {
    const double exact = static_cast<double>(n) * idx.size() / records.size();
    const auto whole = static_cast<std::size_t>(std::floor(exact));
    quota.emplace_back(key, whole);
    remainders.emplace_back(exact - whole, key);
    assigned += whole;
  }
  std::sort(remainders.begin(), remainders.end(),
            [](const auto& a, const auto& b) { return a.first > b.first || (a.first == b.first && a.second < b.second); });
  for (std::size_t k = 0; assigned < n && k < remainders.size(); ++k, ++assigned) {
    for (auto& [key, q] : quota) {
      if (key == remainders[k].second) ++q;
    }
  }
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> chosen;
  for (const auto& [key, q] : quota) {
    auto idx = strata[key];
    std::shuffle(idx.begin(), idx.end(), rng);
    chosen.insert(chosen.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(q));
  }
  std::sort(chosen.begin(), chosen.end());
  std::vector<ClaimRecord> out;
  out.reserve(chosen.size());
  for (std::size_t i : chosen) out.push_back(records[i]);
  return out;
}

}  // namespace langcheck::datasets
