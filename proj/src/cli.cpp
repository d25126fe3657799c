#include "langcheck/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <map>
#include <memory>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "langcheck/cache.hpp"
#include "langcheck/client.hpp"
#include "langcheck/datasets.hpp"
#include "langcheck/errors.hpp"
#include "langcheck/evaluation.hpp"
#include "langcheck/pipeline.hpp"
#include "langcheck/provider.hpp"
#include "langcheck/record_io.hpp"
#include "langcheck/text.hpp"

namespace langcheck::cli {
namespace {

class UsageError : public Error {
 public:
  using Error::Error;
};

using ConfigFile = std::map<std::string, std::string, std::less<>>;

constexpr std::string_view kConfigKeys[] = {
    "provider", "api_key", "base_url", "model", "entailment", "cache", "rpm", "max_retries",
    "timeout_seconds", "script",
};

// key = value lines; '#' starts a comment line.
ConfigFile read_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config file '{}'", path.string()));
  ConfigFile cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t(text::trim(line));
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(fmt::format("{}:{}: expected key = value", path.string(), lineno));
    }
    std::string key(text::trim(std::string_view(t).substr(0, eq)));
    std::string value(text::trim(std::string_view(t).substr(eq + 1)));
    if (std::find(std::begin(kConfigKeys), std::end(kConfigKeys), key) == std::end(kConfigKeys)) {
      throw ConfigError(fmt::format("{}:{}: unknown key '{}'", path.string(), lineno, key));
    }
    cfg[key] = value;
  }
  return cfg;
}

// flag > environment > config file
struct Settings {
  const EnvLookup& env;
  ConfigFile file;

  std::optional<std::string> get(const std::string& flag, std::initializer_list<std::string_view> vars,
                                 std::string_view key) const {
    if (!flag.empty()) return flag;
    for (auto var : vars) {
      if (auto v = env(var); v && !v->empty()) return v;
    }
    if (auto it = file.find(key); it != file.end()) return it->second;
    return std::nullopt;
  }
};

double parse_number(const std::string& value, std::string_view what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size() || v < 0) throw std::invalid_argument(value);
    return v;
  } catch (const std::logic_error&) {
    throw ConfigError(fmt::format("invalid {} '{}'", what, value));
  }
}

struct IngestArgs {
  std::string dataset;
  std::string in;
  std::string out;
  std::optional<double> threshold;
  bool no_count_check = false;
  std::size_t sample = 0;
  std::uint64_t seed = 0;
};

struct CheckArgs {
  std::string strategy;
  std::string mode = "multi";
  std::string in;
  std::string out;
  std::size_t parallelism = 1;
  std::string provider;
  std::string script;
  std::string cache;
  std::string entailment;
  std::string rpm;
  std::string max_retries;
  std::string model;
  std::string base_url;
  std::string config;
};

struct EvalArgs {
  std::string results;
  std::string gold;
  bool tables = false;
  std::string out;
  std::string histogram;
};

struct CacheArgs {
  std::string action;
  std::string dir;
  std::string archive;
};

void write_text(const std::filesystem::path& path, std::string_view body) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
  f << body;
  if (!f.flush()) throw IoError(fmt::format("write to '{}' failed", path.string()));
}

int cmd_ingest(const IngestArgs& a, std::ostream& out) {
  const Source source = [&] {
    try {
      return source_from_string(a.dataset);
    } catch (const InputError& e) {
      throw UsageError(e.what());
    }
  }();
  datasets::LoadOptions opts;
  opts.check_counts = !a.no_count_check && a.sample == 0;
  if (a.threshold) {
    if (source != Source::Toxigen) throw UsageError("--threshold applies to toxigen only");
    opts.toxigen_threshold = *a.threshold;
  }
  datasets::Dataset ds = datasets::load(source, a.in, opts);
  if (a.sample > 0) ds.records = datasets::stratified_sample(ds.records, a.sample, a.seed);
  records::write_file(a.out, ds.records);
  const auto ref = datasets::reference_counts(source);
  out << fmt::format("{}: {} records ({} acceptable, {} unacceptable), {} excluded\n",
                     to_string(source), ds.counts.total(), ds.counts.acceptable,
                     ds.counts.unacceptable, ds.excluded);
  if (!datasets::counts_enforced(source) && !(ds.counts == ref)) {
    out << fmt::format("note: reference split lists {} acceptable / {} unacceptable\n",
                       ref.acceptable, ref.unacceptable);
  }
  if (a.sample > 0) out << fmt::format("wrote a stratified sample of {}\n", ds.records.size());
  return kExitOk;
}

int cmd_check(const CheckArgs& a, std::ostream& out, std::ostream& err, const EnvLookup& env) {
  Settings s{env, a.config.empty() ? ConfigFile{} : read_config(a.config)};

  const Strategy strategy = [&] {
    try {
      return strategy_from_string(a.strategy);
    } catch (const InputError& e) {
      throw UsageError(e.what());
    }
  }();
  const ExemplarMode mode = [&] {
    try {
      const ExemplarMode m = exemplar_mode_from_string(a.mode);
      if (m == ExemplarMode::NotApplicable) throw InputError("mode must be multi, fact or fairness");
      return m;
    } catch (const InputError& e) {
      throw UsageError(e.what());
    }
  }();
  if (strategy == Strategy::MgfnChain && mode == ExemplarMode::FairnessOnly) {
    throw UsageError("the mgfn strategy takes --mode multi or fact");
  }
  if (a.parallelism == 0) throw UsageError("--parallelism must be at least 1");

  const std::vector<ClaimRecord> claims = records::read_file(a.in);
  if (strategy == Strategy::MgfnChain) {
    for (const auto& c : claims) {
      if (c.source != Source::Mgfn) {
        throw UsageError(fmt::format("--strategy mgfn needs mgfn records; '{}' is {}", c.id,
                                     to_string(c.source)));
      }
    }
  }

  const std::string provider_name = s.get(a.provider, {"LANGCHECK_PROVIDER"}, "provider").value_or("openai");
  const auto script = s.get(a.script, {"LANGCHECK_SCRIPT"}, "script");
  std::unique_ptr<CompletionProvider> provider;
  if (provider_name == "mock") {
    if (!script) throw UsageError("--provider mock needs --script");
    provider = FixtureProvider::from_file(*script);
  } else if (provider_name == "openai") {
    OpenAiConfig oc;
    oc.api_key = s.get("", {"LANGCHECK_API_KEY", "OPENAI_API_KEY"}, "api_key").value_or("");
    if (auto v = s.get(a.base_url, {"LANGCHECK_BASE_URL"}, "base_url")) oc.base_url = *v;
    if (auto v = s.get(a.model, {"LANGCHECK_MODEL"}, "model")) oc.model = *v;
    if (auto v = s.get("", {"LANGCHECK_TIMEOUT"}, "timeout_seconds")) {
      oc.timeout_seconds = static_cast<int>(parse_number(*v, "timeout"));
    }
    provider = std::make_unique<OpenAiProvider>(oc);
  } else {
    throw UsageError(fmt::format("unknown provider '{}' (expected mock or openai)", provider_name));
  }

  std::unique_ptr<EntailmentProvider> entailment;
  if (uses_entailment(strategy)) {
    const auto target = s.get(a.entailment, {"LANGCHECK_ENTAILMENT_URL"}, "entailment");
    if (target && *target != "mock") {
      entailment = std::make_unique<SidecarEntailmentProvider>(*target);
    } else if (script && (target || provider_name == "mock")) {
      entailment = entailment_from_script(*script);
    } else {
      throw UsageError(fmt::format("--strategy {} needs --entailment <url|mock>", a.strategy));
    }
  }

  ClientOptions co;
  if (auto v = s.get(a.rpm, {"LANGCHECK_RPM"}, "rpm")) co.requests_per_minute = parse_number(*v, "rpm");
  if (auto v = s.get(a.max_retries, {"LANGCHECK_MAX_RETRIES"}, "max_retries")) {
    co.retry.max_retries = static_cast<int>(parse_number(*v, "max_retries"));
  }
  if (auto v = s.get(a.cache, {"LANGCHECK_CACHE"}, "cache")) co.cache_dir = *v;

  CompletionClient client(*provider, co);
  Checker checker(client, entailment.get());
  const BatchOutcome outcome = run_batch(checker, claims, strategy, mode, a.parallelism);
  write_results(a.out, outcome, strategy, mode);

  for (const auto& e : outcome.entries) {
    if (e.error) err << "error: " << *e.error << "\n";
  }
  out << fmt::format("{} claims: {} ok, {} failed, {} degraded; {} provider calls, {} cache hits\n",
                     claims.size(), outcome.succeeded, outcome.failed, outcome.degraded,
                     client.provider_calls(), client.cache_hits());
  return kExitOk;
}

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  const auto results = read_results(a.results);
  const auto gold = records::read_file(a.gold);
  const eval::MetricsReport report = eval::build_report(results, gold);
  const std::string json = eval::report_to_json(report);
  if (!a.out.empty()) {
    write_text(a.out, json);
  } else if (!a.tables) {
    out << json;
  }
  if (!a.histogram.empty()) write_text(a.histogram, eval::histogram_csv(report));
  if (a.tables) out << eval::render_tables(report);
  return kExitOk;
}

int cmd_cache(const CacheArgs& a, std::ostream& out) {
  const DiskCache cache(a.dir);
  if (a.action == "stats") {
    out << fmt::format("{} entries\n", cache.size());
  } else if (a.action == "clear") {
    out << fmt::format("removed {} entries\n", cache.clear());
  } else if (a.action == "export" || a.action == "import") {
    if (a.archive.empty()) throw UsageError(fmt::format("cache {} needs --archive", a.action));
    const std::size_t n = a.action == "export" ? cache.export_to(a.archive) : cache.import_from(a.archive);
    out << fmt::format("{} {} entries\n", a.action == "export" ? "exported" : "imported", n);
  } else {
    throw UsageError(fmt::format("unknown cache action '{}'", a.action));
  }
  return kExitOk;
}

}  // namespace

std::optional<std::string> process_env(std::string_view name) {
  const char* v = std::getenv(std::string(name).c_str());
  if (v == nullptr) return std::nullopt;
  return std::string(v);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        const EnvLookup& env) {
  CLI::App app{"Claim checking with grounded prompting and entailment scoring", "langcheck"};
  app.require_subcommand(1);

  IngestArgs ia;
  auto* ingest = app.add_subcommand("ingest", "Convert a published corpus into claim records");
  ingest->add_option("dataset", ia.dataset, "hsd, sbic, climate, health, toxigen or mgfn")->required();
  ingest->add_option("--in", ia.in, "Corpus file or directory")->required();
  ingest->add_option("--out", ia.out, "Output records (.jsonl)")->required();
  ingest->add_option("--threshold", ia.threshold, "ToxiGen toxicity cut-off");
  ingest->add_flag("--no-count-check", ia.no_count_check, "Skip the split size check");
  ingest->add_option("--sample", ia.sample, "Keep a label-stratified sample of this size");
  ingest->add_option("--seed", ia.seed, "Sampling seed");

  CheckArgs ca;
  auto* check = app.add_subcommand("check", "Classify claim records");
  check->add_option("--strategy", ca.strategy,
                    "zero, fewfp-zero, fewfp-few, fewfp-entail-zero, fewfp-entail-few or mgfn")
      ->required();
  check->add_option("--mode", ca.mode, "Exemplar set: multi, fact or fairness")->capture_default_str();
  check->add_option("--in", ca.in, "Claim records (.jsonl)")->required();
  check->add_option("--out", ca.out, "Result file (.jsonl)")->required();
  check->add_option("--parallelism", ca.parallelism, "Worker threads")->capture_default_str();
  check->add_option("--provider", ca.provider, "mock or openai");
  check->add_option("--script", ca.script, "Mock provider script (JSON)");
  check->add_option("--cache", ca.cache, "Completion cache directory");
  check->add_option("--entailment", ca.entailment, "Sidecar URL, or mock for the script's scores");
  check->add_option("--rpm", ca.rpm, "Requests per minute (0 = unlimited)");
  check->add_option("--max-retries", ca.max_retries, "Retries for transient provider errors");
  check->add_option("--model", ca.model, "Remote model name");
  check->add_option("--base-url", ca.base_url, "Remote API base URL");
  check->add_option("--config", ca.config, "key = value settings file");

  EvalArgs ea;
  auto* evalc = app.add_subcommand("eval", "Score results against gold labels");
  evalc->add_option("--results", ea.results, "Result file")->required();
  evalc->add_option("--gold", ea.gold, "Gold claim records")->required();
  evalc->add_flag("--tables", ea.tables, "Print result tables");
  evalc->add_option("--out", ea.out, "Write the JSON report here");
  evalc->add_option("--histogram", ea.histogram, "Write the category histogram (CSV) here");

  CacheArgs ka;
  auto* cachec = app.add_subcommand("cache", "Inspect or move the completion cache");
  cachec->add_option("action", ka.action, "stats, clear, export or import")
      ->required()
      ->check(CLI::IsMember({"stats", "clear", "export", "import"}));
  cachec->add_option("--cache", ka.dir, "Cache directory")->required();
  cachec->add_option("--archive", ka.archive, "Archive file for export/import");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (ingest->parsed()) return cmd_ingest(ia, out);
    if (check->parsed()) return cmd_check(ca, out, err, env);
    if (evalc->parsed()) return cmd_eval(ea, out);
    return cmd_cache(ka, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return kExitFailure;
  } catch (const IoError& e) {
    err << "io error: " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace langcheck::cli
