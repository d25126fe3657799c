#include <map>
#include <sstream>

#include <gtest/gtest.h>

#include "langcheck/cli.hpp"
#include "langcheck/record_io.hpp"
#include "support.hpp"

namespace langcheck::cli {
namespace {

namespace fs = std::filesystem;

struct CliRun {
  int status;
  std::string out;
  std::string err;
};

CliRun invoke(std::vector<std::string> args, std::map<std::string, std::string> env = {}) {
  std::ostringstream out, err;
  const int status = run(args, out, err, [&](std::string_view name) -> std::optional<std::string> {
    auto it = env.find(std::string(name));
    if (it == env.end()) return std::nullopt;
    return it->second;
  });
  return {status, out.str(), err.str()};
}

fs::path e2e(std::string_view name) { return testing::fixture_dir() / "e2e" / name; }

std::vector<std::string> mock_check(const fs::path& out, std::string strategy = "fewfp-few") {
  return {"check", "--strategy", std::move(strategy), "--in", e2e("claims.jsonl").string(), "--out", out.string(),
          "--provider", "mock", "--script", e2e("script.json").string(), "--entailment", "mock"};
}

std::size_t line_count(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

TEST(Cli, HelpAndUsage) {
  EXPECT_EQ(invoke({"--help"}).status, kExitOk);
  EXPECT_EQ(invoke({}).status, kExitUsage);
  EXPECT_EQ(invoke({"frobnicate"}).status, kExitUsage);
  EXPECT_EQ(invoke({"check", "--strategy", "nope", "--in", "x", "--out", "y"}).status, kExitUsage);
}

TEST(Cli, MockCheckWritesOneLinePerClaim) {
  testing::TempDir dir;
  for (const char* strategy : {"zero", "fewfp-zero", "fewfp-few", "fewfp-entail-zero", "fewfp-entail-few"}) {
    const auto out = dir / (std::string(strategy) + ".jsonl");
    const CliRun r = invoke(mock_check(out, strategy));
    ASSERT_EQ(r.status, kExitOk) << strategy << ": " << r.err;
    EXPECT_EQ(line_count(testing::slurp(out)), 12u);
    EXPECT_NE(r.out.find("12 claims: 12 ok, 0 failed"), std::string::npos) << r.out;
  }
}

TEST(Cli, MgfnOnlyOnMgfnRecords) {
  testing::TempDir dir;
  const CliRun r = invoke(mock_check(dir / "r.jsonl", "mgfn"));
  EXPECT_EQ(r.status, kExitUsage);
  EXPECT_NE(r.err.find("usage error:"), std::string::npos) << r.err;
}

TEST(Cli, MissingApiKeyIsConfigError) {
  testing::TempDir dir;
  const CliRun r = invoke({"check", "--strategy", "zero", "--in", e2e("claims.jsonl").string(), "--out",
                        (dir / "r.jsonl").string()});
  EXPECT_EQ(r.status, kExitUsage);
  EXPECT_NE(r.err.find("config error:"), std::string::npos) << r.err;
}

TEST(Cli, ConfigPrecedence) {
  testing::TempDir dir;
  testing::spit(dir / "settings.conf", "# mock everything\nprovider = mock\nscript = " +
                                           e2e("script.json").string() + "\nentailment = mock\n");
  const std::vector<std::string> base{"check", "--strategy", "zero", "--in", e2e("claims.jsonl").string(),
                                      "--out", (dir / "r.jsonl").string(), "--config",
                                      (dir / "settings.conf").string()};
  EXPECT_EQ(invoke(base).status, kExitOk);
  // Environment beats the file.
  EXPECT_EQ(invoke(base, {{"LANGCHECK_PROVIDER", "openai"}}).status, kExitUsage);
  // Flags beat the environment.
  auto flagged = base;
  flagged.insert(flagged.end(), {"--provider", "mock"});
  EXPECT_EQ(invoke(flagged, {{"LANGCHECK_PROVIDER", "openai"}}).status, kExitOk);

  testing::spit(dir / "bad.conf", "colour = blue\n");
  auto bad = base;
  bad.back() = (dir / "bad.conf").string();
  EXPECT_EQ(invoke(bad).status, kExitUsage);
}

TEST(Cli, EvalMatchesLibraryReport) {
  testing::TempDir dir;
  ASSERT_EQ(invoke(mock_check(dir / "r.jsonl")).status, kExitOk);
  const CliRun r = invoke({"eval", "--results", (dir / "r.jsonl").string(), "--gold", e2e("claims.jsonl").string(),
                        "--out", (dir / "report.json").string(), "--histogram", (dir / "h.csv").string()});
  ASSERT_EQ(r.status, kExitOk) << r.err;
  EXPECT_EQ(testing::slurp(dir / "report.json"), testing::slurp(e2e("golden") / "fewfp-few.report.json"));
  EXPECT_EQ(testing::slurp(dir / "h.csv").rfind("task,category,count,correct,accuracy\n", 0), 0u);

  const CliRun tables = invoke({"eval", "--results", (dir / "r.jsonl").string(), "--gold",
                             e2e("claims.jsonl").string(), "--tables"});
  EXPECT_EQ(tables.status, kExitOk);
  EXPECT_NE(tables.out.find("Fact Avg."), std::string::npos);
  EXPECT_NE(tables.out.find("This run"), std::string::npos);
}

TEST(Cli, EvalRejectsUnknownIds) {
  testing::TempDir dir;
  ASSERT_EQ(invoke(mock_check(dir / "r.jsonl")).status, kExitOk);
  auto gold = records::read_file(e2e("claims.jsonl"));
  gold.erase(gold.begin());
  records::write_file(dir / "gold.jsonl", gold);
  const CliRun r = invoke({"eval", "--results", (dir / "r.jsonl").string(), "--gold", (dir / "gold.jsonl").string()});
  EXPECT_EQ(r.status, kExitFailure);
  EXPECT_NE(r.err.find("data error:"), std::string::npos) << r.err;
  EXPECT_EQ(invoke({"eval", "--results", (dir / "missing.jsonl").string(), "--gold", e2e("claims.jsonl").string()})
                .status,
            kExitFailure);
}

TEST(Cli, Ingest) {
  testing::TempDir dir;
  testing::spit(dir / "climate.csv", "claim,claim_label\nIce is melting.,SUPPORTS\nCO2 is harmless.,REFUTES\nHm.,DISPUTED\n");
  const CliRun strict = invoke({"ingest", "climate", "--in", (dir / "climate.csv").string(), "--out",
                             (dir / "c.jsonl").string()});
  EXPECT_EQ(strict.status, kExitFailure);
  const CliRun r = invoke({"ingest", "climate", "--in", (dir / "climate.csv").string(), "--out",
                        (dir / "c.jsonl").string(), "--no-count-check"});
  ASSERT_EQ(r.status, kExitOk) << r.err;
  EXPECT_NE(r.out.find("climate: 2 records (1 acceptable, 1 unacceptable), 1 excluded"), std::string::npos) << r.out;
  const auto recs = records::read_file(dir / "c.jsonl");
  ASSERT_EQ(recs.size(), 2u);
  EXPECT_EQ(recs[1].id, "climate-00002");
  EXPECT_EQ(invoke({"ingest", "climate", "--in", (dir / "climate.csv").string(), "--out", (dir / "x.jsonl").string(),
                    "--threshold", "3"})
                .status,
            kExitUsage);
}

TEST(Cli, CacheCommands) {
  testing::TempDir dir;
  const std::string cache = (dir / "cache").string();
  CliRun r = invoke({"cache", "stats", "--cache", cache});
  ASSERT_EQ(r.status, kExitOk) << r.err;
  EXPECT_EQ(r.out, "0 entries\n");

  auto args = mock_check(dir / "r.jsonl", "zero");
  args.insert(args.end(), {"--cache", cache});
  ASSERT_EQ(invoke(args).status, kExitOk);
  r = invoke({"cache", "stats", "--cache", cache});
  EXPECT_EQ(r.out, "12 entries\n");
  // Warm rerun never reaches the provider.
  r = invoke(args);
  EXPECT_NE(r.out.find("0 provider calls, 12 cache hits"), std::string::npos) << r.out;

  const std::string archive = (dir / "bundle.jsonl").string();
  EXPECT_EQ(invoke({"cache", "export", "--cache", cache, "--archive", archive}).out, "exported 12 entries\n");
  EXPECT_EQ(invoke({"cache", "clear", "--cache", cache}).out, "removed 12 entries\n");
  EXPECT_EQ(invoke({"cache", "stats", "--cache", cache}).out, "0 entries\n");
  EXPECT_EQ(invoke({"cache", "import", "--cache", cache, "--archive", archive}).out, "imported 12 entries\n");
  EXPECT_EQ(invoke({"cache", "export", "--cache", cache}).status, kExitUsage);
}

}  // namespace
}  // namespace langcheck::cli
