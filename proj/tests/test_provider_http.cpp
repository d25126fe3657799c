#include <atomic>
#include <thread>

#include <gtest/gtest.h>
#include <httplib.h>
#include <json.hpp>

#include "langcheck/client.hpp"
#include "langcheck/errors.hpp"
#include "langcheck/provider.hpp"
#include "support.hpp"

namespace langcheck {
namespace {

// Minimal chat-completions server. Answers with `statuses` in order, then 200.
class FakeOpenAi {
 public:
  FakeOpenAi() {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      const int n = hits++;
      last_auth = req.get_header_value("Authorization");
      last_body = nlohmann::json::parse(req.body);
      if (n < static_cast<int>(statuses.size())) {
        res.status = statuses[static_cast<std::size_t>(n)];
        return;
      }
      const std::string prompt = last_body["messages"][0]["content"].get<std::string>();
      res.set_content(nlohmann::json{{"choices", {{{"message", {{"role", "assistant"}, {"content", "echo:" + prompt}}}}}}}.dump(),
                      "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeOpenAi() {
    server_.stop();
    thread_.join();
  }
  std::string base() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1/"; }

  std::vector<int> statuses;
  std::atomic<int> hits{0};
  std::string last_auth;
  nlohmann::json last_body;

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

OpenAiConfig config_for(const FakeOpenAi& fake) {
  OpenAiConfig c;
  c.base_url = fake.base();
  c.api_key = "sk-test";
  c.model = "test-model";
  c.timeout_seconds = 5;
  return c;
}

ClientOptions fast() {
  ClientOptions o;
  o.retry.max_retries = 3;
  o.retry.initial_backoff = std::chrono::milliseconds(1);
  o.retry.max_backoff = std::chrono::milliseconds(2);
  return o;
}

TEST(OpenAi, RequestShape) {
  FakeOpenAi fake;
  OpenAiProvider p(config_for(fake));
  CompletionRequest r;
  r.prompt = "Claim: x\nQuestion: Is it fair to say that?";
  EXPECT_EQ(p.complete(r), "echo:" + r.prompt);
  EXPECT_EQ(fake.last_auth, "Bearer sk-test");
  EXPECT_EQ(fake.last_body["model"], "test-model");
  EXPECT_DOUBLE_EQ(fake.last_body["temperature"].get<double>(), 0.1);
  EXPECT_EQ(fake.last_body["n"], 1);
  EXPECT_FALSE(fake.last_body.contains("stop"));
  EXPECT_EQ(p.id(), "openai:test-model");
}

TEST(OpenAi, MissingKeyIsConfigError) {
  OpenAiConfig c;
  EXPECT_THROW(OpenAiProvider{c}, ConfigError);
  c.api_key = "k";
  c.base_url = "no-scheme";
  EXPECT_THROW(OpenAiProvider{c}, ConfigError);
}

TEST(OpenAi, TransientStatusesAreRetried) {
  FakeOpenAi fake;
  fake.statuses = {429, 503, 500};
  OpenAiProvider p(config_for(fake));
  CompletionClient c(p, fast());
  EXPECT_EQ(c.complete({"hello"}).text, "echo:hello");
  EXPECT_EQ(fake.hits, 4);
}

TEST(OpenAi, AuthFailureStopsImmediately) {
  FakeOpenAi fake;
  fake.statuses = {401};
  OpenAiProvider p(config_for(fake));
  CompletionClient c(p, fast());
  EXPECT_THROW(c.complete({"hello"}), AuthError);
  EXPECT_EQ(fake.hits, 1);
}

TEST(OpenAi, ClientErrorIsNotRetried) {
  FakeOpenAi fake;
  fake.statuses = {400};
  OpenAiProvider p(config_for(fake));
  CompletionClient c(p, fast());
  EXPECT_THROW(c.complete({"hello"}), ProviderError);
  EXPECT_EQ(fake.hits, 1);
}

TEST(OpenAi, UnreachableServerIsTransient) {
  OpenAiConfig c;
  c.api_key = "k";
  c.base_url = "http://127.0.0.1:1/v1";
  c.timeout_seconds = 1;
  OpenAiProvider p(c);
  EXPECT_THROW(p.complete({"x"}), TransientProviderError);
}

TEST(FixtureProvider, ClassifiesPromptKinds) {
  EXPECT_EQ(FixtureProvider::classify("Claim: x\nQuestion: Is it fair to say that?"), "zero");
  EXPECT_EQ(FixtureProvider::classify("Claim: x\nThe claim mentions that y.\nFact: z\nQuestion: Is it fair to say that?"),
            "verdict");
  EXPECT_EQ(FixtureProvider::classify("a\n\nClaim: x\nThe claim mentions that"), "fact");
  EXPECT_EQ(FixtureProvider::classify("Claim: x\nQuestion:"), "question");
  EXPECT_EQ(FixtureProvider::classify("Document: d\nQuestion: q\nAnswer:"), "answer");
}

TEST(FixtureProvider, MatchesOnlyTheLastBlock) {
  FixtureProvider p({{"fact", "needle", "found", std::nullopt}, {"zero", "boom", "", std::string("scripted failure")}});
  EXPECT_EQ(p.complete({"Claim: needle\nThe claim mentions that"}), "found");
  EXPECT_THROW(p.complete({"Claim: needle\n\nClaim: other\nThe claim mentions that"}), ProviderError);
  EXPECT_THROW(p.complete({"Claim: boom\nQuestion: Is it fair to say that?"}), ProviderError);
  EXPECT_EQ(p.calls(), 3u);
}

TEST(FixtureProvider, LoadsScriptFile) {
  const auto script = testing::fixture_dir() / "e2e" / "script.json";
  auto p = FixtureProvider::from_file(script);
  EXPECT_EQ(p->complete({"Claim: Thanks for sharing\nQuestion: Is it fair to say that?"}), "Yes.");
  auto e = entailment_from_script(script);
  EXPECT_DOUBLE_EQ(e->score({"Online forums help", "h"}).contradict, 0.6);
}

}  // namespace
}  // namespace langcheck
