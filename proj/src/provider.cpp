#include "langcheck/provider.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <httplib.h>
#include <json.hpp>

#include "langcheck/errors.hpp"
#include "langcheck/text.hpp"

namespace langcheck {
namespace {

using json = nlohmann::json;

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

std::string_view last_block(std::string_view prompt) {
  auto pos = prompt.rfind("\n\n");
  return pos == std::string_view::npos ? prompt : prompt.substr(pos + 2);
}

json load_script(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open mock script '{}'", path.string()));
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("mock script '{}' is malformed: {}", path.string(), e.what()));
  }
}

}  // namespace

ScriptedProvider::ScriptedProvider(std::map<std::string, std::string> script, std::string id)
    : script_(std::move(script)), id_(std::move(id)) {}

std::string ScriptedProvider::complete(const CompletionRequest& request) {
  ++calls_;
  auto it = script_.find(request.prompt);
  if (it == script_.end()) throw ProviderError("unscripted prompt");
  return it->second;
}

FixtureProvider::FixtureProvider(std::vector<Rule> rules) : rules_(std::move(rules)) {}

std::unique_ptr<FixtureProvider> FixtureProvider::from_file(const std::filesystem::path& script) {
  const json doc = load_script(script);
  std::vector<Rule> rules;
  try {
    for (const auto& item : doc.value("completions", json::array())) {
      Rule r;
      r.kind = item.at("kind").get<std::string>();
      r.contains = item.at("contains").get<std::string>();
      if (item.contains("fail")) {
        r.fail = item.at("fail").get<std::string>();
      } else {
        r.text = item.at("text").get<std::string>();
      }
      rules.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("mock script '{}': {}", script.string(), e.what()));
  }
  return std::make_unique<FixtureProvider>(std::move(rules));
}

std::string FixtureProvider::classify(std::string_view prompt) {
  prompt = text::trim_right(prompt);
  if (ends_with(prompt, "Is it fair to say that?")) {
    return last_block(prompt).find("Fact:") == std::string_view::npos ? "zero" : "verdict";
  }
  if (ends_with(prompt, "The claim mentions that")) return "fact";
  if (ends_with(prompt, "Question:")) return "question";
  if (ends_with(prompt, "Answer:")) return "answer";
  return "unknown";
}

std::string FixtureProvider::complete(const CompletionRequest& request) {
  ++calls_;
  const std::string kind = classify(request.prompt);
  const std::string_view block = last_block(request.prompt);
  for (const auto& rule : rules_) {
    if (rule.kind != kind || block.find(rule.contains) == std::string_view::npos) continue;
    if (rule.fail) throw ProviderError(*rule.fail);
    return rule.text;
  }
  throw ProviderError(fmt::format("unscripted prompt (kind {})", kind));
}

std::unique_ptr<ScriptedEntailmentProvider> entailment_from_script(
    const std::filesystem::path& script) {
  const json doc = load_script(script);
  std::vector<ScriptedEntailmentProvider::Rule> rules;
  try {
    for (const auto& item : doc.value("entailment", json::array())) {
      const auto& s = item.at("scores");
      rules.push_back({item.at("contains").get<std::string>(),
                       EntailmentScores::make(s.at(0).get<double>(), s.at(1).get<double>(),
                                              s.at(2).get<double>())});
    }
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("mock script '{}': {}", script.string(), e.what()));
  }
  return std::make_unique<ScriptedEntailmentProvider>(std::move(rules));
}

OpenAiProvider::OpenAiProvider(OpenAiConfig config) : config_(std::move(config)) {
  if (config_.api_key.empty()) throw ConfigError("remote provider requires an API key");
  const auto scheme = config_.base_url.find("://");
  if (scheme == std::string::npos) {
    throw ConfigError(fmt::format("base URL '{}' has no scheme", config_.base_url));
  }
  const auto path = config_.base_url.find('/', scheme + 3);
  origin_ = config_.base_url.substr(0, path);
  path_prefix_ = path == std::string::npos ? "" : config_.base_url.substr(path);
  while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
}

std::string OpenAiProvider::complete(const CompletionRequest& request) {
  httplib::Client client(origin_);
  client.set_connection_timeout(config_.timeout_seconds, 0);
  client.set_read_timeout(config_.timeout_seconds, 0);
  client.set_bearer_token_auth(config_.api_key);

  json body = {{"model", config_.model},
               {"messages", json::array({{{"role", "user"}, {"content", request.prompt}}})},
               {"temperature", request.temperature},
               {"n", request.max_samples}};
  if (!request.stop.empty()) body["stop"] = request.stop;

  auto res = client.Post(path_prefix_ + "/chat/completions", body.dump(), "application/json");
  if (!res) {
    throw TransientProviderError(
        fmt::format("completion request failed: {}", httplib::to_string(res.error())));
  }
  const int status = res->status;
  if (status == 401 || status == 403) {
    throw AuthError(fmt::format("provider rejected credentials (HTTP {})", status));
  }
  if (status == 408 || status == 429 || status >= 500) {
    throw TransientProviderError(fmt::format("provider returned HTTP {}", status));
  }
  if (status != 200) {
    throw ProviderError(fmt::format("provider returned HTTP {}: {}", status, res->body));
  }
  try {
    const json reply = json::parse(res->body);
    return reply.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception& e) {
    throw ProviderError(fmt::format("unexpected completion response: {}", e.what()));
  }
}

}  // namespace langcheck
