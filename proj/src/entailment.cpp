#include "langcheck/entailment.hpp"

#include <set>

#include <fmt/format.h>
#include <httplib.h>
#include <json.hpp>

#include "langcheck/errors.hpp"

namespace langcheck {
namespace {

constexpr std::string_view kSplitToken = " is_entailed_by ";

using json = nlohmann::json;

void require_exact_fields(const json& body, const std::set<std::string>& fields,
                          std::string_view what) {
  if (!body.is_object()) throw ProviderError(fmt::format("{} body is not an object", what));
  for (const auto& [key, value] : body.items()) {
    if (!fields.count(key)) throw ProviderError(fmt::format("{} body has unknown field '{}'", what, key));
  }
  for (const auto& f : fields) {
    if (!body.contains(f)) throw ProviderError(fmt::format("{} body is missing '{}'", what, f));
  }
}

}  // namespace

EntailmentRequest split_supposition(std::string_view supposition) {
  auto pos = supposition.find(kSplitToken);
  if (pos == std::string_view::npos) {
    throw InputError("supposition does not contain ' is_entailed_by '");
  }
  return {std::string(supposition.substr(pos + kSplitToken.size())),
          std::string(supposition.substr(0, pos))};
}

Verdict decide(const EntailmentScores& scores) {
  if (!scores.valid()) {
    throw InputError(fmt::format("invalid entailment scores ({}, {}, {})", scores.entail,
                                 scores.neutral, scores.contradict));
  }
  const DecisionPath path = scores.entail > scores.contradict ? DecisionPath::EntailWins
                                                              : DecisionPath::ContradictWinsOrTie;
  return Verdict(path, fmt::format("entail={:.6f} neutral={:.6f} contradict={:.6f}", scores.entail,
                                   scores.neutral, scores.contradict));
}

EntailmentOutcome check_with_entailment(const GroundingResult& grounding, std::string_view claim,
                                        EntailmentProvider& provider) {
  SuppositionText supposition = build_supposition(grounding, claim);
  EntailmentScores scores = provider.score(split_supposition(supposition.text));
  return {decide(scores), std::move(supposition), scores};
}

ScriptedEntailmentProvider::ScriptedEntailmentProvider(std::vector<Rule> rules,
                                                       std::optional<EntailmentScores> fallback)
    : rules_(std::move(rules)), fallback_(fallback) {}

EntailmentScores ScriptedEntailmentProvider::score(const EntailmentRequest& request) {
  ++calls_;
  {
    std::lock_guard lock(mu_);
    requests_.push_back(request);
  }
  for (const auto& rule : rules_) {
    if (request.premise.find(rule.premise_contains) != std::string::npos) return rule.scores;
  }
  if (fallback_) return *fallback_;
  throw ProviderError("unscripted entailment request");
}

std::vector<EntailmentRequest> ScriptedEntailmentProvider::requests() const {
  std::lock_guard lock(mu_);
  return requests_;
}

SidecarEntailmentProvider::SidecarEntailmentProvider(std::string base_url,
                                                     std::chrono::milliseconds timeout)
    : base_url_(std::move(base_url)), timeout_(timeout) {}

EntailmentScores SidecarEntailmentProvider::score(const EntailmentRequest& request) {
  httplib::Client client(base_url_);
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  const json body = {{"premise", request.premise}, {"hypothesis", request.hypothesis}};
  auto res = client.Post("/entail", body.dump(), "application/json");
  if (!res) {
    throw TransientProviderError(
        fmt::format("entailment sidecar unreachable: {}", httplib::to_string(res.error())));
  }
  if (res->status == 503) throw TransientProviderError("entailment sidecar unavailable");
  if (res->status != 200) {
    throw ProviderError(fmt::format("entailment sidecar returned HTTP {}: {}", res->status, res->body));
  }
  json reply;
  try {
    reply = json::parse(res->body);
  } catch (const json::exception& e) {
    throw ProviderError(fmt::format("entailment sidecar sent malformed JSON: {}", e.what()));
  }
  require_exact_fields(reply, {"entail", "neutral", "contradict"}, "entail response");
  for (const char* key : {"entail", "neutral", "contradict"}) {
    if (!reply[key].is_number()) throw ProviderError(fmt::format("'{}' is not a number", key));
  }
  EntailmentScores scores{reply["entail"].get<double>(), reply["neutral"].get<double>(),
                          reply["contradict"].get<double>()};
  if (!scores.valid()) throw ProviderError("entailment sidecar returned an invalid score triple");
  return scores;
}

SidecarHealth SidecarEntailmentProvider::health() {
  httplib::Client client(base_url_);
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  auto res = client.Get("/health");
  if (!res) {
    throw TransientProviderError(
        fmt::format("entailment sidecar unreachable: {}", httplib::to_string(res.error())));
  }
  if (res->status != 200) throw ProviderError(fmt::format("health returned HTTP {}", res->status));
  json reply;
  try {
    reply = json::parse(res->body);
  } catch (const json::exception& e) {
    throw ProviderError(fmt::format("health sent malformed JSON: {}", e.what()));
  }
  require_exact_fields(reply, {"status", "model_id"}, "health response");
  if (!reply["status"].is_string() || !reply["model_id"].is_string()) {
    throw ProviderError("health fields must be strings");
  }
  return {reply["status"].get<std::string>(), reply["model_id"].get<std::string>()};
}

}  // namespace langcheck
