#include "homebench/external.hpp"

#include <httplib.h>

#include <cstdlib>

#include "homebench/error.hpp"

namespace homebench::external {

using planner::Decision;
using planner::DecisionKind;

namespace {

// Endpoints that require authentication read the credential from the
// environment; nothing is sent when the variable is absent or empty.
void apply_credential(httplib::Client& client) {
  if (const char* token = std::getenv("HOMEBENCH_ENDPOINT_TOKEN");
      token != nullptr && *token != '\0') {
    client.set_bearer_token_auth(token);
  }
}

}  // namespace

struct ExternalPlanner::Impl {
  httplib::Client client;
  explicit Impl(const std::string& url) : client(url) {}
};

ExternalPlanner::ExternalPlanner(std::string base_url, int timeout_ms)
    : impl_(std::make_unique<Impl>(base_url)) {
  impl_->client.set_connection_timeout(0, timeout_ms * 1000);
  impl_->client.set_read_timeout(0, timeout_ms * 1000);
  impl_->client.set_write_timeout(0, timeout_ms * 1000);
  apply_credential(impl_->client);
}

ExternalPlanner::~ExternalPlanner() = default;

Json ExternalPlanner::call(const std::string& phase, const std::string& instruction,
                           const std::string& obs_digest, Json extra) {
  Json req;
  req["phase"] = phase;
  req["instruction"] = instruction;
  req["observation"] = obs_digest;
  req["memory"] = memory_.digest();
  req["extra"] = std::move(extra);
  auto res = impl_->client.Post("/act", canonical_dump(req), "application/json");
  if (!res) {
    throw ExternalUnavailableError("no response from endpoint (" + phase + ")");
  }
  if (res->status != 200) {
    throw ExternalUnavailableError("endpoint returned status " +
                                   std::to_string(res->status));
  }
  try {
    Json body = Json::parse(res->body);
    memory_.history.push_back(phase + " -> " + content_hash(res->body));
    return body;
  } catch (const nlohmann::json::parse_error& e) {
    throw ExternalUnavailableError(std::string("unparseable response: ") + e.what());
  }
}

actions::Plan ExternalPlanner::plan(const task::TaskSpec& task,
                                    const sim::Observation& obs) {
  Json body = call("plan", task.instruction, obs.digest(), Json::object());
  if (!body.is_object() || !body.contains("steps") || !body.at("steps").is_array()) {
    throw MalformedPlanError("plan response needs a steps array");
  }
  actions::Plan p;
  for (const auto& line : body.at("steps")) {
    if (!line.is_string()) throw MalformedPlanError("plan steps must be strings");
    p.push_back(actions::Action::from_text(line.get<std::string>()));
  }
  if (p.empty()) throw MalformedPlanError("empty plan");
  memory_.active_subgoal = 0;
  memory_.completed.assign(p.size(), false);
  return p;
}

planner::CompletionJudgment ExternalPlanner::reflect(
    const task::TaskSpec& task, const planner::WindowReport& window) {
  memory_.active_subgoal = window.subgoal_index;
  Json extra;
  extra["subgoal"] = window.subgoal.text();
  extra["steps_run"] = window.steps.size();
  std::string obs_digest =
      window.steps.empty() ? "" : window.steps.back().after.digest();
  Json body = call("reflect", task.instruction, obs_digest, std::move(extra));
  if (!body.is_object() || !body.contains("complete") ||
      !body.at("complete").is_boolean()) {
    throw MalformedPlanError("reflect response needs a boolean complete");
  }
  bool complete = body.at("complete").get<bool>();
  if (complete && window.subgoal_index >= 0 &&
      window.subgoal_index < static_cast<int>(memory_.completed.size())) {
    memory_.completed[window.subgoal_index] = true;
  }
  return {complete, "external"};
}

Decision ExternalPlanner::decide(const task::TaskSpec& task,
                                 const sim::Observation& obs, bool plan_exhausted) {
  Json extra;
  extra["plan_exhausted"] = plan_exhausted;
  extra["active"] = memory_.active_subgoal;
  Json body = call("decide", task.instruction, obs.digest(), std::move(extra));
  const std::string verb =
      require_field(body, "decision", "decide response").get<std::string>();
  if (verb == "continue") return {DecisionKind::Continue, 0, {}, "external"};
  if (verb == "declare_done") return {DecisionKind::DeclareDone, 0, {}, "external"};
  if (verb == "advance") {
    int to = require_field(body, "advance_to", "decide response").get<int>();
    memory_.active_subgoal = to;
    return {DecisionKind::Advance, to, {}, "external"};
  }
  if (verb == "replace") {
    const Json& steps = require_field(body, "steps", "decide response");
    actions::Plan p;
    for (const auto& line : steps) {
      p.push_back(actions::Action::from_text(line.get<std::string>()));
    }
    if (p.empty()) throw MalformedPlanError("replacement plan is empty");
    memory_.active_subgoal = 0;
    memory_.completed.assign(p.size(), false);
    return {DecisionKind::Replace, 0, p, "external"};
  }
  throw MalformedPlanError("unknown decision verb: " + verb);
}

bool ExternalPlanner::answer(const task::BinaryQuestion& q,
                             const sim::Observation& obs) {
  Json extra;
  extra["question"] = q.text;
  Json body = call("answer", q.text, obs.digest(), std::move(extra));
  if (!body.is_object() || !body.contains("answer") ||
      !body.at("answer").is_boolean()) {
    throw MalformedPlanError("answer response needs a boolean answer");
  }
  return body.at("answer").get<bool>();
}

bool probe(const std::string& base_url, int timeout_ms, std::string* error) {
  try {
    httplib::Client client(base_url);
    client.set_connection_timeout(0, timeout_ms * 1000);
    client.set_read_timeout(0, timeout_ms * 1000);
    apply_credential(client);
    Json req;
    req["phase"] = "probe";
    auto res = client.Post("/act", canonical_dump(req), "application/json");
    if (!res) {
      if (error) *error = "no response";
      return false;
    }
    if (res->status != 200) {
      if (error) *error = "status " + std::to_string(res->status);
      return false;
    }
    Json body = Json::parse(res->body);
    if (!body.is_object() || body.value("ok", false) != true) {
      if (error) *error = "endpoint did not acknowledge";
      return false;
    }
    return true;
  } catch (const std::exception& e) {
    if (error) *error = e.what();
    return false;
  }
}

}  // namespace homebench::external
