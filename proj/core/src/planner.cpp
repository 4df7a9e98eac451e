#include "homebench/planner.hpp"

#include "homebench/error.hpp"
#include "homebench/external.hpp"
#include "homebench/scripted.hpp"

namespace homebench::planner {

Json MemoryBank::to_json() const {
  Json j;
  j["active_subgoal"] = active_subgoal;
  j["completed"] = completed;
  Json fj = Json::object();
  for (const auto& [obj, fact] : facts) {
    Json f;
    f["location"] = scene::location_to_json(fact.location);
    f["seen_at"] = fact.seen_at;
    fj[obj] = f;
  }
  j["facts"] = fj;
  j["history"] = history;
  return j;
}

std::string MemoryBank::digest() const { return content_hash(canonical_dump(to_json())); }

const char* decision_name(DecisionKind k) {
  switch (k) {
    case DecisionKind::Continue: return "continue";
    case DecisionKind::Advance: return "advance";
    case DecisionKind::Replace: return "replace";
    case DecisionKind::DeclareDone: return "declare_done";
  }
  return "continue";
}

std::unique_ptr<Planner> make_planner(const PlannerOptions& options,
                                      std::uint64_t episode_seed) {
  const std::string& kind = options.kind;
  ScriptedOptions s;
  s.replan = options.replan;
  s.use_memory = options.use_memory;
  if (kind == "gt") {
    s.plan_verbatim = true;
    return std::make_unique<ScriptedPlanner>(s, episode_seed);
  }
  if (kind == "scripted") {
    return std::make_unique<ScriptedPlanner>(s, episode_seed);
  }
  if (kind == "blind-scripted") {
    s.blind = true;
    return std::make_unique<ScriptedPlanner>(s, episode_seed);
  }
  if (kind == "random") {
    return std::make_unique<RandomPlanner>(episode_seed);
  }
  if (kind.rfind("external:", 0) == 0) {
    return std::make_unique<external::ExternalPlanner>(kind.substr(9),
                                                      options.timeout_ms);
  }
  throw ParseError("unknown planner kind: " + kind);
}

}  // namespace homebench::planner
