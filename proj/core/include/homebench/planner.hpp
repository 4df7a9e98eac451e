#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "homebench/actions.hpp"
#include "homebench/sim.hpp"
#include "homebench/task.hpp"

namespace homebench::planner {

using actions::Action;
using actions::Plan;
using actions::Subgoal;
using scene::Location;
using scene::ObjectId;

// Episodic store the deliberative layer carries between anchors: where
// things were last seen, which plan steps are finished, what happened.
struct MemoryFact {
  Location location;
  std::int64_t seen_at = 0;
};

struct MemoryBank {
  int active_subgoal = 0;
  std::vector<bool> completed;  // one flag per plan step; set once, never cleared
  std::map<ObjectId, MemoryFact> facts;
  std::vector<std::string> history;  // append-only

  Json to_json() const;
  std::string digest() const;
};

// Everything the executor did for one subgoal window, handed back for
// reflection.
struct WindowStep {
  Action primitive;
  sim::StepStatus status = sim::StepStatus::Succeeded;
  std::optional<scene::Predicate> violated;
  sim::Observation after;
};

struct WindowReport {
  int subgoal_index = 0;
  Subgoal subgoal;
  std::vector<WindowStep> steps;
  bool expansion_failed = false;  // no primitive string could be built
};

struct CompletionJudgment {
  bool complete = false;
  std::string note;
};

enum class DecisionKind { Continue, Advance, Replace, DeclareDone };

struct Decision {
  DecisionKind kind = DecisionKind::Continue;
  int advance_to = 0;  // target subgoal index for Advance
  Plan replacement;    // new plan for Replace
  std::string rationale;
};

const char* decision_name(DecisionKind k);

// The deliberative (System-2) interface the episode loop drives. Planners
// are per-episode objects: construct, run one episode, discard.
class Planner {
 public:
  virtual ~Planner() = default;

  virtual Plan plan(const task::TaskSpec& task, const sim::Observation& obs) = 0;

  // Absorb one executed window; judge whether its subgoal is now complete.
  virtual CompletionJudgment reflect(const task::TaskSpec& task,
                                     const WindowReport& window) = 0;

  // Called at every anchor, and once more when the plan runs out
  // (`plan_exhausted` true) so the planner can extend or finish.
  virtual Decision decide(const task::TaskSpec& task, const sim::Observation& obs,
                          bool plan_exhausted) = 0;

  virtual bool answer(const task::BinaryQuestion& q, const sim::Observation& obs) = 0;

  virtual const MemoryBank& memory() const = 0;
};

struct PlannerOptions {
  std::string kind = "scripted";  // gt | scripted | random | blind-scripted | external:URL
  bool replan = true;             // allowed to emit Replace on deviation
  bool use_memory = true;         // memory facts feed decisions and answers
  int timeout_ms = 2000;          // external adapter only
};

// `kind` may carry an external endpoint as "external:http://host:port".
std::unique_ptr<Planner> make_planner(const PlannerOptions& options,
                                      std::uint64_t episode_seed);

}  // namespace homebench::planner
