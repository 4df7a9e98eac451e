#pragma once

#include <optional>
#include <vector>

#include "homebench/planner.hpp"
#include "homebench/sim.hpp"
#include "homebench/task.hpp"

namespace homebench::episode {

struct EpisodeConfig {
  sim::NoiseConfig noise;
  sim::Observability observability = sim::Observability::Partial;
  bool perturbations_enabled = true;
  int max_steps = 400;           // hard clock budget per episode
  int max_subgoal_attempts = 3;  // windows spent on one subgoal before moving on
  int budget_scale = 2;          // window budget = max(2, scale x canonical length)
  std::optional<task::AnchorPolicy> anchor_override;  // else the task's policy
};

enum class EpisodeStatus { Done, PlanExhausted, Timeout, Aborted };
const char* episode_status_name(EpisodeStatus s);

struct QaRecord {
  std::string id;
  bool answer = false;
  bool truth = false;
};

struct EpisodeResult {
  EpisodeStatus status = EpisodeStatus::PlanExhausted;
  std::string abort_reason;
  int transitions_achieved = 0;
  std::vector<std::int64_t> transition_clocks;
  int subgoal_executions = 0;  // windows run, retries included
  bool goal_achieved = false;  // final-state check, diagnostic
  actions::Plan initial_plan;
  std::vector<QaRecord> qa;
  // Hidden-target bookkeeping.
  bool target_seen = false;  // target visible in any observation
  std::vector<actions::Action> explore_trace;  // candidate opens/closes up to discovery
  std::optional<std::string> branch_container;  // first container committed to
  bool branch_correct = false;
};

// Drive one task to termination: plan, execute subgoal windows under a
// primitive budget, reflect/decide at every anchor, answer probes when due,
// inject scripted events, and record every step. `trace_lines` (optional)
// receives the full line-delimited trace.
EpisodeResult run_episode(const scene::SceneRegistry& registry,
                          const task::TaskSpec& task, std::uint64_t episode_seed,
                          const EpisodeConfig& config, planner::Planner& the_planner,
                          std::vector<Json>* trace_lines);

}  // namespace homebench::episode
