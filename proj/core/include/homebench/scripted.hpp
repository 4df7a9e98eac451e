#pragma once

#include "homebench/planner.hpp"
#include "homebench/rng.hpp"

namespace homebench::planner {

struct ScriptedOptions {
  bool plan_verbatim = false;  // emit the task's reference plan untouched
  bool replan = true;
  bool use_memory = true;
  bool blind = false;  // ignore every observation fed in
};

// Deterministic stand-in for a deliberative model. Plans from the task
// (reference plan for plain tasks, a search sweep or deferred retrieval for
// hidden-target tasks), reflects on observations, replans on deviations,
// and answers probes from belief. With `blind` set it degrades to open-loop
// execution with coin-flip answers, reading nothing from observations.
class ScriptedPlanner : public Planner {
 public:
  ScriptedPlanner(const ScriptedOptions& options, std::uint64_t episode_seed);

  Plan plan(const task::TaskSpec& task, const sim::Observation& obs) override;
  CompletionJudgment reflect(const task::TaskSpec& task,
                             const WindowReport& window) override;
  Decision decide(const task::TaskSpec& task, const sim::Observation& obs,
                  bool plan_exhausted) override;
  bool answer(const task::BinaryQuestion& q, const sim::Observation& obs) override;
  const MemoryBank& memory() const override { return memory_; }

 private:
  void absorb(const sim::Observation& obs);
  bool belief_eval(const scene::Predicate& p, const sim::Observation& obs) const;
  std::optional<Location> believed_location(const ObjectId& obj,
                                            const sim::Observation& obs) const;

  ScriptedOptions options_;
  Rng rng_;
  MemoryBank memory_;
  Plan current_plan_;
  bool retrieval_bound_ = false;  // hidden-target branch already chosen
  std::optional<WindowReport> last_window_;
  bool last_complete_ = false;
};

// Open-loop control baseline: executes a seeded shuffle of the reference
// plan, judges everything complete, answers probes by coin flip.
class RandomPlanner : public Planner {
 public:
  explicit RandomPlanner(std::uint64_t episode_seed);

  Plan plan(const task::TaskSpec& task, const sim::Observation& obs) override;
  CompletionJudgment reflect(const task::TaskSpec& task,
                             const WindowReport& window) override;
  Decision decide(const task::TaskSpec& task, const sim::Observation& obs,
                  bool plan_exhausted) override;
  bool answer(const task::BinaryQuestion& q, const sim::Observation& obs) override;
  const MemoryBank& memory() const override { return memory_; }

 private:
  Rng rng_;
  MemoryBank memory_;
  std::size_t plan_size_ = 0;
};

}  // namespace homebench::planner
