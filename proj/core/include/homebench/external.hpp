#pragma once

#include <memory>
#include <string>

#include "homebench/planner.hpp"

namespace homebench::external {

// Bridges the episode loop to a deliberative model served over local HTTP.
// One POST endpoint (/act) carries every phase; requests hold the task
// instruction plus observation and memory digests, responses hold plan steps
// in the one-line action grammar or a decision verb. Transport failures and
// malformed responses raise ExternalUnavailableError / MalformedPlanError;
// the episode loop turns those into an aborted episode. When the
// HOMEBENCH_ENDPOINT_TOKEN environment variable is set, every request
// carries it as a bearer credential.
class ExternalPlanner : public planner::Planner {
 public:
  ExternalPlanner(std::string base_url, int timeout_ms);
  ~ExternalPlanner() override;

  actions::Plan plan(const task::TaskSpec& task, const sim::Observation& obs) override;
  planner::CompletionJudgment reflect(const task::TaskSpec& task,
                                      const planner::WindowReport& window) override;
  planner::Decision decide(const task::TaskSpec& task, const sim::Observation& obs,
                           bool plan_exhausted) override;
  bool answer(const task::BinaryQuestion& q, const sim::Observation& obs) override;
  const planner::MemoryBank& memory() const override { return memory_; }

 private:
  Json call(const std::string& phase, const std::string& instruction,
            const std::string& obs_digest, Json extra);

  struct Impl;
  std::unique_ptr<Impl> impl_;
  planner::MemoryBank memory_;
};

// Liveness check for the endpoint; fills `error` on failure when given.
bool probe(const std::string& base_url, int timeout_ms,
           std::string* error = nullptr);

}  // namespace homebench::external
