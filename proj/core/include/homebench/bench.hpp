#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "homebench/episode.hpp"
#include "homebench/metrics.hpp"
#include "homebench/planner.hpp"

namespace homebench::bench {

// One serializable source of truth for a benchmark run. The archive
// directory name is derived from the hash of this structure, so equal
// configs land in (and reproduce) the same archive.
struct RunConfig {
  std::string registry_path;
  std::string suite_path;
  std::string archive_root = "archives";
  planner::PlannerOptions planner;
  sim::NoiseConfig noise;
  bool perturbations = true;
  sim::Observability observability = sim::Observability::Partial;
  int trials = 10;
  std::uint64_t seed = 0;
  bool acc_p_multiset = false;  // plan accuracy ignores step order when set
  int max_steps = 400;
  int budget_scale = 2;
  int max_subgoal_attempts = 3;
  std::optional<task::AnchorPolicy> anchor;  // overrides every task when set
  int parallelism = 1;

  static RunConfig from_json(const Json& j);
  Json to_json() const;
};

std::string config_digest(const RunConfig& config);

struct RunOutcome {
  std::filesystem::path archive_dir;
  metrics::MetricsReport report;
  int episodes = 0;
  int aborted = 0;
};

// Execute trials x tasks episodes and write a self-contained archive:
// config.json, registry.json, tasks/, traces/<task>-t<trial>.jsonl,
// scores.json, report.json, report.txt, and (last) manifest.json. A missing
// manifest marks a partial archive.
RunOutcome run_benchmark(const RunConfig& config);

struct ReplayOutcome {
  bool identical = false;
  std::string detail;
};

// Re-run the episode a trace came from, using only files inside its
// archive, and compare the regenerated bytes with the recorded ones.
ReplayOutcome replay_trace(const std::filesystem::path& trace_path);

}  // namespace homebench::bench
