#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "homebench/episode.hpp"
#include "homebench/task.hpp"

namespace homebench::metrics {

// One episode reduced to the numbers the report needs.
struct TaskScore {
  std::string task_id;
  task::Category category = task::Category::Ideal;
  int trial = 0;
  double sr = 0.0;          // achieved key transitions / total, in order
  bool plan_match = false;  // initial plan equals the reference plan
  int executions = 0;       // subgoal windows run, retries included
  int qa_correct = 0;
  int qa_total = 0;
  bool declared_done = false;
  bool aborted = false;
  // Hidden-target episodes only.
  std::optional<double> comp;            // sweep overlap with the reference
  std::optional<int> explored;           // executed sweep length |pi_G|
  std::optional<bool> located;           // target ever observed
  std::optional<bool> decision_correct;  // committed to the right container

  Json to_json() const;
  static TaskScore from_json(const Json& j);
};

// Formula primitives. All percentages are 0..100.
double success_rate(int achieved, int total);
double plan_accuracy(int matches, int episodes);
// Throws DivisionDomainError when len is not positive.
double plan_efficiency(double sr_pct, double len);
double qa_accuracy(int correct, int answered);
// Multiset overlap |a intersect b| / |b| over canonical steps.
double overlap_completeness(const actions::Plan& executed,
                            const actions::Plan& reference);
// Throws DivisionDomainError when the executed sweep is empty.
double exploration_term(double comp, int explored);

// Round-half-even to `decimals` places.
double round_half_even(double x, int decimals);
// 95% interval half-width for a mean of per-episode values (normal approx).
double mean_ci_half(const std::vector<double>& values);
// 95% Wilson interval half-width for a binary proportion.
double wilson_ci_half(int successes, int n);

TaskScore score_episode(const task::TaskSpec& task,
                        const episode::EpisodeResult& result, int trial,
                        bool plan_match_as_multiset);

// Aggregates over one category, or over everything ("Avg" column).
struct MetricBlock {
  int episodes = 0;
  int aborted = 0;
  double sr = 0.0;  // percent
  double sr_ci = 0.0;
  double acc_p = 0.0;  // percent
  double acc_p_ci = 0.0;
  double len = 0.0;  // mean executed subgoals
  double eta = 0.0;  // sr / len, by construction
  std::optional<double> acc_c;  // percent; absent when nothing was asked
  double acc_c_ci = 0.0;
  int qa_answered = 0;

  Json to_json() const;
  static MetricBlock from_json(const Json& j);
};

// Hidden-target rows. Each is absent when no episode feeds it.
struct MemoryBlock {
  int exploration_episodes = 0;
  int execution_episodes = 0;
  std::optional<double> sr_exp;       // percent, exploration tasks
  std::optional<double> sr_exp_only;  // percent located, exploration tasks
  std::optional<double> comp_exp;     // mean overlap, 0..1
  std::optional<double> eta_exp;      // mean overlap-per-step, 0..1
  std::optional<double> sr_exe;       // percent, execution tasks
  std::optional<double> acc_dec;      // percent of committed branches correct

  Json to_json() const;
  static MemoryBlock from_json(const Json& j);
};

struct MetricsReport {
  MetricBlock overall;
  std::map<task::Category, MetricBlock> categories;
  MemoryBlock memory;
  std::vector<std::string> footnotes;

  Json to_json() const;
  static MetricsReport from_json(const Json& j);
};

// Deterministic fold: scores are ordered by (task, trial) before reduction,
// so episode order never changes a single bit of the result.
MetricsReport aggregate(std::vector<TaskScore> scores);

}  // namespace homebench::metrics
