// Microbenchmarks for the hot paths: predicate checks inside the verifier
// and episode loop, single primitive steps, whole episodes, and seeded task
// generation. Run with --benchmark_min_time=... for tighter numbers.

#include <benchmark/benchmark.h>

#include <string>

#include "homebench/episode.hpp"
#include "homebench/forge.hpp"
#include "homebench/jsonio.hpp"
#include "homebench/metrics.hpp"
#include "homebench/scripted.hpp"
#include "homebench/task.hpp"

namespace {

using namespace homebench;

scene::SceneRegistry kitchen() {
  return scene::SceneRegistry::from_json(load_json_file(
      std::string(HOMEBENCH_SHARE_DIR) + "/registries/kitchen.json"));
}

task::TaskSpec sample_task(const scene::SceneRegistry& reg, std::uint64_t seed) {
  forge::GenOptions opt;
  opt.category = task::Category::Ideal;
  opt.seed = seed;
  return forge::generate_task(reg, opt);
}

void predicate_eval(benchmark::State& state) {
  auto reg = kitchen();
  auto t = sample_task(reg, 1);
  auto world = task::starting_state(reg, t);
  const auto& goal = t.goal;
  for (auto _ : state) {
    benchmark::DoNotOptimize(scene::eval_set(reg, world, goal));
  }
}
BENCHMARK(predicate_eval);

void primitive_step(benchmark::State& state) {
  auto reg = kitchen();
  auto t = sample_task(reg, 1);
  for (auto _ : state) {
    state.PauseTiming();
    sim::EnvState env(reg, t, 7, {1.0, 0.0}, sim::Observability::Partial, false);
    state.ResumeTiming();
    benchmark::DoNotOptimize(env.step(actions::Action::wait()));
  }
}
BENCHMARK(primitive_step);

void observation_digest(benchmark::State& state) {
  auto reg = kitchen();
  auto t = sample_task(reg, 1);
  sim::EnvState env(reg, t, 7, {1.0, 0.0}, sim::Observability::Partial, false);
  for (auto _ : state) {
    benchmark::DoNotOptimize(env.observe().digest());
  }
}
BENCHMARK(observation_digest);

void full_episode(benchmark::State& state) {
  auto reg = kitchen();
  auto t = sample_task(reg, 1);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    planner::ScriptedPlanner planner({}, ++seed);
    auto res = episode::run_episode(reg, t, seed, {}, planner, nullptr);
    benchmark::DoNotOptimize(res);
  }
}
BENCHMARK(full_episode);

void task_generation(benchmark::State& state) {
  auto reg = kitchen();
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_task(reg, ++seed));
  }
}
BENCHMARK(task_generation);

void suite_aggregation(benchmark::State& state) {
  auto reg = kitchen();
  auto t = sample_task(reg, 1);
  std::vector<metrics::TaskScore> scores;
  for (int i = 0; i < 120; ++i) {
    planner::ScriptedPlanner planner({}, i);
    auto res = episode::run_episode(reg, t, i, {}, planner, nullptr);
    scores.push_back(metrics::score_episode(t, res, i, false));
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(metrics::aggregate(scores));
  }
}
BENCHMARK(suite_aggregation);

}  // namespace

BENCHMARK_MAIN();
