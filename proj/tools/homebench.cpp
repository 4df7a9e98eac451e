#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "homebench/bench.hpp"
#include "homebench/external.hpp"
#include "homebench/forge.hpp"
#include "homebench/render.hpp"

namespace fs = std::filesystem;
using namespace homebench;

namespace {

int cmd_gen(const std::string& registry_path, const std::string& out_dir,
            std::uint64_t seed, int per_category, const std::string& name) {
  auto registry = scene::SceneRegistry::from_json(load_json_file(registry_path));
  forge::SuiteOptions options;
  options.seed = seed;
  options.per_category = per_category;
  options.name = name;
  auto suite = forge::emit_suite(registry, registry_path, out_dir, options);
  std::cout << suite.string() << "\n";
  return 0;
}

int cmd_verify(const std::string& registry_path,
               const std::vector<std::string>& task_paths) {
  auto registry = scene::SceneRegistry::from_json(load_json_file(registry_path));
  int bad = 0;
  for (const auto& path : task_paths) {
    task::TaskSpec t;
    try {
      t = task::load_task(path);
    } catch (const std::exception& e) {
      std::cout << path << ": UNREADABLE (" << e.what() << ")\n";
      ++bad;
      continue;
    }
    auto report = forge::verify_task(registry, t);
    if (report.ok()) {
      std::cout << path << ": OK (" << report.transition_steps.size()
                << " transitions)\n";
    } else {
      ++bad;
      std::cout << path << ": REJECTED\n";
      for (const auto& f : report.findings) {
        std::cout << "  " << canonical_dump(f.to_json());
      }
    }
  }
  return bad == 0 ? 0 : 1;
}

struct RunOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> planner_kind;
  std::optional<int> trials;
  std::optional<std::string> suite;
  std::optional<std::string> registry;
  std::optional<std::string> archive_root;
  std::optional<double> p_success;
  std::optional<double> q_drop;
  std::optional<std::string> observability;
  std::optional<int> parallelism;
  bool no_perturbations = false;
  bool no_replan = false;
  bool no_memory = false;
};

int cmd_run(const std::string& config_path, const RunOverrides& ov) {
  bench::RunConfig config = bench::RunConfig::from_json(load_json_file(config_path));
  if (ov.seed) config.seed = *ov.seed;
  if (ov.planner_kind) config.planner.kind = *ov.planner_kind;
  if (ov.trials) config.trials = *ov.trials;
  if (ov.suite) config.suite_path = *ov.suite;
  if (ov.registry) config.registry_path = *ov.registry;
  if (ov.archive_root) config.archive_root = *ov.archive_root;
  if (ov.p_success) config.noise.p_success = *ov.p_success;
  if (ov.q_drop) config.noise.q_drop = *ov.q_drop;
  if (ov.observability) {
    if (*ov.observability == "full") {
      config.observability = sim::Observability::Full;
    } else if (*ov.observability == "partial") {
      config.observability = sim::Observability::Partial;
    } else {
      std::cerr << "observability must be full or partial\n";
      return 2;
    }
  }
  if (ov.parallelism) config.parallelism = *ov.parallelism;
  if (ov.no_perturbations) config.perturbations = false;
  if (ov.no_replan) config.planner.replan = false;
  if (ov.no_memory) config.planner.use_memory = false;

  auto outcome = bench::run_benchmark(config);
  std::cout << render::render_table(outcome.report);
  std::cout << "\narchive: " << outcome.archive_dir.string() << "\n";
  std::cout << "episodes: " << outcome.episodes << ", aborted: " << outcome.aborted
            << "\n";
  return outcome.aborted == 0 ? 0 : 1;
}

int cmd_replay(const std::vector<std::string>& traces, const std::string& archive) {
  std::vector<fs::path> paths;
  for (const auto& t : traces) paths.emplace_back(t);
  if (!archive.empty()) {
    for (const auto& entry : fs::directory_iterator(fs::path(archive) / "traces")) {
      if (entry.path().extension() == ".jsonl") paths.push_back(entry.path());
    }
    std::sort(paths.begin(), paths.end());
  }
  if (paths.empty()) {
    std::cerr << "nothing to replay\n";
    return 2;
  }
  int bad = 0;
  for (const auto& p : paths) {
    auto outcome = bench::replay_trace(p);
    std::cout << p.filename().string() << ": "
              << (outcome.identical ? "MATCH " : "MISMATCH ") << outcome.detail
              << "\n";
    if (!outcome.identical) ++bad;
  }
  std::cout << paths.size() - bad << "/" << paths.size() << " traces replay clean\n";
  return bad == 0 ? 0 : 1;
}

metrics::MetricsReport report_for_archive(const fs::path& archive) {
  Json scores_json = load_json_file(archive / "scores.json");
  require_keys(scores_json, {"schema", "scores"}, {}, "scores file");
  std::vector<metrics::TaskScore> scores;
  for (const auto& s : scores_json.at("scores")) {
    scores.push_back(metrics::TaskScore::from_json(s));
  }
  return metrics::aggregate(std::move(scores));
}

int cmd_report(const std::string& archive, const std::string& format,
               const std::vector<std::string>& compare) {
  if (!compare.empty()) {
    auto from = report_for_archive(compare[0]);
    auto to = report_for_archive(compare[1]);
    std::cout << render::render_compare(from, to);
    return 0;
  }
  auto report = report_for_archive(archive);
  if (format == "csv") {
    std::cout << render::render_csv(report);
  } else {
    std::cout << render::render_table(report);
  }
  return 0;
}

int cmd_probe(const std::string& endpoint, int timeout_ms) {
  std::string error;
  if (external::probe(endpoint, timeout_ms, &error)) {
    std::cout << endpoint << ": healthy\n";
    return 0;
  }
  std::cout << endpoint << ": unhealthy (" << error << ")\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic household-manipulation benchmark harness"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a verified task suite");
  std::string gen_registry, gen_out, gen_name = "default";
  std::uint64_t gen_seed = 0;
  int gen_per_category = 10;
  gen->add_option("--registry", gen_registry, "Scene registry JSON")->required();
  gen->add_option("--out", gen_out, "Output directory")->required();
  gen->add_option("--seed", gen_seed, "Generation seed")->required();
  gen->add_option("--per-category", gen_per_category, "Tasks per category");
  gen->add_option("--name", gen_name, "Suite name");

  // verify
  auto* verify = app.add_subcommand("verify", "Verify task files");
  std::string verify_registry;
  std::vector<std::string> verify_tasks;
  verify->add_option("--registry", verify_registry, "Scene registry JSON")->required();
  verify->add_option("tasks", verify_tasks, "Task JSON files")->required();

  // run
  auto* run = app.add_subcommand("run", "Run a benchmark and write an archive");
  std::string run_config;
  RunOverrides ov;
  run->add_option("--config", run_config, "Run configuration JSON")->required();
  run->add_option("--seed", ov.seed, "Override the seed root");
  run->add_option("--planner", ov.planner_kind,
                  "Planner kind: gt | scripted | blind-scripted | random | "
                  "external:URL");
  run->add_option("--trials", ov.trials, "Trials per task");
  run->add_option("--suite", ov.suite, "Suite manifest path");
  run->add_option("--registry", ov.registry, "Registry path");
  run->add_option("--archive-root", ov.archive_root, "Archive root directory");
  run->add_option("--p-success", ov.p_success, "Primitive success probability");
  run->add_option("--q-drop", ov.q_drop, "Drop probability after a slip");
  run->add_option("--observability", ov.observability, "full | partial");
  run->add_option("--parallelism", ov.parallelism, "Worker threads");
  run->add_flag("--no-perturbations", ov.no_perturbations, "Disable scripted events");
  run->add_flag("--no-replan", ov.no_replan, "Forbid replacement plans");
  run->add_flag("--no-memory", ov.no_memory, "Disable the location memory");

  // replay
  auto* replay = app.add_subcommand("replay", "Re-execute traces and diff bytes");
  std::vector<std::string> replay_traces;
  std::string replay_archive;
  replay->add_option("--trace", replay_traces, "Trace file(s)");
  replay->add_option("--archive", replay_archive, "Replay every trace in an archive");

  // report
  auto* report = app.add_subcommand("report", "Render metrics from an archive");
  std::string report_archive, report_format = "table";
  std::vector<std::string> report_compare;
  report->add_option("--archive", report_archive, "Archive directory");
  report->add_option("--format", report_format, "table | csv");
  report->add_option("--compare", report_compare, "Two archives to diff")
      ->expected(2);

  // probe
  auto* probe = app.add_subcommand("probe", "Health-check an external planner");
  std::string probe_endpoint;
  int probe_timeout = 2000;
  probe->add_option("--endpoint", probe_endpoint, "Base URL")->required();
  probe->add_option("--timeout-ms", probe_timeout, "Request timeout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      return cmd_gen(gen_registry, gen_out, gen_seed, gen_per_category, gen_name);
    }
    if (verify->parsed()) return cmd_verify(verify_registry, verify_tasks);
    if (run->parsed()) return cmd_run(run_config, ov);
    if (replay->parsed()) return cmd_replay(replay_traces, replay_archive);
    if (report->parsed()) {
      if (report_compare.empty() && report_archive.empty()) {
        std::cerr << "report needs --archive or --compare\n";
        return 2;
      }
      return cmd_report(report_archive, report_format, report_compare);
    }
    if (probe->parsed()) return cmd_probe(probe_endpoint, probe_timeout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
