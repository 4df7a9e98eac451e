#include "homebench/bench.hpp"

#include <atomic>
#include <fstream>
#include <mutex>
#include <thread>

#include "homebench/forge.hpp"
#include "homebench/render.hpp"
#include "homebench/trace.hpp"

namespace homebench::bench {

namespace fs = std::filesystem;

RunConfig RunConfig::from_json(const Json& j) {
  require_keys(j, {"registry", "suite", "seed"},
               {"archive_root", "planner", "noise", "perturbations",
                "observability", "trials", "acc_p_multiset", "max_steps",
                "budget_scale", "max_subgoal_attempts", "anchor", "parallelism"},
               "run config");
  RunConfig c;
  c.registry_path = j.at("registry").get<std::string>();
  c.suite_path = j.at("suite").get<std::string>();
  c.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("archive_root")) {
    c.archive_root = j.at("archive_root").get<std::string>();
  }
  if (j.contains("planner")) {
    const Json& p = j.at("planner");
    require_keys(p, {}, {"kind", "replan", "memory", "timeout_ms"}, "planner");
    if (p.contains("kind")) c.planner.kind = p.at("kind").get<std::string>();
    if (p.contains("replan")) c.planner.replan = p.at("replan").get<bool>();
    if (p.contains("memory")) c.planner.use_memory = p.at("memory").get<bool>();
    if (p.contains("timeout_ms")) {
      c.planner.timeout_ms = p.at("timeout_ms").get<int>();
    }
  }
  if (j.contains("noise")) {
    const Json& n = j.at("noise");
    require_keys(n, {}, {"p_success", "q_drop"}, "noise");
    if (n.contains("p_success")) c.noise.p_success = n.at("p_success").get<double>();
    if (n.contains("q_drop")) c.noise.q_drop = n.at("q_drop").get<double>();
  }
  if (j.contains("perturbations")) c.perturbations = j.at("perturbations").get<bool>();
  if (j.contains("observability")) {
    const std::string o = j.at("observability").get<std::string>();
    if (o == "full") {
      c.observability = sim::Observability::Full;
    } else if (o == "partial") {
      c.observability = sim::Observability::Partial;
    } else {
      throw ParseError("observability must be full or partial, got " + o);
    }
  }
  if (j.contains("trials")) c.trials = j.at("trials").get<int>();
  if (c.trials < 1) throw ParseError("trials must be at least 1");
  if (j.contains("acc_p_multiset")) {
    c.acc_p_multiset = j.at("acc_p_multiset").get<bool>();
  }
  if (j.contains("max_steps")) c.max_steps = j.at("max_steps").get<int>();
  if (j.contains("budget_scale")) c.budget_scale = j.at("budget_scale").get<int>();
  if (j.contains("max_subgoal_attempts")) {
    c.max_subgoal_attempts = j.at("max_subgoal_attempts").get<int>();
  }
  if (j.contains("anchor") && !j.at("anchor").is_null()) {
    c.anchor = task::AnchorPolicy::from_json(j.at("anchor"));
  }
  if (j.contains("parallelism")) c.parallelism = j.at("parallelism").get<int>();
  if (c.parallelism < 1) throw ParseError("parallelism must be at least 1");
  return c;
}

Json RunConfig::to_json() const {
  Json j;
  j["registry"] = registry_path;
  j["suite"] = suite_path;
  j["seed"] = seed;
  j["archive_root"] = archive_root;
  Json p;
  p["kind"] = planner.kind;
  p["replan"] = planner.replan;
  p["memory"] = planner.use_memory;
  p["timeout_ms"] = planner.timeout_ms;
  j["planner"] = p;
  Json n;
  n["p_success"] = noise.p_success;
  n["q_drop"] = noise.q_drop;
  j["noise"] = n;
  j["perturbations"] = perturbations;
  j["observability"] =
      observability == sim::Observability::Full ? "full" : "partial";
  j["trials"] = trials;
  j["acc_p_multiset"] = acc_p_multiset;
  j["max_steps"] = max_steps;
  j["budget_scale"] = budget_scale;
  j["max_subgoal_attempts"] = max_subgoal_attempts;
  j["anchor"] = anchor ? anchor->to_json() : Json(nullptr);
  j["parallelism"] = parallelism;
  return j;
}

std::string config_digest(const RunConfig& config) {
  return content_hash(canonical_dump(config.to_json()));
}

namespace {

episode::EpisodeConfig episode_config(const RunConfig& c) {
  episode::EpisodeConfig e;
  e.noise = c.noise;
  e.observability = c.observability;
  e.perturbations_enabled = c.perturbations;
  e.max_steps = c.max_steps;
  e.max_subgoal_attempts = c.max_subgoal_attempts;
  e.budget_scale = c.budget_scale;
  e.anchor_override = c.anchor;
  return e;
}

struct EpisodeRun {
  episode::EpisodeResult result;
  std::vector<Json> trace;
};

EpisodeRun run_one(const scene::SceneRegistry& registry, const task::TaskSpec& task,
                   const RunConfig& config, std::uint64_t episode_seed) {
  EpisodeRun out;
  auto the_planner = planner::make_planner(config.planner, episode_seed);
  out.result = episode::run_episode(registry, task, episode_seed,
                                    episode_config(config), *the_planner,
                                    &out.trace);
  return out;
}

std::string read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read " + path.string());
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

void write_bytes(const fs::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ParseError("cannot write " + path.string());
  out << bytes;
}

}  // namespace

RunOutcome run_benchmark(const RunConfig& config) {
  const Json registry_json = load_json_file(config.registry_path);
  const scene::SceneRegistry registry = scene::SceneRegistry::from_json(registry_json);
  const task::Suite suite = task::load_suite(config.suite_path);
  auto loaded = task::load_suite_tasks(config.suite_path);

  for (const auto& [path, t] : loaded) {
    auto report = forge::verify_task(registry, t);
    if (!report.ok()) {
      throw ParseError("suite task " + t.id + " fails verification (" +
                       path.string() + ")");
    }
  }

  const std::string digest = config_digest(config);
  const fs::path dir = fs::path(config.archive_root) / ("run-" + digest);
  fs::create_directories(dir / "tasks");
  fs::create_directories(dir / "traces");

  // Ordered name -> content-hash map for the manifest.
  std::vector<std::pair<std::string, std::string>> files;
  auto put_file = [&](const std::string& rel, const std::string& bytes) {
    write_bytes(dir / rel, bytes);
    files.emplace_back(rel, content_hash(bytes));
  };

  put_file("config.json", canonical_dump(config.to_json()));
  put_file("registry.json", canonical_dump(registry.to_json()));
  for (const auto& [path, t] : loaded) {
    task::TaskSpec copy = t;
    copy.registry_path = "../registry.json";
    put_file("tasks/" + t.id + ".json", canonical_dump(copy.to_json()));
  }

  struct Cell {
    metrics::TaskScore score;
    std::string trace_rel;
    std::string trace_hash;
  };
  const int trials = config.trials;
  const std::size_t total = loaded.size() * static_cast<std::size_t>(trials);
  std::vector<Cell> cells(total);
  std::atomic<std::size_t> cursor{0};
  std::atomic<bool> failed{false};
  std::string failure;
  std::mutex failure_mu;

  auto worker = [&] {
    while (!failed.load()) {
      const std::size_t i = cursor.fetch_add(1);
      if (i >= total) break;
      const auto& [path, t] = loaded[i / trials];
      const int trial = static_cast<int>(i % trials);
      try {
        const std::uint64_t seed = derive_seed(config.seed, t.id, trial);
        EpisodeRun run = run_one(registry, t, config, seed);
        Cell& cell = cells[i];
        cell.score = metrics::score_episode(t, run.result, trial,
                                            config.acc_p_multiset);
        cell.trace_rel = "traces/" + t.id + "-t" + std::to_string(trial) + ".jsonl";
        const std::string bytes = trace::jsonl_bytes(run.trace);
        write_bytes(dir / cell.trace_rel, bytes);
        cell.trace_hash = content_hash(bytes);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(failure_mu);
        failed.store(true);
        failure = std::string("episode ") + t.id + " trial " +
                  std::to_string(trial) + ": " + e.what();
      }
    }
  };

  const int width = std::min<int>(config.parallelism, static_cast<int>(total));
  if (width <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(width));
    for (int i = 0; i < width; ++i) threads.emplace_back(worker);
    for (auto& th : threads) th.join();
  }
  if (failed.load()) throw ParseError("benchmark run failed: " + failure);

  RunOutcome outcome;
  outcome.archive_dir = dir;
  outcome.episodes = static_cast<int>(total);
  std::vector<metrics::TaskScore> scores;
  scores.reserve(total);
  for (const Cell& cell : cells) {
    if (cell.score.aborted) ++outcome.aborted;
    scores.push_back(cell.score);
    files.emplace_back(cell.trace_rel, cell.trace_hash);
  }

  Json scores_json;
  scores_json["schema"] = "scores/v1";
  Json arr = Json::array();
  for (const auto& s : scores) arr.push_back(s.to_json());
  scores_json["scores"] = arr;
  put_file("scores.json", canonical_dump(scores_json));

  outcome.report = metrics::aggregate(scores);
  put_file("report.json", canonical_dump(outcome.report.to_json()));
  put_file("report.txt", render::render_table(outcome.report));

  Json manifest;
  manifest["schema"] = "manifest/v1";
  manifest["config_digest"] = digest;
  manifest["suite"] = suite.name;
  manifest["episodes"] = outcome.episodes;
  manifest["aborted"] = outcome.aborted;
  Json fj;
  for (const auto& [rel, hash] : files) fj[rel] = hash;
  manifest["files"] = fj;
  manifest["complete"] = true;
  write_bytes(dir / "manifest.json", canonical_dump(manifest));
  return outcome;
}

ReplayOutcome replay_trace(const fs::path& trace_path) {
  ReplayOutcome out;
  const fs::path traces_dir = trace_path.parent_path();
  const fs::path archive = traces_dir.parent_path();
  if (!fs::exists(archive / "config.json")) {
    out.detail = "no config.json beside " + trace_path.string();
    return out;
  }

  const std::string stem = trace_path.stem().string();
  const auto mark = stem.rfind("-t");
  if (mark == std::string::npos) {
    out.detail = "trace name carries no trial suffix: " + stem;
    return out;
  }
  const std::string task_id = stem.substr(0, mark);
  int trial = 0;
  try {
    trial = std::stoi(stem.substr(mark + 2));
  } catch (const std::exception&) {
    out.detail = "trace name carries no trial suffix: " + stem;
    return out;
  }

  const RunConfig config = RunConfig::from_json(load_json_file(archive / "config.json"));
  const scene::SceneRegistry registry =
      scene::SceneRegistry::from_json(load_json_file(archive / "registry.json"));
  const task::TaskSpec t = task::load_task(archive / "tasks" / (task_id + ".json"));

  const std::uint64_t seed = derive_seed(config.seed, t.id, trial);
  EpisodeRun run = run_one(registry, t, config, seed);
  const std::string regenerated = trace::jsonl_bytes(run.trace);
  const std::string recorded = read_bytes(trace_path);
  if (regenerated == recorded) {
    out.identical = true;
    out.detail = "identical (" + std::to_string(recorded.size()) + " bytes)";
  } else {
    std::size_t line = 1, col = 0;
    const std::size_t n = std::min(regenerated.size(), recorded.size());
    std::size_t i = 0;
    for (; i < n && regenerated[i] == recorded[i]; ++i) {
      if (recorded[i] == '\n') {
        ++line;
        col = 0;
      } else {
        ++col;
      }
    }
    out.detail = "diverges at line " + std::to_string(line) + ", byte " +
                 std::to_string(i);
  }
  return out;
}

}  // namespace homebench::bench
