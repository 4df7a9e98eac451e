#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <string>

#include "homebench/bench.hpp"
#include "homebench/forge.hpp"
#include "homebench/render.hpp"
#include "oracles.hpp"

using namespace homebench;
using bench::RunConfig;

namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

// Relative path -> bytes for every regular file under root.
std::map<std::string, std::string> snapshot(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    out[fs::relative(entry.path(), root).generic_string()] = slurp(entry.path());
  }
  return out;
}

// A one-task-per-category suite against the shipped kitchen registry,
// all inside the temp dir so runs never touch each other.
struct Fixture {
  oracles::TempDir tmp{"bench"};
  fs::path registry_path;
  fs::path suite_path;
  scene::SceneRegistry registry;

  Fixture()
      : registry(scene::SceneRegistry::from_json(load_json_file(
            std::string(HOMEBENCH_SHARE_DIR) + "/registries/kitchen.json"))) {
    registry_path = tmp.path() / "registry.json";
    save_json_file(registry_path, registry.to_json());
    forge::SuiteOptions opt;
    opt.seed = 5;
    opt.per_category = 1;
    opt.name = "bench-mini";
    suite_path = forge::emit_suite(registry, registry_path, tmp.path() / "suite", opt);
  }

  RunConfig config() const {
    RunConfig c;
    c.registry_path = registry_path.string();
    c.suite_path = suite_path.string();
    c.archive_root = (tmp.path() / "archives").string();
    c.noise.p_success = 0.9;
    c.noise.q_drop = 0.3;
    c.trials = 2;
    c.seed = 11;
    return c;
  }
};

}  // namespace

TEST_CASE("a run writes a complete, self-describing archive") {
  Fixture fx;
  const RunConfig cfg = fx.config();
  auto outcome = bench::run_benchmark(cfg);

  CHECK(outcome.episodes == 12);  // 6 categories x 1 task x 2 trials
  const fs::path dir = outcome.archive_dir;
  CHECK(dir.filename().string() == "run-" + bench::config_digest(cfg));

  for (const char* name :
       {"config.json", "registry.json", "scores.json", "report.json",
        "report.txt", "manifest.json"}) {
    CAPTURE(name);
    CHECK(fs::exists(dir / name));
  }
  CHECK(std::distance(fs::directory_iterator(dir / "tasks"),
                      fs::directory_iterator{}) == 6);
  CHECK(std::distance(fs::directory_iterator(dir / "traces"),
                      fs::directory_iterator{}) == 12);

  // The archive restates its own inputs verbatim.
  CHECK(slurp(dir / "config.json") == canonical_dump(cfg.to_json()));
  CHECK(slurp(dir / "report.json") == canonical_dump(outcome.report.to_json()));
  CHECK(slurp(dir / "report.txt") == render::render_table(outcome.report));

  const Json scores = load_json_file(dir / "scores.json");
  CHECK(scores.at("schema") == "scores/v1");
  CHECK(scores.at("scores").size() == 12);

  // The manifest names every file except itself, with matching content hashes.
  const Json manifest = load_json_file(dir / "manifest.json");
  CHECK(manifest.at("schema") == "manifest/v1");
  CHECK(manifest.at("complete") == true);
  CHECK(manifest.at("config_digest") == bench::config_digest(cfg));
  CHECK(manifest.at("suite") == "bench-mini");
  CHECK(manifest.at("episodes") == 12);
  CHECK(manifest.at("aborted") == outcome.aborted);

  auto disk = snapshot(dir);
  disk.erase("manifest.json");
  const Json& files = manifest.at("files");
  CHECK(files.size() == disk.size());
  for (const auto& [rel, bytes] : disk) {
    CAPTURE(rel);
    REQUIRE(files.contains(rel));
    CHECK(files.at(rel).get<std::string>() == content_hash(bytes));
  }
}

TEST_CASE("every recorded trace replays to the recorded bytes") {
  Fixture fx;
  auto outcome = bench::run_benchmark(fx.config());
  int replayed = 0;
  for (const auto& entry : fs::directory_iterator(outcome.archive_dir / "traces")) {
    auto verdict = bench::replay_trace(entry.path());
    CAPTURE(entry.path().filename().string());
    CAPTURE(verdict.detail);
    CHECK(verdict.identical);
    ++replayed;
  }
  CHECK(replayed == 12);
}

TEST_CASE("equal configs reproduce the archive byte for byte") {
  Fixture fx;
  const RunConfig cfg = fx.config();
  auto first = bench::run_benchmark(cfg);
  const auto before = snapshot(first.archive_dir);
  auto second = bench::run_benchmark(cfg);
  CHECK(first.archive_dir == second.archive_dir);
  const auto after = snapshot(second.archive_dir);
  REQUIRE(before.size() == after.size());
  for (const auto& [rel, bytes] : before) {
    CAPTURE(rel);
    CHECK(after.at(rel) == bytes);
  }
}

TEST_CASE("parallel workers produce the same results as one") {
  Fixture fx;
  RunConfig serial = fx.config();
  RunConfig parallel = fx.config();
  parallel.parallelism = 4;

  auto a = bench::run_benchmark(serial);
  auto b = bench::run_benchmark(parallel);
  CHECK(a.archive_dir != b.archive_dir);  // parallelism is part of the config

  auto sa = snapshot(a.archive_dir);
  auto sb = snapshot(b.archive_dir);
  REQUIRE(sa.size() == sb.size());
  for (const auto& [rel, bytes] : sa) {
    CAPTURE(rel);
    REQUIRE(sb.count(rel) == 1);
    // Only the files that embed the config itself may differ.
    if (rel == "config.json" || rel == "manifest.json") continue;
    CHECK(sb.at(rel) == bytes);
  }
}

TEST_CASE("config digests track config content") {
  Fixture fx;
  const RunConfig cfg = fx.config();
  const std::string digest = bench::config_digest(cfg);
  CHECK(digest.size() == 16);

  // Serialization round-trip preserves the digest.
  const RunConfig back = RunConfig::from_json(cfg.to_json());
  CHECK(bench::config_digest(back) == digest);

  RunConfig reseeded = cfg;
  reseeded.seed += 1;
  CHECK(bench::config_digest(reseeded) != digest);

  RunConfig widened = cfg;
  widened.parallelism = 8;
  CHECK(bench::config_digest(widened) != digest);
}

TEST_CASE("malformed run configs are refused") {
  Json minimal;
  minimal["registry"] = "r.json";
  minimal["suite"] = "s.json";
  minimal["seed"] = 7;

  const RunConfig c = RunConfig::from_json(minimal);
  CHECK(c.trials == 10);
  CHECK(c.perturbations);
  CHECK(c.observability == sim::Observability::Partial);
  CHECK(c.planner.kind == "scripted");

  Json no_seed = minimal;
  no_seed.erase("seed");
  CHECK_THROWS_AS(RunConfig::from_json(no_seed), ParseError);

  Json stray = minimal;
  stray["shenanigans"] = true;
  CHECK_THROWS_AS(RunConfig::from_json(stray), ParseError);

  Json bad_obs = minimal;
  bad_obs["observability"] = "psychic";
  CHECK_THROWS_AS(RunConfig::from_json(bad_obs), ParseError);

  Json no_trials = minimal;
  no_trials["trials"] = 0;
  CHECK_THROWS_AS(RunConfig::from_json(no_trials), ParseError);

  Json no_width = minimal;
  no_width["parallelism"] = 0;
  CHECK_THROWS_AS(RunConfig::from_json(no_width), ParseError);

  Json odd_planner = minimal;
  odd_planner["planner"] = Json{{"flavor", "mint"}};
  CHECK_THROWS_AS(RunConfig::from_json(odd_planner), ParseError);

  Json odd_noise = minimal;
  odd_noise["noise"] = Json{{"p_success", 0.5}, {"banana", 1}};
  CHECK_THROWS_AS(RunConfig::from_json(odd_noise), ParseError);

  Json null_anchor = minimal;
  null_anchor["anchor"] = nullptr;
  CHECK_NOTHROW(RunConfig::from_json(null_anchor));
}

TEST_CASE("suites that fail verification never start") {
  Fixture fx;
  // Point one task's first required transition at an id the registry
  // has never heard of; verification must catch it before any episode.
  const auto loaded = task::load_suite_tasks(fx.suite_path);
  REQUIRE_FALSE(loaded.empty());
  task::TaskSpec broken = loaded.front().second;
  broken.key_transitions[0] =
      scene::PredicateSet({scene::Predicate::holding("ghost-object")});
  task::save_task(loaded.front().first, broken);

  CHECK_THROWS_WITH_AS(bench::run_benchmark(fx.config()),
                       doctest::Contains("fails verification"), ParseError);
}

TEST_CASE("replay names the problem when it cannot reproduce") {
  Fixture fx;
  fs::create_directories(fx.tmp.path() / "empty" / "traces");
  auto verdict =
      bench::replay_trace(fx.tmp.path() / "empty" / "traces" / "x-t0.jsonl");
  CHECK_FALSE(verdict.identical);
  CHECK(verdict.detail.find("config.json") != std::string::npos);

  auto outcome = bench::run_benchmark(fx.config());
  const fs::path traces = outcome.archive_dir / "traces";
  const fs::path original = fs::directory_iterator(traces)->path();
  const fs::path odd = traces.parent_path() / "traces" / "oddname.jsonl";
  fs::copy_file(original, odd);
  auto no_suffix = bench::replay_trace(odd);
  CHECK_FALSE(no_suffix.identical);
  CHECK(no_suffix.detail.find("trial suffix") != std::string::npos);

  // Tampering with recorded bytes is detected and located.
  std::string bytes = slurp(original);
  bytes[bytes.size() / 2] = bytes[bytes.size() / 2] == 'a' ? 'b' : 'a';
  {
    std::ofstream out(original, std::ios::binary | std::ios::trunc);
    out << bytes;
  }
  auto tampered = bench::replay_trace(original);
  CHECK_FALSE(tampered.identical);
  CHECK(tampered.detail.find("diverges") != std::string::npos);
}
