// Acceptance suite: one self-contained check per shipping requirement,
// each printing exactly one PASS/FAIL line. Exit code is the number of
// failed checks (0 = all green). No test framework on purpose: this binary
// is the contract, readable top to bottom.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "homebench/bench.hpp"
#include "homebench/episode.hpp"
#include "homebench/forge.hpp"
#include "homebench/metrics.hpp"
#include "homebench/planner.hpp"
#include "homebench/render.hpp"
#include "homebench/scripted.hpp"
#include "oracles.hpp"

using namespace homebench;
using actions::Action;
using scene::AtRegion;
using scene::InsideFixture;
using scene::Location;
using scene::Predicate;
using scene::PredicateSet;

namespace fs = std::filesystem;

namespace {

struct Check {
  bool pass = true;
  std::ostringstream detail;

  // Record a requirement; on failure, append the explanation.
  void require(bool ok, const std::string& on_fail) {
    if (!ok) {
      pass = false;
      if (detail.tellp() > 0) detail << "; ";
      detail << on_fail;
    }
  }
  void note(const std::string& text) {
    if (detail.tellp() > 0) detail << "; ";
    detail << text;
  }
};

std::string fmt(double v, int decimals = 2) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

std::string kitchen_path() {
  return std::string(HOMEBENCH_SHARE_DIR) + "/registries/kitchen.json";
}

scene::SceneRegistry kitchen() {
  return scene::SceneRegistry::from_json(load_json_file(kitchen_path()));
}

// --- small scene builders ---------------------------------------------------

// floor + goal surface + N lidded boxes, token inside `target`; boxes start
// open or closed as asked.
scene::SceneRegistry box_row(const std::vector<std::string>& boxes,
                             const std::string& target, bool start_open) {
  using namespace homebench::scene;
  std::vector<FixtureDecl> fixtures;
  FixtureDecl floor;
  floor.id = "floor";
  floor.regions.push_back({"floor", 0});
  fixtures.push_back(floor);
  FixtureDecl table;
  table.id = "table";
  table.regions.push_back({"goal_top", 0});
  fixtures.push_back(table);
  for (const auto& id : boxes) {
    FixtureDecl c;
    c.id = id;
    c.container = true;
    c.articulation = start_open ? Articulation::Open : Articulation::Closed;
    fixtures.push_back(c);
  }
  return SceneRegistry(std::move(fixtures),
                       {{"coin", Location{InsideFixture{target}}}});
}

task::TaskSpec hidden_task(task::MemoryMeta::Style style,
                           const std::vector<std::string>& order,
                           const std::string& target_box) {
  task::TaskSpec t;
  t.id = "hidden";
  t.instruction = "Find the coin and put it on the table.";
  task::MemoryMeta m;
  m.style = style;
  m.candidates = order;
  m.target = "coin";
  m.target_container = target_box;
  m.goal_region = "goal_top";
  t.memory = m;
  t.category = style == task::MemoryMeta::Style::Exploration
                   ? task::Category::MemoryExploration
                   : task::Category::MemoryExecution;
  t.gt_plan = {Action::open(target_box), Action::pick("coin"),
               Action::place("coin", AtRegion{"goal_top"})};
  t.key_transitions = {PredicateSet({Predicate::holding("coin")}),
                       PredicateSet({Predicate::at_region("coin", "goal_top")})};
  t.goal = PredicateSet({Predicate::at_region("coin", "goal_top")});
  return t;
}

// --- criteria ---------------------------------------------------------------

// 1. A ground-truth planner under clean conditions sweeps the default
//    60-task suite perfectly, declaring done everywhere, in under 10 s.
Check oracle_ceiling(const fs::path& tmp) {
  Check c;
  auto suite =
      forge::emit_suite(kitchen(), kitchen_path(), tmp / "suite-default", {});

  bench::RunConfig cfg;
  cfg.registry_path = kitchen_path();
  cfg.suite_path = suite.string();
  cfg.archive_root = (tmp / "archives-ceiling").string();
  cfg.planner.kind = "gt";
  cfg.noise = {1.0, 0.0};
  cfg.perturbations = false;
  cfg.observability = sim::Observability::Full;
  cfg.trials = 1;
  cfg.seed = 0;

  const auto t0 = std::chrono::steady_clock::now();
  auto outcome = bench::run_benchmark(cfg);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  c.require(outcome.episodes == 60,
            "expected 60 episodes, ran " + std::to_string(outcome.episodes));
  c.require(outcome.report.overall.sr == 100.0,
            "SR " + fmt(outcome.report.overall.sr) + " != 100.00");
  c.require(outcome.report.overall.acc_p == 100.0,
            "Acc_P " + fmt(outcome.report.overall.acc_p) + " != 100.00");

  int declared = 0;
  const Json scores = load_json_file(outcome.archive_dir / "scores.json");
  for (const auto& s : scores.at("scores")) {
    if (s.at("declared_done") == true) ++declared;
  }
  c.require(declared == outcome.episodes,
            std::to_string(declared) + "/" + std::to_string(outcome.episodes) +
                " episodes declared done");
  c.require(secs < 10.0, "took " + fmt(secs, 2) + " s (limit 10)");
  c.note("60 episodes, SR=" + fmt(outcome.report.overall.sr) + ", Acc_P=" +
         fmt(outcome.report.overall.acc_p) + ", all declared done, " +
         fmt(secs, 2) + " s");
  return c;
}

// 2. The efficiency ratio reproduces the published reference pairs, with
//    the one known-discrepant pair held to its looser tolerance and called
//    out in the report footer.
Check reference_ratios() {
  Check c;
  struct Pair {
    double sr, len, printed, tol;
  };
  const std::vector<Pair> pairs = {{16.04, 10.67, 1.50, 0.01},
                                   {15.10, 10.73, 1.41, 0.01},
                                   {11.37, 8.33, 1.36, 0.01},
                                   {11.19, 8.30, 1.34, 0.01}};
  for (const auto& p : pairs) {
    const double got = metrics::plan_efficiency(p.sr, p.len);
    c.require(std::abs(got - p.printed) <= p.tol,
              fmt(p.sr) + "/" + fmt(p.len) + " = " + fmt(got, 4) +
                  ", printed " + fmt(p.printed));
  }
  const double audited = metrics::plan_efficiency(9.33, 6.95);
  c.require(std::abs(audited - 1.342) < 5e-4,
            "audited pair computes to " + fmt(audited, 4) + ", not 1.342");
  c.require(std::abs(audited - 1.32) <= 0.03,
            "audited pair " + fmt(audited, 4) + " off printed 1.32 by more than 0.03");

  // The discrepancy is disclosed on every report.
  metrics::TaskScore dummy;
  dummy.task_id = "probe";
  dummy.executions = 1;
  auto rep = metrics::aggregate({dummy});
  bool disclosed = false;
  for (const auto& note : rep.footnotes) {
    if (note.find("1.342") != std::string::npos &&
        note.find("1.32") != std::string::npos &&
        note.find("0.03") != std::string::npos) {
      disclosed = true;
    }
  }
  c.require(disclosed, "no footer note discloses the 1.342-vs-1.32 audit");
  c.note("4 pairs within 0.01; audited pair " + fmt(audited, 3) +
         " vs printed 1.32 within 0.03, disclosed in the footer");
  return c;
}

// 3. A scripted mid-episode drop defeats a non-replanning executor on the
//    affected transition and is fully healed by replanning, at p = 1.
Check disturbance_replan() {
  Check c;
  auto reg = oracles::tiny_registry();
  task::TaskSpec t;
  t.id = "drop-probe";
  t.instruction = "Move the ball to the desk.";
  t.gt_plan = {Action::pick("ball"), Action::place("ball", AtRegion{"desk_top"})};
  t.key_transitions = {PredicateSet({Predicate::holding("ball")}),
                       PredicateSet({Predicate::at_region("ball", "desk_top")})};
  t.goal = PredicateSet({Predicate::at_region("ball", "desk_top")});
  task::PerturbationEvent ev;
  ev.trigger = task::AfterTransition{1};
  ev.effect = task::DropHeld{};
  t.perturbations.push_back(ev);

  episode::EpisodeConfig cfg;
  cfg.noise = {1.0, 0.0};

  int healed = 0, stuck = 0;
  const int seeds = 5;
  for (int i = 0; i < seeds; ++i) {
    const std::uint64_t seed = 100 + static_cast<std::uint64_t>(i);
    planner::ScriptedOptions frozen;
    frozen.replan = false;
    planner::ScriptedPlanner no_replan(frozen, seed);
    auto r0 = episode::run_episode(reg, t, seed, cfg, no_replan, nullptr);
    // The drop lands after the first transition; without replanning the
    // second (affected) transition must never be reached.
    if (r0.transitions_achieved == 1) ++stuck;

    planner::ScriptedPlanner with_replan({}, seed);
    auto r1 = episode::run_episode(reg, t, seed, cfg, with_replan, nullptr);
    if (r1.transitions_achieved == 2 &&
        r1.status == episode::EpisodeStatus::Done) {
      ++healed;
    }
  }
  c.require(stuck == seeds, "affected transition reached without replanning in " +
                                std::to_string(seeds - stuck) + " of " +
                                std::to_string(seeds) + " runs");
  c.require(healed == seeds, "replanning healed only " + std::to_string(healed) +
                                 " of " + std::to_string(seeds) + " runs");
  c.note("affected-transition SR 0.00 without replan, 1.00 with replan (" +
         std::to_string(seeds) + " seeds, p=1)");
  return c;
}

// 4. Hidden-target sweeps: for every box count C in {2,3,4}, every target
//    slot, and every sweep order, the executor opens exactly `slot` boxes
//    and the sweep-efficiency metric equals the ordering oracle exactly.
Check exhaustive_sweeps() {
  Check c;
  int episodes = 0;
  for (int n = 2; n <= 4; ++n) {
    std::vector<std::string> boxes;
    for (int i = 0; i < n; ++i) boxes.push_back("k" + std::to_string(i + 1));
    const std::string target = boxes.front();  // slot varies with the order
    auto reg = box_row(boxes, target, /*start_open=*/false);

    std::vector<std::string> order = boxes;
    std::sort(order.begin(), order.end());
    do {
      const int slot = static_cast<int>(
          std::find(order.begin(), order.end(), target) - order.begin() + 1);
      auto t = hidden_task(task::MemoryMeta::Style::Exploration, order, target);
      planner::ScriptedPlanner planner({}, 7000 + episodes);
      episode::EpisodeConfig cfg;
      cfg.noise = {1.0, 0.0};
      auto res = episode::run_episode(reg, t, 7000 + episodes, cfg, planner,
                                      nullptr);
      ++episodes;

      c.require(res.status == episode::EpisodeStatus::Done,
                "episode not done for C=" + std::to_string(n) + " slot " +
                    std::to_string(slot));
      c.require(res.branch_correct, "committed to the wrong box");

      int opens = 0;
      for (const auto& a : res.explore_trace) {
        if (a.type == actions::ActionType::Open) ++opens;
      }
      c.require(opens == slot, "opened " + std::to_string(opens) +
                                   " boxes for target slot " +
                                   std::to_string(slot));

      const auto expected = oracles::expected_sweep(order, slot);
      bool same = expected.size() == res.explore_trace.size();
      for (std::size_t i = 0; same && i < expected.size(); ++i) {
        same = expected[i].text() == res.explore_trace[i].text();
      }
      c.require(same, "sweep differs from the ordering oracle for C=" +
                          std::to_string(n) + " slot " + std::to_string(slot));

      // Metric pipeline vs an independent derivation, bit for bit.
      auto score = metrics::score_episode(t, res, 0, false);
      auto rep = metrics::aggregate({score});
      actions::Plan ref_sweep;
      for (const auto& step : t.gt_plan) {
        if (step.type != actions::ActionType::Open) break;
        ref_sweep.push_back(step);
      }
      const double oracle_eta =
          oracles::overlap_by_sorting(res.explore_trace, ref_sweep) /
          static_cast<double>(res.explore_trace.size());
      c.require(rep.memory.eta_exp.has_value() &&
                    *rep.memory.eta_exp == oracle_eta,
                "sweep efficiency diverges from the ordering oracle");
    } while (std::next_permutation(order.begin(), order.end()));
  }
  c.note(std::to_string(episodes) +
         " sweep episodes (C=2,3,4, all orders): opens == target slot, "
         "efficiency matches the ordering oracle to machine precision");
  return c;
}

// 5. Recall tasks: without the location memory the retrieval guess sits at
//    chance (exact binomial test), with it every episode succeeds at p = 1.
Check memory_vs_chance() {
  Check c;
  const std::vector<std::string> boxes = {"k1", "k2", "k3"};
  auto reg = box_row(boxes, "k2", /*start_open=*/true);
  auto t = hidden_task(task::MemoryMeta::Style::Execution, boxes, "k2");
  episode::EpisodeConfig cfg;
  cfg.noise = {1.0, 0.0};

  const int trials = 100;
  int blind_hits = 0, recall_hits = 0;
  for (int i = 0; i < trials; ++i) {
    const std::uint64_t seed = 2000 + static_cast<std::uint64_t>(i);
    planner::ScriptedOptions amnesiac;
    amnesiac.use_memory = false;
    planner::ScriptedPlanner guesser(amnesiac, seed);
    auto r0 = episode::run_episode(reg, t, seed, cfg, guesser, nullptr);
    if (r0.transitions_achieved == 2) ++blind_hits;

    planner::ScriptedPlanner recaller({}, seed);
    auto r1 = episode::run_episode(reg, t, seed, cfg, recaller, nullptr);
    if (r1.transitions_achieved == 2 &&
        r1.status == episode::EpisodeStatus::Done) {
      ++recall_hits;
    }
  }

  // One-sided exact binomial: can we reject "success <= 1/3"? We must not.
  const long double tail =
      oracles::binomial_upper_tail(trials, blind_hits, 1.0L / 3.0L);
  c.require(tail > 0.01L,
            "memoryless " + std::to_string(blind_hits) + "/100 beats chance "
            "(upper tail " + fmt(static_cast<double>(tail), 4) + " < 0.01)");
  c.require(recall_hits == trials, "with memory only " +
                                       std::to_string(recall_hits) +
                                       "/100 succeeded at p=1");
  c.note("memoryless " + std::to_string(blind_hits) +
         "/100 (chance 1/3, binomial upper tail " +
         fmt(static_cast<double>(tail), 3) + " > 0.01); with memory 100/100");
  return c;
}

// 6. Retry algebra: with per-primitive success 0.9 and three attempts per
//    subgoal, measured subgoal success over 10,000 episodes lands on
//    1 - (1-p)^3 = 0.999 within +-0.005.
Check retry_composition() {
  Check c;
  auto reg = oracles::tiny_registry();
  task::TaskSpec t;
  t.id = "grasp-probe";
  t.instruction = "Pick up the ball.";
  t.gt_plan = {Action::pick("ball")};
  t.key_transitions = {PredicateSet({Predicate::holding("ball")})};
  t.goal = PredicateSet({Predicate::holding("ball")});

  episode::EpisodeConfig cfg;
  cfg.noise = {0.9, 0.0};
  cfg.max_subgoal_attempts = 3;

  const int trials = 10000;
  int achieved = 0;
  for (int i = 0; i < trials; ++i) {
    const std::uint64_t seed = derive_seed(31337, t.id, i);
    planner::ScriptedPlanner planner({}, seed);
    auto res = episode::run_episode(reg, t, seed, cfg, planner, nullptr);
    if (res.transitions_achieved == 1) ++achieved;
  }
  const double frac = static_cast<double>(achieved) / trials;
  c.require(std::abs(frac - 0.999) <= 0.005,
            "measured " + fmt(frac, 4) + ", expected 0.999 +- 0.005");
  c.note("subgoal success " + fmt(frac, 4) + " over 10000 episodes (expect "
         "1-(1-0.9)^3 = 0.999 +- 0.005)");
  return c;
}

// 7. Archives are reproducible artifacts: every trace replays to identical
//    bytes, and re-running the same config rewrites the same report bytes.
Check archive_reproducibility(const fs::path& tmp) {
  Check c;
  forge::SuiteOptions opt;
  opt.seed = 21;
  opt.per_category = 2;
  opt.name = "replay-mini";
  auto suite = forge::emit_suite(kitchen(), kitchen_path(), tmp / "suite-replay", opt);

  bench::RunConfig cfg;
  cfg.registry_path = kitchen_path();
  cfg.suite_path = suite.string();
  cfg.archive_root = (tmp / "archives-replay").string();
  cfg.noise = {0.9, 0.3};
  cfg.trials = 2;
  cfg.seed = 42;

  auto first = bench::run_benchmark(cfg);
  const std::string report_bytes = slurp(first.archive_dir / "report.json");
  const std::string scores_bytes = slurp(first.archive_dir / "scores.json");
  const std::string manifest_bytes = slurp(first.archive_dir / "manifest.json");

  int replayed = 0, identical = 0;
  for (const auto& entry :
       fs::directory_iterator(first.archive_dir / "traces")) {
    ++replayed;
    auto verdict = bench::replay_trace(entry.path());
    if (verdict.identical) {
      ++identical;
    } else {
      c.require(false, entry.path().filename().string() + ": " + verdict.detail);
    }
  }
  c.require(replayed == 24, "expected 24 traces, found " +
                                std::to_string(replayed));

  auto second = bench::run_benchmark(cfg);
  c.require(second.archive_dir == first.archive_dir,
            "same config landed in a different archive");
  c.require(slurp(second.archive_dir / "report.json") == report_bytes,
            "report.json changed across identical runs");
  c.require(slurp(second.archive_dir / "scores.json") == scores_bytes,
            "scores.json changed across identical runs");
  c.require(slurp(second.archive_dir / "manifest.json") == manifest_bytes,
            "manifest.json changed across identical runs");
  c.note(std::to_string(identical) + "/" + std::to_string(replayed) +
         " traces replay bit-identically; identical rerun rewrote "
         "byte-equal report, scores, and manifest");
  return c;
}

// 8. Every ill-formed task in the shipped corpus is rejected with the exact
//    precondition predicate it violates.
Check negative_corpus() {
  Check c;
  struct Expectation {
    const char* file;
    const char* code;
    Predicate violated;
  };
  const std::vector<Expectation> corpus = {
      {"pick-from-closed.json", "precondition", Predicate::open("short_fridge")},
      {"pick-while-holding.json", "precondition", Predicate::gripper_empty()},
      {"pour-without-holding.json", "precondition", Predicate::holding("milk")},
      {"place-unheld.json", "precondition", Predicate::holding("mug")},
      {"store-into-closed.json", "precondition", Predicate::open("microwave")},
      {"close-the-closed.json", "precondition", Predicate::open("drawer_left")},
      {"open-the-open.json", "precondition", Predicate::closed("cabinet_top")},
      {"overfilled-heater.json", "precondition",
       Predicate::empty_container("microwave")},
      {"wrong-spot-grasp.json", "precondition",
       Predicate::at_region("apple", "counter_side")},
      {"place-into-closed.json", "precondition", Predicate::open("short_fridge")},
      {"misfiled-grasp.json", "precondition",
       Predicate::inside("apple", "drawer_left")},
      {"vanishing-transition.json", "transitions-unreached",
       Predicate::at_region("mug", "dining_table_top")},
  };
  c.require(corpus.size() >= 10, "corpus smaller than 10 entries");

  auto reg = kitchen();
  const fs::path dir = fs::path(HOMEBENCH_TEST_DATA_DIR) / "negative";
  int matched = 0;
  for (const auto& e : corpus) {
    auto t = task::load_task(dir / e.file);
    auto report = forge::verify_task(reg, t);
    bool ok = false;
    if (!report.ok()) {
      for (const auto& f : report.findings) {
        if (f.code == e.code && f.violated && *f.violated == e.violated) {
          ok = true;
        }
      }
    }
    if (ok) {
      ++matched;
    } else {
      c.require(false, std::string(e.file) +
                           " not rejected with the expected predicate");
    }
  }
  c.note(std::to_string(matched) + "/" + std::to_string(corpus.size()) +
         " corpus tasks rejected naming the exact violated precondition");
  return c;
}

// 9. An open-loop planner's outputs are a pure function of task and seed:
//    swapping in 50 fabricated observations changes nothing.
Check open_loop_invariance() {
  Check c;
  auto reg = oracles::tiny_registry();
  task::TaskSpec t;
  t.id = "blind-probe";
  t.instruction = "Move the ball to the desk.";
  t.gt_plan = {Action::pick("ball"), Action::place("ball", AtRegion{"desk_top"})};
  t.key_transitions = {PredicateSet({Predicate::holding("ball")}),
                       PredicateSet({Predicate::at_region("ball", "desk_top")})};
  t.goal = PredicateSet({Predicate::at_region("ball", "desk_top")});
  t.questions = {
      {"q1", "Is the cubby shut?", Predicate::closed("cubby"), 0},
      {"q2", "Holding the ball?", Predicate::holding("ball"), 0}};

  sim::EnvState env(reg, t, 7, {1.0, 0.0}, sim::Observability::Partial, true);
  const sim::Observation base = env.observe();

  // One full conversation with the planner, serialized.
  auto transcript = [&](const sim::Observation& obs) {
    auto p = planner::make_planner({"blind-scripted", true, true, 0}, 33);
    std::ostringstream s;
    for (const auto& a : p->plan(t, obs)) s << a.text() << ";";
    planner::WindowReport w;
    w.subgoal_index = 0;
    w.subgoal = t.gt_plan[0];
    auto j = p->reflect(t, w);
    s << "|reflect " << j.complete << " " << j.note;
    auto d1 = p->decide(t, obs, false);
    s << "|decide " << planner::decision_name(d1.kind) << " " << d1.advance_to
      << " " << d1.rationale;
    auto d2 = p->decide(t, obs, true);
    s << "|final " << planner::decision_name(d2.kind) << " " << d2.rationale;
    for (const auto& q : t.questions) s << "|answer " << p->answer(q, obs);
    return s.str();
  };

  const std::string reference = transcript(base);
  const std::vector<std::string> spots = {"table_top", "desk_top", "floor"};
  Rng scrambler(424242);
  int unchanged = 0;
  const int variants = 50;
  for (int v = 0; v < variants; ++v) {
    sim::Observation fake = base;
    for (auto& [id, loc] : fake.objects) {
      const auto roll = scrambler.below(4);
      loc = roll < 3 ? Location{AtRegion{spots[roll]}}
                     : Location{InsideFixture{"cubby"}};
    }
    for (auto& [id, st] : fake.fixtures) {
      if (scrambler.chance(0.5)) {
        st.articulation = st.articulation == scene::Articulation::Open
                              ? scene::Articulation::Closed
                              : scene::Articulation::Open;
      }
    }
    if (scrambler.chance(0.3)) {
      fake.held = "ball";
      fake.objects.erase("ball");
    }
    fake.clock = static_cast<std::int64_t>(scrambler.below(1000));
    if (transcript(fake) == reference) {
      ++unchanged;
    } else {
      c.require(false, "variant " + std::to_string(v) + " changed the output");
    }
  }
  c.note(std::to_string(unchanged) + "/" + std::to_string(variants) +
         " fabricated observations left plan, decisions, and answers "
         "byte-identical");
  return c;
}

}  // namespace

int main() {
  oracles::TempDir tmp{"acceptance"};
  const std::vector<std::pair<int, std::function<Check()>>> criteria = {
      {1, [&] { return oracle_ceiling(tmp.path()); }},
      {2, [] { return reference_ratios(); }},
      {3, [] { return disturbance_replan(); }},
      {4, [] { return exhaustive_sweeps(); }},
      {5, [] { return memory_vs_chance(); }},
      {6, [] { return retry_composition(); }},
      {7, [&] { return archive_reproducibility(tmp.path()); }},
      {8, [] { return negative_corpus(); }},
      {9, [] { return open_loop_invariance(); }},
  };

  int failures = 0;
  for (const auto& [id, fn] : criteria) {
    Check c;
    try {
      c = fn();
    } catch (const std::exception& e) {
      c.pass = false;
      c.detail << "exception: " << e.what();
    }
    if (!c.pass) ++failures;
    std::printf("ACCEPTANCE %d: %s — %s\n", id, c.pass ? "PASS" : "FAIL",
                c.detail.str().c_str());
    std::fflush(stdout);
  }
  if (failures > 0) {
    std::printf("%d of %zu acceptance criteria failed\n", failures,
                criteria.size());
  }
  return failures == 0 ? 0 : 1;
}
