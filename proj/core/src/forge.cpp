#include "homebench/forge.hpp"

#include <algorithm>
#include <cstdio>

#include "homebench/error.hpp"
#include "homebench/expand.hpp"
#include "homebench/rng.hpp"
#include "homebench/sim.hpp"

namespace homebench::forge {

using actions::Action;
using actions::ActionType;
using scene::Articulation;
using scene::AtRegion;
using scene::FixtureId;
using scene::InsideFixture;
using scene::Location;
using scene::ObjectId;
using scene::Predicate;
using scene::PredicateKind;
using scene::PredicateSet;
using scene::Power;
using scene::RegionId;
using scene::SceneRegistry;
using task::Category;
using task::MemoryMeta;
using task::TaskSpec;

Json VerifyFinding::to_json() const {
  Json j;
  j["step"] = step;
  j["code"] = code;
  if (violated) j["violated"] = violated->to_json();
  j["message"] = message;
  return j;
}

Json VerifyReport::to_json() const {
  Json j;
  j["ok"] = ok();
  j["findings"] = Json::array();
  for (const auto& f : findings) j["findings"].push_back(f.to_json());
  j["transition_steps"] = transition_steps;
  return j;
}

namespace {

void check_predicate_ids(const SceneRegistry& reg, const Predicate& p,
                         const std::string& where,
                         std::vector<VerifyFinding>& out) {
  auto bad = [&](const std::string& msg) {
    out.push_back({-1, "unknown-id", p, where + ": " + msg});
  };
  switch (p.kind) {
    case PredicateKind::AtRegion:
      if (!reg.has_object(p.subject)) bad("no object " + p.subject);
      if (!reg.has_region(p.where)) bad("no region " + p.where);
      break;
    case PredicateKind::Inside:
      if (!reg.has_object(p.subject)) bad("no object " + p.subject);
      if (!reg.has_fixture(p.where) || !reg.fixture(p.where).container) {
        bad("no container " + p.where);
      }
      break;
    case PredicateKind::Open:
    case PredicateKind::Closed:
      if (!reg.has_fixture(p.subject) ||
          reg.fixture(p.subject).articulation == Articulation::Fixed) {
        bad("no articulating fixture " + p.subject);
      }
      break;
    case PredicateKind::Holding:
      if (!reg.has_object(p.subject)) bad("no object " + p.subject);
      break;
    case PredicateKind::GripperEmpty:
      break;
    case PredicateKind::PoweredOn:
      if (!reg.has_fixture(p.subject) || reg.fixture(p.subject).power == Power::None) {
        bad("no powered fixture " + p.subject);
      }
      break;
    case PredicateKind::EmptyContainer:
      if (!reg.has_fixture(p.subject) || !reg.fixture(p.subject).container) {
        bad("no container " + p.subject);
      }
      break;
  }
}

void check_location_ids(const SceneRegistry& reg, const Location& loc,
                        const std::string& where,
                        std::vector<VerifyFinding>& out) {
  if (const auto* r = std::get_if<AtRegion>(&loc)) {
    if (!reg.has_region(r->region)) {
      out.push_back({-1, "unknown-id", std::nullopt, where + ": no region " + r->region});
    }
  } else if (const auto* f = std::get_if<InsideFixture>(&loc)) {
    if (!reg.has_fixture(f->fixture) || !reg.fixture(f->fixture).container) {
      out.push_back(
          {-1, "unknown-id", std::nullopt, where + ": no container " + f->fixture});
    }
  }
}

void check_action_ids(const SceneRegistry& reg, const Action& a, int step,
                      std::vector<VerifyFinding>& out) {
  const std::string where = "plan step " + std::to_string(step);
  switch (a.type) {
    case ActionType::Pick:
    case ActionType::Place:
    case ActionType::Pour:
    case ActionType::Push:
    case ActionType::Store:
    case ActionType::Return:
      if (!reg.has_object(*a.object)) {
        out.push_back({step, "unknown-id", std::nullopt, where + ": no object " + *a.object});
      }
      break;
    case ActionType::Open:
    case ActionType::Close:
    case ActionType::Turn:
    case ActionType::Press:
      if (!reg.has_fixture(*a.object)) {
        out.push_back(
            {step, "unknown-id", std::nullopt, where + ": no fixture " + *a.object});
      }
      break;
    case ActionType::Move:
    case ActionType::Wait:
      break;
  }
  if (a.source) check_location_ids(reg, *a.source, where, out);
  if (a.target) check_location_ids(reg, *a.target, where, out);
}

void check_category_shape(const SceneRegistry& reg, const TaskSpec& t,
                          const scene::SceneState& start,
                          std::vector<VerifyFinding>& out) {
  auto shape = [&](const std::string& msg) {
    out.push_back({-1, "category-shape", std::nullopt, msg});
  };
  const bool has_events = !t.perturbations.empty();
  const bool has_stale = !t.stale_beliefs.empty();
  switch (t.category) {
    case Category::Ideal:
      if (has_events) shape("ideal task carries mid-episode events");
      if (has_stale) shape("ideal task carries stale beliefs");
      if (t.memory) shape("ideal task carries hidden-target metadata");
      return;
    case Category::RandomDisturbance:
      if (!has_events) shape("disturbance task has no mid-episode event");
      if (has_stale) shape("disturbance task carries stale beliefs");
      return;
    case Category::ObservationMismatching:
      if (!has_stale) shape("mismatch task has no stale belief");
      if (has_events) shape("mismatch task carries mid-episode events");
      return;
    case Category::MemoryExploration:
    case Category::MemoryExecution:
    case Category::Mix:
      break;
  }
  if (!t.memory) {
    shape("hidden-target task lacks metadata");
    return;
  }
  if (t.category == Category::Mix && !has_events) {
    shape("mix task has no mid-episode event");
  }
  const auto& m = *t.memory;
  if (t.category == Category::MemoryExploration &&
      m.style != MemoryMeta::Style::Exploration) {
    shape("category and memory style disagree");
  }
  if (t.category == Category::MemoryExecution &&
      m.style != MemoryMeta::Style::Execution) {
    shape("category and memory style disagree");
  }
  bool target_in_candidates = false;
  for (const auto& c : m.candidates) {
    if (!reg.has_fixture(c) || !reg.fixture(c).container) {
      shape("candidate " + c + " is not a container");
      continue;
    }
    if (c == m.target_container) target_in_candidates = true;
    auto st = start.fixtures.find(c);
    if (st == start.fixtures.end()) continue;
    if (m.style == MemoryMeta::Style::Exploration &&
        st->second.articulation != Articulation::Closed) {
      shape("candidate " + c + " must start closed");
    }
    if (m.style == MemoryMeta::Style::Execution &&
        st->second.articulation != Articulation::Open) {
      shape("candidate " + c + " must start open");
    }
  }
  if (!target_in_candidates) {
    shape("target container is not among the candidates");
  }
  if (!reg.has_object(m.target)) {
    shape("no such target object " + m.target);
    return;
  }
  if (!reg.has_region(m.goal_region)) {
    shape("no such goal region " + m.goal_region);
  }
  auto placed = start.placements.find(m.target);
  if (placed == start.placements.end()) {
    shape("target has no starting placement");
    return;
  }
  auto owner = scene::containing_fixture(reg, placed->second);
  if (!owner || *owner != m.target_container) {
    shape("target does not start inside " + m.target_container);
  }
}

}  // namespace

VerifyReport verify_task(const SceneRegistry& registry, const TaskSpec& t) {
  VerifyReport report;
  auto& out = report.findings;

  if (t.gt_plan.empty()) {
    out.push_back({-1, "empty-plan", std::nullopt, "reference plan has no steps"});
  }
  for (std::size_t i = 0; i < t.gt_plan.size(); ++i) {
    check_action_ids(registry, t.gt_plan[i], static_cast<int>(i), out);
  }
  for (const auto& s : t.key_transitions) {
    for (const auto& p : s.members()) {
      check_predicate_ids(registry, p, "key transition", out);
    }
  }
  for (const auto& p : t.goal.members()) {
    check_predicate_ids(registry, p, "goal", out);
  }
  for (const auto& q : t.questions) {
    check_predicate_ids(registry, q.probe, "question " + q.id, out);
    if (q.due_after < 0 || q.due_after > static_cast<int>(t.key_transitions.size())) {
      out.push_back({-1, "question-window", std::nullopt,
                     "question " + q.id + " due after missing transition"});
    }
  }
  for (const auto& [obj, loc] : t.stale_beliefs) {
    if (!registry.has_object(obj)) {
      out.push_back({-1, "unknown-id", std::nullopt, "stale entry for no object " + obj});
    }
    check_location_ids(registry, loc, "stale entry " + obj, out);
  }
  for (const auto& ev : t.perturbations) {
    if (const auto* r = std::get_if<task::Relocate>(&ev.effect)) {
      if (!registry.has_object(r->object)) {
        out.push_back(
            {-1, "unknown-id", std::nullopt, "event moves no object " + r->object});
      }
      check_location_ids(registry, r->to, "event target", out);
    }
    if (const auto* k = std::get_if<task::AfterTransition>(&ev.trigger)) {
      if (k->k < 1 || k->k > static_cast<int>(t.key_transitions.size())) {
        out.push_back({-1, "event-window", std::nullopt,
                       "event waits on missing transition " + std::to_string(k->k)});
      }
    }
  }
  for (const auto& [id, _] : t.initial.fixtures) {
    if (!registry.has_fixture(id)) {
      out.push_back({-1, "unknown-id", std::nullopt, "initial state for no fixture " + id});
    }
  }
  for (const auto& [id, loc] : t.initial.placements) {
    if (!registry.has_object(id)) {
      out.push_back({-1, "unknown-id", std::nullopt, "initial state for no object " + id});
    }
    check_location_ids(registry, loc, "initial placement " + id, out);
  }
  if (!out.empty()) return report;  // ids unsafe to evaluate further

  scene::SceneState start = task::starting_state(registry, t);
  auto scene_report = scene::validate_scene(registry, start);
  for (const auto& f : scene_report.findings) {
    out.push_back({-1, "scene-" + f.code, std::nullopt, f.message});
  }
  check_category_shape(registry, t, start, out);
  if (!out.empty()) return report;

  // Literal rehearsal: every plan step as a single primitive, no repairs.
  sim::EnvState env(registry, t, /*episode_seed=*/0, sim::NoiseConfig{1.0, 0.0},
                    sim::Observability::Full, /*perturbations_enabled=*/false);
  std::size_t next_k = 0;
  auto sweep = [&] {
    while (next_k < t.key_transitions.size() &&
           scene::eval_set(registry, env.truth(), t.key_transitions[next_k])) {
      report.transition_steps.push_back(env.clock());
      ++next_k;
    }
  };
  sweep();
  for (std::size_t i = 0; i < t.gt_plan.size(); ++i) {
    for (const auto& prim : expand::strict_expand(t.gt_plan[i])) {
      auto outcome = env.step(prim);
      if (outcome.status != sim::StepStatus::Succeeded) {
        out.push_back({static_cast<int>(i), "precondition", outcome.violated,
                       prim.text() + ": " + outcome.message});
      }
    }
    sweep();
  }
  if (next_k < t.key_transitions.size()) {
    out.push_back({-1, "transitions-unreached",
                   t.key_transitions[next_k].members().front(),
                   "plan never reaches key transition " + std::to_string(next_k + 1)});
  }
  if (!scene::eval_set(registry, env.truth(), t.goal)) {
    out.push_back({-1, "goal-unsatisfied", std::nullopt,
                   "goal does not hold after the reference plan"});
  }
  return report;
}

// ---------------------------------------------------------------------------
// Generation
// ---------------------------------------------------------------------------

namespace {

std::string pretty(const std::string& id) {
  std::string s = id;
  std::replace(s.begin(), s.end(), '_', ' ');
  return s;
}

struct Pools {
  std::vector<RegionId> surfaces;  // uncapped regions on non-container fixtures
  std::vector<ObjectId> loose;     // objects starting on a surface
  std::vector<std::pair<ObjectId, FixtureId>> stowed;  // behind a closed door
  std::vector<FixtureId> containers;                   // uncapped containers
  std::vector<FixtureId> powered;
  std::optional<FixtureId> heater;  // powered single-slot container
};

Pools scan(const SceneRegistry& reg) {
  Pools p;
  for (const auto& f : reg.fixtures()) {
    if (!f.container) {
      for (const auto& r : f.regions) {
        if (r.capacity == 0 && r.id != sim::kFloorRegion) p.surfaces.push_back(r.id);
      }
    } else if (f.capacity == 0) {
      p.containers.push_back(f.id);
    } else if (f.capacity == 1 && f.power != Power::None) {
      p.heater = f.id;
    }
    if (f.power != Power::None) p.powered.push_back(f.id);
  }
  for (const auto& [obj, loc] : reg.objects()) {
    auto owner = scene::containing_fixture(reg, loc);
    if (owner) {
      if (reg.fixture(*owner).articulation == Articulation::Closed) {
        p.stowed.emplace_back(obj, *owner);
      }
    } else if (const auto* r = std::get_if<AtRegion>(&loc)) {
      if (r->region != sim::kFloorRegion) p.loose.push_back(obj);
    }
  }
  return p;
}

template <typename T>
const T& pick_one(Rng& rng, const std::vector<T>& pool, const char* what) {
  if (pool.empty()) throw UnsatisfiableConstraintError(std::string("registry has no ") + what);
  return pool[rng.below(pool.size())];
}

// n distinct entries, pool order preserved.
template <typename T>
std::vector<T> pick_distinct(Rng& rng, const std::vector<T>& pool, std::size_t n,
                             const char* what) {
  if (pool.size() < n) {
    throw UnsatisfiableConstraintError(std::string("registry has too few ") + what);
  }
  std::vector<std::size_t> idx(pool.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  for (std::size_t i = 0; i < n; ++i) {
    std::swap(idx[i], idx[i + rng.below(idx.size() - i)]);
  }
  idx.resize(n);
  std::sort(idx.begin(), idx.end());
  std::vector<T> out;
  for (auto i : idx) out.push_back(pool[i]);
  return out;
}

RegionId surface_excluding(Rng& rng, const Pools& pools,
                           const std::vector<RegionId>& exclude) {
  std::vector<RegionId> filtered;
  for (const auto& r : pools.surfaces) {
    if (std::find(exclude.begin(), exclude.end(), r) == exclude.end()) {
      filtered.push_back(r);
    }
  }
  return pick_one(rng, filtered, "free surfaces");
}

std::optional<RegionId> default_region(const SceneRegistry& reg, const ObjectId& obj) {
  for (const auto& [id, loc] : reg.objects()) {
    if (id != obj) continue;
    if (const auto* r = std::get_if<AtRegion>(&loc)) return r->region;
  }
  return std::nullopt;
}

Location default_location(const SceneRegistry& reg, const ObjectId& obj) {
  for (const auto& [id, loc] : reg.objects()) {
    if (id == obj) return loc;
  }
  throw UnknownIdError(obj);
}

struct ShapeCtx {
  const SceneRegistry& reg;
  const Pools& pools;
  Rng& rng;
};

PredicateSet set_of(std::vector<Predicate> ps) { return PredicateSet(std::move(ps)); }

TaskSpec shape_relocate_pair(ShapeCtx& ctx) {
  auto objs = pick_distinct(ctx.rng, ctx.pools.loose, 2, "loose objects");
  const ObjectId a = objs[0], b = objs[1];
  std::vector<RegionId> exclude;
  if (auto r = default_region(ctx.reg, a)) exclude.push_back(*r);
  if (auto r = default_region(ctx.reg, b)) exclude.push_back(*r);
  RegionId g = surface_excluding(ctx.rng, ctx.pools, exclude);
  TaskSpec t;
  t.instruction = "Move the " + pretty(a) + " and the " + pretty(b) + " to the " +
                  pretty(g) + ".";
  t.gt_plan = {Action::pick(a, default_location(ctx.reg, a)),
               Action::place(a, AtRegion{g}),
               Action::pick(b, default_location(ctx.reg, b)),
               Action::place(b, AtRegion{g})};
  t.key_transitions = {set_of({Predicate::at_region(a, g)}),
                       set_of({Predicate::at_region(b, g)})};
  t.goal = set_of({Predicate::at_region(a, g), Predicate::at_region(b, g)});
  t.questions = {{"q1", "Is the " + pretty(a) + " on the " + pretty(g) + "?",
                  Predicate::at_region(a, g), 1},
                 {"q2", "Is the gripper empty?", Predicate::gripper_empty(), 2}};
  return t;
}

TaskSpec shape_fetch_from_container(ShapeCtx& ctx) {
  auto [x, c] = pick_one(ctx.rng, ctx.pools.stowed, "stowed objects");
  RegionId g = surface_excluding(ctx.rng, ctx.pools, {});
  TaskSpec t;
  t.instruction =
      "Bring the " + pretty(x) + " from the " + pretty(c) + " to the " + pretty(g) + ".";
  t.gt_plan = {Action::open(c), Action::pick(x, default_location(ctx.reg, x)),
               Action::place(x, AtRegion{g}), Action::close(c)};
  t.key_transitions = {set_of({Predicate::open(c)}), set_of({Predicate::holding(x)}),
                       set_of({Predicate::at_region(x, g)})};
  t.goal = set_of({Predicate::at_region(x, g), Predicate::closed(c)});
  t.questions = {{"q1", "Is the " + pretty(c) + " open?", Predicate::open(c), 1},
                 {"q2", "Are you holding the " + pretty(x) + "?",
                  Predicate::holding(x), 2}};
  return t;
}

TaskSpec shape_stow_away(ShapeCtx& ctx) {
  const ObjectId x = pick_one(ctx.rng, ctx.pools.loose, "loose objects");
  const FixtureId c = pick_one(ctx.rng, ctx.pools.containers, "containers");
  TaskSpec t;
  t.instruction = "Put the " + pretty(x) + " away in the " + pretty(c) + ".";
  t.gt_plan = {Action::pick(x, default_location(ctx.reg, x)), Action::open(c),
               Action::store(x, c), Action::close(c)};
  t.key_transitions = {set_of({Predicate::holding(x)}),
                       set_of({Predicate::inside(x, c)}),
                       set_of({Predicate::closed(c)})};
  t.goal = set_of({Predicate::inside(x, c), Predicate::closed(c)});
  t.questions = {{"q1", "Is the " + pretty(x) + " inside the " + pretty(c) + "?",
                  Predicate::inside(x, c), 2},
                 {"q2", "Is the gripper empty?", Predicate::gripper_empty(), 2}};
  return t;
}

TaskSpec shape_warm_up(ShapeCtx& ctx) {
  if (!ctx.pools.heater) {
    throw UnsatisfiableConstraintError("registry has no powered single-slot container");
  }
  const FixtureId mw = *ctx.pools.heater;
  const ObjectId x = pick_one(ctx.rng, ctx.pools.loose, "loose objects");
  TaskSpec t;
  t.instruction = "Warm the " + pretty(x) + " up in the " + pretty(mw) + ".";
  t.gt_plan = {Action::open(mw), Action::pick(x, default_location(ctx.reg, x)),
               Action::store(x, mw), Action::close(mw), Action::press(mw)};
  t.key_transitions = {set_of({Predicate::holding(x)}),
                       set_of({Predicate::inside(x, mw)}),
                       set_of({Predicate::powered_on(mw)})};
  t.goal = set_of({Predicate::inside(x, mw), Predicate::closed(mw),
                   Predicate::powered_on(mw)});
  t.questions = {{"q1", "Is the " + pretty(x) + " inside the " + pretty(mw) + "?",
                  Predicate::inside(x, mw), 2},
                 {"q2", "Is the " + pretty(mw) + " running?",
                  Predicate::powered_on(mw), 3}};
  return t;
}

std::string join_pretty(const std::vector<FixtureId>& ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i > 0) out += i + 1 == ids.size() ? " and " : ", ";
    out += "the " + pretty(ids[i]);
  }
  return out;
}

// Shared scaffolding for the hidden-target categories.
struct HiddenTarget {
  std::vector<FixtureId> candidates;
  FixtureId where;
  ObjectId target;
  RegionId goal;
};

HiddenTarget roll_hidden_target(ShapeCtx& ctx) {
  std::size_t count = 2 + ctx.rng.below(3);  // 2..4 candidates
  HiddenTarget h;
  h.candidates = pick_distinct(ctx.rng, ctx.pools.containers, count, "containers");
  h.where = h.candidates[ctx.rng.below(h.candidates.size())];
  h.target = pick_one(ctx.rng, ctx.pools.loose, "loose objects");
  h.goal = surface_excluding(ctx.rng, ctx.pools, {});
  return h;
}

TaskSpec shape_find_object(ShapeCtx& ctx) {
  HiddenTarget h = roll_hidden_target(ctx);
  TaskSpec t;
  t.instruction = "Find the " + pretty(h.target) + " — check " +
                  join_pretty(h.candidates) + " — and put it on the " +
                  pretty(h.goal) + ".";
  for (const auto& c : h.candidates) {
    t.initial.fixtures[c] =
        scene::FixtureState{Articulation::Closed, ctx.reg.fixture(c).power};
  }
  t.initial.placements[h.target] = InsideFixture{h.where};
  for (const auto& c : h.candidates) t.gt_plan.push_back(Action::open(c));
  t.gt_plan.push_back(Action::pick(h.target, Location{InsideFixture{h.where}}));
  t.gt_plan.push_back(Action::place(h.target, AtRegion{h.goal}));
  t.key_transitions = {set_of({Predicate::open(h.where)}),
                       set_of({Predicate::holding(h.target)}),
                       set_of({Predicate::at_region(h.target, h.goal)})};
  t.goal = set_of({Predicate::at_region(h.target, h.goal)});
  t.memory = MemoryMeta{MemoryMeta::Style::Exploration, h.candidates, h.target,
                        h.where, h.goal};
  t.questions = {{"q1",
                  "Is the " + pretty(h.target) + " inside the " + pretty(h.where) + "?",
                  Predicate::inside(h.target, h.where), 1},
                 {"q2", "Are you holding the " + pretty(h.target) + "?",
                  Predicate::holding(h.target), 2}};
  return t;
}

TaskSpec shape_recall_placement(ShapeCtx& ctx) {
  HiddenTarget h = roll_hidden_target(ctx);
  TaskSpec t;
  t.instruction = "Close " + join_pretty(h.candidates) + ", then put the " +
                  pretty(h.target) + " on the " + pretty(h.goal) + ".";
  for (const auto& c : h.candidates) {
    t.initial.fixtures[c] =
        scene::FixtureState{Articulation::Open, ctx.reg.fixture(c).power};
  }
  t.initial.placements[h.target] = InsideFixture{h.where};
  for (const auto& c : h.candidates) t.gt_plan.push_back(Action::close(c));
  t.gt_plan.push_back(Action::open(h.where));
  t.gt_plan.push_back(Action::pick(h.target, Location{InsideFixture{h.where}}));
  t.gt_plan.push_back(Action::place(h.target, AtRegion{h.goal}));
  t.key_transitions = {set_of({Predicate::at_region(h.target, h.goal)})};
  t.goal = set_of({Predicate::at_region(h.target, h.goal)});
  t.memory = MemoryMeta{MemoryMeta::Style::Execution, h.candidates, h.target,
                        h.where, h.goal};
  t.questions = {{"q1",
                  "Is the " + pretty(h.target) + " inside the " + pretty(h.where) + "?",
                  Predicate::inside(h.target, h.where), 0}};
  return t;
}

TaskSpec fetch_base(ShapeCtx& ctx, ObjectId* out_x, RegionId* out_goal,
                    std::vector<RegionId>* out_used) {
  const ObjectId x = pick_one(ctx.rng, ctx.pools.loose, "loose objects");
  std::vector<RegionId> exclude;
  if (auto r = default_region(ctx.reg, x)) exclude.push_back(*r);
  RegionId g = surface_excluding(ctx.rng, ctx.pools, exclude);
  TaskSpec t;
  t.instruction = "Take the " + pretty(x) + " to the " + pretty(g) + ".";
  t.gt_plan = {Action::pick(x, default_location(ctx.reg, x)),
               Action::place(x, AtRegion{g})};
  t.key_transitions = {set_of({Predicate::holding(x)}),
                       set_of({Predicate::at_region(x, g)})};
  t.goal = set_of({Predicate::at_region(x, g)});
  t.questions = {{"q1", "Are you holding the " + pretty(x) + "?",
                  Predicate::holding(x), 1},
                 {"q2", "Is the " + pretty(x) + " on the " + pretty(g) + "?",
                  Predicate::at_region(x, g), 2}};
  *out_x = x;
  *out_goal = g;
  exclude.push_back(g);
  *out_used = exclude;
  return t;
}

TaskSpec shape_interrupted_fetch(ShapeCtx& ctx) {
  ObjectId x;
  RegionId g;
  std::vector<RegionId> used;
  TaskSpec t = fetch_base(ctx, &x, &g, &used);
  RegionId elsewhere = surface_excluding(ctx.rng, ctx.pools, used);
  t.perturbations = {{task::AfterTransition{1},
                      task::Relocate{x, AtRegion{elsewhere}}}};
  return t;
}

TaskSpec shape_dropped_fetch(ShapeCtx& ctx) {
  ObjectId x;
  RegionId g;
  std::vector<RegionId> used;
  TaskSpec t = fetch_base(ctx, &x, &g, &used);
  t.perturbations = {{task::AfterTransition{1}, task::DropHeld{}}};
  return t;
}

TaskSpec shape_moved_surprise(ShapeCtx& ctx) {
  const ObjectId x = pick_one(ctx.rng, ctx.pools.loose, "loose objects");
  auto rx = default_region(ctx.reg, x);
  std::vector<RegionId> exclude;
  if (rx) exclude.push_back(*rx);
  RegionId r_true = surface_excluding(ctx.rng, ctx.pools, exclude);
  exclude.push_back(r_true);
  RegionId g = surface_excluding(ctx.rng, ctx.pools, exclude);
  TaskSpec t;
  t.instruction = "Take the " + pretty(x) + " to the " + pretty(g) + ".";
  t.initial.placements[x] = AtRegion{r_true};
  t.stale_beliefs[x] = default_location(ctx.reg, x);
  t.gt_plan = {Action::pick(x, Location{AtRegion{r_true}}),
               Action::place(x, AtRegion{g})};
  t.key_transitions = {set_of({Predicate::holding(x)}),
                       set_of({Predicate::at_region(x, g)})};
  t.goal = set_of({Predicate::at_region(x, g)});
  t.questions = {{"q1", "Is the " + pretty(x) + " on the " + pretty(g) + "?",
                  Predicate::at_region(x, g), 2}};
  return t;
}

TaskSpec shape_phantom_container(ShapeCtx& ctx) {
  const ObjectId x = pick_one(ctx.rng, ctx.pools.loose, "loose objects");
  const FixtureId c = pick_one(ctx.rng, ctx.pools.containers, "containers");
  std::vector<RegionId> exclude;
  if (auto r = default_region(ctx.reg, x)) exclude.push_back(*r);
  RegionId g = surface_excluding(ctx.rng, ctx.pools, exclude);
  TaskSpec t;
  t.instruction = "Take the " + pretty(x) + " to the " + pretty(g) + ".";
  // The container sits open and empty; belief wrongly reports the object
  // inside it.
  t.initial.fixtures[c] = scene::FixtureState{Articulation::Open,
                                              ctx.reg.fixture(c).power};
  t.stale_beliefs[x] = InsideFixture{c};
  t.gt_plan = {Action::pick(x, default_location(ctx.reg, x)),
               Action::place(x, AtRegion{g})};
  t.key_transitions = {set_of({Predicate::holding(x)}),
                       set_of({Predicate::at_region(x, g)})};
  t.goal = set_of({Predicate::at_region(x, g)});
  t.questions = {{"q1", "Is the " + pretty(x) + " on the " + pretty(g) + "?",
                  Predicate::at_region(x, g), 2}};
  return t;
}

TaskSpec shape_seek_then_shift(ShapeCtx& ctx) {
  TaskSpec t = shape_find_object(ctx);
  RegionId elsewhere =
      surface_excluding(ctx.rng, ctx.pools, {t.memory->goal_region});
  t.perturbations = {{task::AfterTransition{2},
                      task::Relocate{t.memory->target, AtRegion{elsewhere}}}};
  return t;
}

TaskSpec shape_recall_then_shift(ShapeCtx& ctx) {
  TaskSpec t = shape_recall_placement(ctx);
  RegionId elsewhere =
      surface_excluding(ctx.rng, ctx.pools, {t.memory->goal_region});
  // Strike while the retrieval leg is in flight: after the closes, the
  // reopen, and the approach to the grasp.
  auto closes = static_cast<std::int64_t>(t.memory->candidates.size());
  t.perturbations = {{task::AtStep{closes + 3},
                      task::Relocate{t.memory->target, AtRegion{elsewhere}}}};
  return t;
}

using ShapeFn = TaskSpec (*)(ShapeCtx&);

const std::vector<std::pair<std::string, ShapeFn>>& shape_table(Category c) {
  static const std::vector<std::pair<std::string, ShapeFn>> ideal = {
      {"relocate_pair", shape_relocate_pair},
      {"fetch_from_container", shape_fetch_from_container},
      {"stow_away", shape_stow_away},
      {"warm_up", shape_warm_up},
  };
  static const std::vector<std::pair<std::string, ShapeFn>> exploration = {
      {"find_object", shape_find_object},
  };
  static const std::vector<std::pair<std::string, ShapeFn>> execution = {
      {"recall_placement", shape_recall_placement},
  };
  static const std::vector<std::pair<std::string, ShapeFn>> disturbance = {
      {"interrupted_fetch", shape_interrupted_fetch},
      {"dropped_fetch", shape_dropped_fetch},
  };
  static const std::vector<std::pair<std::string, ShapeFn>> mismatch = {
      {"moved_surprise", shape_moved_surprise},
      {"phantom_container", shape_phantom_container},
  };
  static const std::vector<std::pair<std::string, ShapeFn>> mix = {
      {"seek_then_shift", shape_seek_then_shift},
      {"recall_then_shift", shape_recall_then_shift},
  };
  switch (c) {
    case Category::Ideal: return ideal;
    case Category::MemoryExploration: return exploration;
    case Category::MemoryExecution: return execution;
    case Category::RandomDisturbance: return disturbance;
    case Category::ObservationMismatching: return mismatch;
    case Category::Mix: return mix;
  }
  return ideal;
}

}  // namespace

std::vector<std::string> shapes_for(Category category) {
  std::vector<std::string> out;
  for (const auto& [name, _] : shape_table(category)) out.push_back(name);
  return out;
}

task::TaskSpec generate_task(const SceneRegistry& registry, const GenOptions& options) {
  Pools pools = scan(registry);
  Rng rng(derive_stream(options.seed, "forge"));
  const auto& table = shape_table(options.category);
  std::string last_failure = "no attempts";
  constexpr int kMaxAttempts = 64;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    const auto& [shape_name, fn] = table[rng.below(table.size())];
    if (options.shape && *options.shape != shape_name) continue;
    TaskSpec t;
    try {
      ShapeCtx ctx{registry, pools, rng};
      t = fn(ctx);
    } catch (const UnsatisfiableConstraintError& e) {
      last_failure = e.what();
      continue;
    }
    t.category = options.category;
    t.registry_path = options.registry_ref;
    char suffix[16];
    std::snprintf(suffix, sizeof(suffix), "%08llx",
                  static_cast<unsigned long long>(
                      derive_stream(options.seed, "task-id") & 0xffffffffULL));
    t.id = std::string(task::category_name(options.category)) + "-" + shape_name +
           "-" + suffix;
    VerifyReport report = verify_task(registry, t);
    if (report.ok()) return t;
    last_failure = report.findings.front().message;
  }
  throw GenerationExhaustedError("category " +
                                 std::string(task::category_name(options.category)) +
                                 ": " + last_failure);
}

std::filesystem::path emit_suite(const SceneRegistry& registry,
                                 const std::filesystem::path& registry_path,
                                 const std::filesystem::path& out_dir,
                                 const SuiteOptions& options) {
  std::filesystem::create_directories(out_dir / "tasks");
  auto abs_registry = std::filesystem::absolute(registry_path).lexically_normal();
  auto tasks_dir = std::filesystem::absolute(out_dir / "tasks").lexically_normal();
  std::string registry_ref =
      std::filesystem::relative(abs_registry, tasks_dir).generic_string();

  task::Suite suite;
  suite.name = options.name;
  for (Category c : task::all_categories()) {
    for (int i = 0; i < options.per_category; ++i) {
      GenOptions g;
      g.category = c;
      g.seed = derive_stream(options.seed, std::string(task::category_name(c)) +
                                               "#" + std::to_string(i));
      g.registry_ref = registry_ref;
      TaskSpec t = generate_task(registry, g);
      task::save_task(out_dir / "tasks" / (t.id + ".json"), t);
      suite.task_paths.push_back("tasks/" + t.id + ".json");
    }
  }
  auto suite_path = out_dir / "suite.json";
  task::save_suite(suite_path, suite);
  return suite_path;
}

}  // namespace homebench::forge
