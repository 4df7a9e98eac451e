#include "homebench/scripted.hpp"

#include <algorithm>

#include "homebench/error.hpp"

namespace homebench::planner {

using scene::Articulation;
using scene::AtRegion;
using scene::InGripper;
using scene::InsideFixture;
using scene::Power;
using scene::Predicate;
using scene::PredicateKind;
using task::MemoryMeta;

ScriptedPlanner::ScriptedPlanner(const ScriptedOptions& options,
                                 std::uint64_t episode_seed)
    : options_(options), rng_(derive_stream(episode_seed, "planner")) {}

void ScriptedPlanner::absorb(const sim::Observation& obs) {
  if (options_.blind || !options_.use_memory) return;
  for (const auto& [obj, loc] : obs.objects) {
    memory_.facts[obj] = MemoryFact{loc, obs.clock};
  }
  if (obs.held) {
    memory_.facts[*obs.held] = MemoryFact{Location{InGripper{}}, obs.clock};
  }
}

std::optional<Location> ScriptedPlanner::believed_location(
    const ObjectId& obj, const sim::Observation& obs) const {
  if (options_.blind) return std::nullopt;
  if (obs.held == obj) return Location{InGripper{}};
  auto it = obs.objects.find(obj);
  if (it != obs.objects.end()) return it->second;
  if (options_.use_memory) {
    auto f = memory_.facts.find(obj);
    if (f != memory_.facts.end()) return f->second.location;
  }
  return std::nullopt;
}

Plan ScriptedPlanner::plan(const task::TaskSpec& task, const sim::Observation& obs) {
  absorb(obs);
  if (options_.plan_verbatim || !task.memory) {
    current_plan_ = task.gt_plan;
    if (!options_.plan_verbatim && !options_.blind) {
      // Plan from what is seen: bind pick sources to observed locations.
      // Under a stale overlay this bakes the mistake into the plan, which
      // is the point.
      for (auto& step : current_plan_) {
        if (step.type != actions::ActionType::Pick) continue;
        auto it = obs.objects.find(*step.object);
        if (it != obs.objects.end()) step.source = it->second;
      }
    }
  } else if (task.memory->style == MemoryMeta::Style::Exploration) {
    // Sweep the candidates in order, shutting each miss behind us; the
    // discovery decision cuts the sweep short.
    current_plan_.clear();
    for (const auto& c : task.memory->candidates) {
      current_plan_.push_back(Action::open(c));
      current_plan_.push_back(Action::close(c));
    }
  } else {
    // Tidy first as instructed; where to retrieve from is decided when the
    // closes are done, from memory or by guess.
    current_plan_.clear();
    for (const auto& c : task.memory->candidates) {
      current_plan_.push_back(Action::close(c));
    }
  }
  memory_.active_subgoal = 0;
  memory_.completed.assign(current_plan_.size(), false);
  memory_.history.push_back("planned " + std::to_string(current_plan_.size()) +
                            " steps");
  return current_plan_;
}

namespace {

// Subgoal postcondition on a single observation, no registry required.
bool subgoal_done(const Subgoal& g, const sim::Observation& obs) {
  using actions::ActionType;
  switch (g.type) {
    case ActionType::Pick:
      return obs.held == *g.object;
    case ActionType::Place:
    case ActionType::Return:
    case ActionType::Push:
    case ActionType::Store: {
      auto it = obs.objects.find(*g.object);
      return it != obs.objects.end() && it->second == *g.target;
    }
    case ActionType::Open: {
      auto it = obs.fixtures.find(*g.object);
      return it != obs.fixtures.end() &&
             it->second.articulation == Articulation::Open;
    }
    case ActionType::Close: {
      auto it = obs.fixtures.find(*g.object);
      return it != obs.fixtures.end() &&
             it->second.articulation == Articulation::Closed;
    }
    case ActionType::Turn:
    case ActionType::Press: {
      // Tasks use the power verbs to switch things on.
      auto it = obs.fixtures.find(*g.object);
      return it != obs.fixtures.end() && it->second.power == Power::On;
    }
    case ActionType::Pour:
    case ActionType::Move:
    case ActionType::Wait:
      return true;
  }
  return false;
}

}  // namespace

CompletionJudgment ScriptedPlanner::reflect(const task::TaskSpec&,
                                            const WindowReport& window) {
  last_window_ = window;
  // Follow the loop's notion of the active step; it may force-advance past
  // a subgoal we never judged complete.
  memory_.active_subgoal = window.subgoal_index;
  if (options_.blind) {
    last_complete_ = true;
    if (window.subgoal_index >= 0 &&
        window.subgoal_index < static_cast<int>(memory_.completed.size())) {
      memory_.completed[window.subgoal_index] = true;
    }
    memory_.history.push_back("assume step " +
                              std::to_string(window.subgoal_index) + " done");
    return {true, "assumed complete"};
  }
  for (const auto& step : window.steps) absorb(step.after);
  bool complete = false;
  if (!window.expansion_failed && !window.steps.empty()) {
    complete = subgoal_done(window.subgoal, window.steps.back().after);
  }
  last_complete_ = complete;
  if (window.subgoal_index >= 0 &&
      window.subgoal_index < static_cast<int>(memory_.completed.size())) {
    if (complete) memory_.completed[window.subgoal_index] = true;
  }
  memory_.history.push_back("step " + std::to_string(window.subgoal_index) +
                            (complete ? " complete" : " incomplete"));
  return {complete, complete ? "postcondition holds" : "postcondition open"};
}

Decision ScriptedPlanner::decide(const task::TaskSpec& task,
                                 const sim::Observation& obs, bool plan_exhausted) {
  if (options_.blind) {
    int next = memory_.active_subgoal + 1;
    if (plan_exhausted || next >= static_cast<int>(current_plan_.size())) {
      return {DecisionKind::DeclareDone, 0, {}, "plan finished"};
    }
    memory_.active_subgoal = next;
    return {DecisionKind::Advance, next, {}, "next step"};
  }
  absorb(obs);

  auto replace_with = [&](Plan p, std::string why) {
    current_plan_ = std::move(p);
    memory_.active_subgoal = 0;
    memory_.completed.assign(current_plan_.size(), false);
    memory_.history.push_back("replan: " + why);
    return Decision{DecisionKind::Replace, 0, current_plan_, std::move(why)};
  };

  // If every goal predicate already holds in the believed state there is
  // nothing left worth doing, whatever the plan cursor says.
  bool goal_believed = true;
  for (const auto& p : task.goal.members()) {
    if (!belief_eval(p, obs)) {
      goal_believed = false;
      break;
    }
  }
  if (goal_believed) {
    return {DecisionKind::DeclareDone, 0, {}, "goal satisfied"};
  }

  // Hidden-target discovery: the moment the target shows up mid-sweep,
  // abandon the sweep and go get it.
  if (task.memory && !retrieval_bound_ &&
      task.memory->style == MemoryMeta::Style::Exploration) {
    auto loc = believed_location(task.memory->target, obs);
    if (loc && !std::holds_alternative<InGripper>(*loc)) {
      retrieval_bound_ = true;
      Plan p;
      p.push_back(Action::pick(task.memory->target, *loc));
      p.push_back(Action::place(task.memory->target,
                                AtRegion{task.memory->goal_region}));
      return replace_with(std::move(p), "target sighted");
    }
  }

  bool all_done = !memory_.completed.empty() &&
                  std::all_of(memory_.completed.begin(), memory_.completed.end(),
                              [](bool b) { return b; });

  // Deviation handling: a precondition refusal whose cause is visible is
  // fixed by a new plan; slips and wrong-place grasps retry as-is.
  if (!plan_exhausted && last_window_ && !last_complete_ && options_.replan) {
    for (const auto& step : last_window_->steps) {
      if (step.status != sim::StepStatus::PreconditionFailed || !step.violated) {
        continue;
      }
      if (step.violated->kind == PredicateKind::Holding) {
        const ObjectId obj = step.violated->subject;
        auto loc = believed_location(obj, obs);
        if (loc && !std::holds_alternative<InGripper>(*loc)) {
          Plan p;
          p.push_back(Action::pick(obj, *loc));
          for (std::size_t i = static_cast<std::size_t>(memory_.active_subgoal);
               i < current_plan_.size(); ++i) {
            p.push_back(current_plan_[i]);
          }
          return replace_with(std::move(p), "lost hold of " + obj);
        }
      }
    }
  }

  // End of plan: hidden-target tasks still owe the retrieval branch; pick
  // the container from memory when we can, by seeded guess when we cannot.
  if ((plan_exhausted || all_done) && task.memory && !retrieval_bound_) {
    retrieval_bound_ = true;
    const ObjectId& target = task.memory->target;
    Plan p;
    std::optional<Location> known;
    if (options_.use_memory) {
      auto f = memory_.facts.find(target);
      if (f != memory_.facts.end()) known = f->second.location;
    }
    if (known && !std::holds_alternative<InGripper>(*known)) {
      if (const auto* in = std::get_if<InsideFixture>(&*known)) {
        p.push_back(Action::open(in->fixture));
      }
      p.push_back(Action::pick(target, *known));
      p.push_back(Action::place(target, AtRegion{task.memory->goal_region}));
      return replace_with(std::move(p), "retrieve from memory");
    }
    const auto& cands = task.memory->candidates;
    const auto& guess = cands[rng_.below(cands.size())];
    p.push_back(Action::open(guess));
    p.push_back(Action::pick(target, Location{InsideFixture{guess}}));
    p.push_back(Action::place(target, AtRegion{task.memory->goal_region}));
    return replace_with(std::move(p), "retrieve by guess");
  }

  if (all_done) {
    return {DecisionKind::DeclareDone, 0, {}, "all steps complete"};
  }
  if (plan_exhausted) {
    return {DecisionKind::Continue, 0, {}, "nothing left to try"};
  }
  if (last_complete_) {
    int next = memory_.active_subgoal + 1;
    while (next < static_cast<int>(memory_.completed.size()) &&
           memory_.completed[next]) {
      ++next;
    }
    if (next >= static_cast<int>(current_plan_.size())) {
      return {DecisionKind::DeclareDone, 0, {}, "reached plan end"};
    }
    memory_.active_subgoal = next;
    return {DecisionKind::Advance, next, {}, "step complete"};
  }
  return {DecisionKind::Continue, 0, {}, "retry"};
}

bool ScriptedPlanner::belief_eval(const Predicate& p,
                                  const sim::Observation& obs) const {
  switch (p.kind) {
    case PredicateKind::AtRegion: {
      auto loc = believed_location(p.subject, obs);
      return loc && *loc == Location{AtRegion{p.where}};
    }
    case PredicateKind::Inside: {
      auto loc = believed_location(p.subject, obs);
      return loc && *loc == Location{InsideFixture{p.where}};
    }
    case PredicateKind::Open: {
      auto it = obs.fixtures.find(p.subject);
      return it != obs.fixtures.end() &&
             it->second.articulation == Articulation::Open;
    }
    case PredicateKind::Closed: {
      auto it = obs.fixtures.find(p.subject);
      return it != obs.fixtures.end() &&
             it->second.articulation == Articulation::Closed;
    }
    case PredicateKind::Holding:
      return obs.held == p.subject;
    case PredicateKind::GripperEmpty:
      return !obs.held.has_value();
    case PredicateKind::PoweredOn: {
      auto it = obs.fixtures.find(p.subject);
      return it != obs.fixtures.end() && it->second.power == Power::On;
    }
    case PredicateKind::EmptyContainer: {
      for (const auto& [obj, loc] : obs.objects) {
        if (loc == Location{InsideFixture{p.subject}}) return false;
      }
      return true;
    }
  }
  return false;
}

bool ScriptedPlanner::answer(const task::BinaryQuestion& q,
                             const sim::Observation& obs) {
  if (options_.blind) return rng_.chance(0.5);
  return belief_eval(q.probe, obs);
}

RandomPlanner::RandomPlanner(std::uint64_t episode_seed)
    : rng_(derive_stream(episode_seed, "planner")) {}

Plan RandomPlanner::plan(const task::TaskSpec& task, const sim::Observation&) {
  Plan p = task.gt_plan;
  for (std::size_t i = p.size(); i > 1; --i) {
    std::swap(p[i - 1], p[rng_.below(i)]);
  }
  plan_size_ = p.size();
  memory_.active_subgoal = 0;
  memory_.completed.assign(p.size(), false);
  return p;
}

CompletionJudgment RandomPlanner::reflect(const task::TaskSpec&,
                                          const WindowReport& window) {
  memory_.active_subgoal = window.subgoal_index;
  if (window.subgoal_index >= 0 &&
      window.subgoal_index < static_cast<int>(memory_.completed.size())) {
    memory_.completed[window.subgoal_index] = true;
  }
  return {true, "assumed complete"};
}

Decision RandomPlanner::decide(const task::TaskSpec&, const sim::Observation&,
                               bool plan_exhausted) {
  int next = memory_.active_subgoal + 1;
  if (plan_exhausted || next >= static_cast<int>(plan_size_)) {
    return {DecisionKind::DeclareDone, 0, {}, "plan finished"};
  }
  memory_.active_subgoal = next;
  return {DecisionKind::Advance, next, {}, "next step"};
}

bool RandomPlanner::answer(const task::BinaryQuestion&, const sim::Observation&) {
  return rng_.chance(0.5);
}

}  // namespace homebench::planner
