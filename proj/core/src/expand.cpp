#include "homebench/expand.hpp"

#include "homebench/error.hpp"

namespace homebench::expand {

using scene::Articulation;
using scene::AtRegion;
using scene::InGripper;
using scene::InsideFixture;

namespace {

std::optional<Location> believed_location(const sim::Observation& obs,
                                          const std::map<ObjectId, Location>& hints,
                                          const Subgoal& subgoal) {
  const ObjectId& obj = *subgoal.object;
  if (obs.held == obj) return Location{InGripper{}};
  auto it = obs.objects.find(obj);
  if (it != obs.objects.end()) return it->second;
  if (subgoal.source) return subgoal.source;
  auto h = hints.find(obj);
  if (h != hints.end()) return h->second;
  return std::nullopt;
}

bool believed_closed(const sim::Observation& obs, const scene::FixtureId& f) {
  auto it = obs.fixtures.find(f);
  return it != obs.fixtures.end() &&
         it->second.articulation == Articulation::Closed;
}

// open-if-closed, then move-if-region, relative to a location of interest.
void approach(std::vector<Action>& out, const SceneRegistry& registry,
              const sim::Observation& obs, const Location& loc) {
  if (auto owner = scene::containing_fixture(registry, loc)) {
    if (believed_closed(obs, *owner)) out.push_back(Action::open(*owner));
  }
  if (const auto* r = std::get_if<AtRegion>(&loc)) {
    out.push_back(Action::move(r->region));
  }
}

}  // namespace

std::vector<Action> expand_subgoal(const SceneRegistry& registry,
                                   const Subgoal& subgoal,
                                   const sim::Observation& obs,
                                   const std::map<ObjectId, Location>& hints) {
  actions::validate_action(subgoal, /*plan_level=*/true);
  std::vector<Action> out;
  switch (subgoal.type) {
    case ActionType::Pick: {
      auto loc = believed_location(obs, hints, subgoal);
      if (!loc) throw UnexpandableError("no location hypothesis for " + *subgoal.object);
      if (std::holds_alternative<InGripper>(*loc)) return {Action::wait()};
      approach(out, registry, obs, *loc);
      out.push_back(Action::pick(*subgoal.object, *loc));
      return out;
    }
    case ActionType::Place:
    case ActionType::Return: {
      const ObjectId& obj = *subgoal.object;
      if (obs.held != obj) {
        auto it = obs.objects.find(obj);
        if (it != obs.objects.end() && it->second == *subgoal.target) {
          return {Action::wait()};
        }
      }
      approach(out, registry, obs, *subgoal.target);
      Action prim = subgoal;
      prim.source.reset();
      out.push_back(prim);
      return out;
    }
    case ActionType::Pour: {
      approach(out, registry, obs, *subgoal.target);
      out.push_back(subgoal);
      return out;
    }
    case ActionType::Store: {
      const auto* f = std::get_if<InsideFixture>(&*subgoal.target);
      if (!f) throw MalformedActionError("store needs a container target");
      if (believed_closed(obs, f->fixture)) out.push_back(Action::open(f->fixture));
      out.push_back(subgoal);
      return out;
    }
    case ActionType::Open:
      if (!believed_closed(obs, *subgoal.object)) return {Action::wait()};
      return {subgoal};
    case ActionType::Close:
      if (believed_closed(obs, *subgoal.object)) return {Action::wait()};
      return {subgoal};
    case ActionType::Turn:
    case ActionType::Press:
    case ActionType::Push:
    case ActionType::Move:
    case ActionType::Wait:
      return {subgoal};
  }
  return {subgoal};
}

std::vector<Action> strict_expand(const Subgoal& subgoal) {
  actions::validate_action(subgoal, /*plan_level=*/true);
  Action prim = subgoal;
  if (prim.type == ActionType::Pick) prim.target.reset();
  return {prim};
}

int oracle_expansion_length(ActionType t) {
  switch (t) {
    case ActionType::Pick:
    case ActionType::Place:
    case ActionType::Pour:
    case ActionType::Return:
    case ActionType::Store:
      return 2;
    default:
      return 1;
  }
}

}  // namespace homebench::expand
