#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "homebench/actions.hpp"
#include "homebench/rng.hpp"
#include "homebench/scene.hpp"
#include "homebench/task.hpp"

namespace homebench::sim {

using actions::Action;
using actions::ActionType;
using scene::FixtureId;
using scene::FixtureState;
using scene::Location;
using scene::ObjectId;
using scene::Predicate;
using scene::RegionId;
using scene::SceneRegistry;
using scene::SceneState;

// Objects dropped on a failed grasp land here; registries that enable drops
// must declare it.
inline constexpr const char* kFloorRegion = "floor";

struct NoiseConfig {
  double p_success = 1.0;  // per-manipulation success probability
  double q_drop = 0.0;     // chance a failed manipulation drops the held object
};

enum class Observability { Full, Partial };

enum class StepStatus {
  Succeeded,
  PreconditionFailed,  // world refused; no state change, no noise draw
  SlipFailed,          // noise; state unchanged except a possible drop
};

struct StepOutcome {
  StepStatus status = StepStatus::Succeeded;
  std::optional<Predicate> violated;  // unmet precondition, when expressible
  std::string message;
  std::optional<ObjectId> dropped;  // object lost to the floor this step
};

// What the planner sees. Partial observability hides the contents of closed
// containers and applies the task's stale-belief overlay until interaction
// corrects it.
struct Observation {
  std::int64_t clock = 0;
  std::optional<ObjectId> held;
  std::map<FixtureId, FixtureState> fixtures;
  std::map<ObjectId, Location> objects;

  Json to_json() const;
  std::string digest() const;
};

class EnvState {
 public:
  EnvState(const SceneRegistry& registry, const task::TaskSpec& task,
           std::uint64_t episode_seed, NoiseConfig noise, Observability mode,
           bool perturbations_enabled);

  const SceneRegistry& registry() const { return *registry_; }
  const SceneState& truth() const { return truth_; }
  std::int64_t clock() const { return truth_.clock; }

  // Execute one primitive. Preconditions first (failures draw no
  // randomness), then the success roll, then effects; the clock always
  // advances. Move and Wait are noise-exempt.
  StepOutcome step(const Action& primitive);

  // Fire any pending scripted events whose trigger condition holds; called
  // before each primitive. Returns human-readable descriptions of what fired.
  std::vector<std::string> inject(int achieved_transitions);

  Observation observe() const;

  // Stale entries not yet corrected by interaction.
  const std::map<ObjectId, Location>& active_stale() const { return stale_; }

 private:
  void clear_stale_for(const ObjectId& obj);
  void clear_stale_touching(const FixtureId& opened);
  void drop_to_floor(const ObjectId& obj);

  const SceneRegistry* registry_;
  const task::TaskSpec* task_;
  SceneState truth_;
  std::map<ObjectId, Location> stale_;
  std::vector<bool> fired_;
  Rng rng_;
  NoiseConfig noise_;
  Observability mode_;
  bool perturbations_enabled_;
};

}  // namespace homebench::sim
