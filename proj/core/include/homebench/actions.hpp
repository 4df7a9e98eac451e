#pragma once

#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "homebench/scene.hpp"

namespace homebench::actions {

using scene::FixtureId;
using scene::Location;
using scene::ObjectId;
using scene::RegionId;

// The fixed verb set. Plans (System 2) and primitives (System 1) share it:
// a plan step is a subgoal the executor expands into one or more primitives.
enum class ActionType {
  Pick,
  Place,
  Open,
  Close,
  Pour,
  Turn,
  Press,
  Push,
  Move,
  Store,
  Return,  // put an object back where a task says it belongs
  Wait,
};

const char* action_name(ActionType t);
ActionType action_from_name(const std::string& s);

struct Action {
  ActionType type = ActionType::Wait;
  // Object acted on; fixture id for Open/Close/Turn/Press.
  std::optional<std::string> object;
  std::optional<Location> source;
  std::optional<Location> target;

  bool operator==(const Action&) const = default;

  static Action pick(ObjectId obj, std::optional<Location> from = std::nullopt);
  static Action place(ObjectId obj, Location at);
  static Action open(FixtureId fixture);
  static Action close(FixtureId fixture);
  static Action pour(ObjectId obj, Location into);
  static Action turn(FixtureId fixture);
  static Action press(FixtureId fixture);
  static Action push(ObjectId obj, RegionId to);
  static Action move(RegionId to);
  static Action store(ObjectId obj, FixtureId container);
  static Action put_back(ObjectId obj, Location at);
  static Action wait();

  static Action from_json(const Json& j);
  Json to_json() const;

  // Round-trippable one-line form ("pick milk from counter_top").
  std::string text() const;
  static Action from_text(const std::string& line);
};

// Subgoals are plan-level actions; the name marks intent at call sites.
using Subgoal = Action;
using Plan = std::vector<Action>;

// Field-presence check per verb. `plan_level` relaxes Pick (source may be
// omitted and bound later from observation or memory).
void validate_action(const Action& a, bool plan_level);

// Comparison key for plan matching: locations flattened to text, absent
// fields to "".
using CanonicalStep = std::tuple<std::string, std::string, std::string, std::string>;
CanonicalStep canonical_step(const Action& a);
std::vector<CanonicalStep> canonical_plan(const Plan& plan);

Json plan_to_json(const Plan& plan);
Plan plan_from_json(const Json& j);

}  // namespace homebench::actions
