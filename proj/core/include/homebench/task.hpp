#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "homebench/actions.hpp"
#include "homebench/scene.hpp"

namespace homebench::task {

using actions::Plan;
using scene::FixtureId;
using scene::Location;
using scene::ObjectId;
using scene::Predicate;
using scene::PredicateSet;
using scene::RegionId;

enum class Category {
  Ideal,
  MemoryExploration,
  MemoryExecution,
  RandomDisturbance,
  ObservationMismatching,
  Mix,
};

const char* category_name(Category c);
Category category_from_name(const std::string& s);
std::vector<Category> all_categories();

// When a mid-episode event fires: at an absolute clock value, or right after
// the k-th key transition (1-based) is first achieved.
struct AtStep {
  std::int64_t t = 0;
  bool operator==(const AtStep&) const = default;
};
struct AfterTransition {
  int k = 1;
  bool operator==(const AfterTransition&) const = default;
};
using Trigger = std::variant<AtStep, AfterTransition>;

struct Relocate {
  ObjectId object;
  Location to;
  bool operator==(const Relocate&) const = default;
};
struct DropHeld {
  bool operator==(const DropHeld&) const = default;
};
using Effect = std::variant<Relocate, DropHeld>;

struct PerturbationEvent {
  Trigger trigger;
  Effect effect;
  bool operator==(const PerturbationEvent&) const = default;

  static PerturbationEvent from_json(const Json& j);
  Json to_json() const;
};

// Yes/no probe the planner must answer at the first anchor once the
// `due_after`-th transition is achieved (0 = due from the start). Ground
// truth is evaluated on the true state at answer time.
struct BinaryQuestion {
  std::string id;
  std::string text;
  Predicate probe;
  int due_after = 0;

  static BinaryQuestion from_json(const Json& j);
  Json to_json() const;
};

// Where the System-2 / System-1 hand-off happens.
struct AnchorPolicy {
  enum class Kind { MacroBoundary, EverySteps };
  Kind kind = Kind::MacroBoundary;
  int every = 0;  // used by EverySteps

  bool operator==(const AnchorPolicy&) const = default;

  static AnchorPolicy from_json(const Json& j);
  Json to_json() const;
};

// Hidden-target bookkeeping for the memory categories.
struct MemoryMeta {
  enum class Style { Exploration, Execution };
  Style style = Style::Exploration;
  std::vector<FixtureId> candidates;  // search order = this order
  ObjectId target;
  FixtureId target_container;  // where the target actually is
  RegionId goal_region;        // where it must end up

  static MemoryMeta from_json(const Json& j);
  Json to_json() const;
};

// Deltas applied to the registry's default state before the episode starts.
struct InitialOverrides {
  std::map<FixtureId, scene::FixtureState> fixtures;
  std::map<ObjectId, Location> placements;

  static InitialOverrides from_json(const Json& j);
  Json to_json() const;
};

struct TaskSpec {
  std::string id;
  Category category = Category::Ideal;
  std::string instruction;
  std::string registry_path;  // relative to the task file
  InitialOverrides initial;
  Plan gt_plan;
  std::vector<PredicateSet> key_transitions;  // ordered, K entries
  PredicateSet goal{std::vector<Predicate>{Predicate::gripper_empty()}};
  std::vector<PerturbationEvent> perturbations;
  std::map<ObjectId, Location> stale_beliefs;
  std::optional<MemoryMeta> memory;
  std::vector<BinaryQuestion> questions;
  AnchorPolicy anchor;
  std::optional<int> max_steps;

  static TaskSpec from_json(const Json& j);
  Json to_json() const;
};

TaskSpec load_task(const std::filesystem::path& path);
void save_task(const std::filesystem::path& path, const TaskSpec& task);

// Registry default state with the task's overrides applied. Throws
// UnknownIdError for ids the registry does not declare.
scene::SceneState starting_state(const scene::SceneRegistry& registry,
                                 const TaskSpec& task);

// Suite = named list of task files (paths relative to the suite file).
struct Suite {
  std::string name;
  std::vector<std::string> task_paths;

  static Suite from_json(const Json& j);
  Json to_json() const;
};

Suite load_suite(const std::filesystem::path& path);
void save_suite(const std::filesystem::path& path, const Suite& suite);

// Task files named by a suite, resolved against the suite's directory.
std::vector<std::pair<std::filesystem::path, TaskSpec>> load_suite_tasks(
    const std::filesystem::path& suite_path);

}  // namespace homebench::task
