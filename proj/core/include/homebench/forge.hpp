#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "homebench/scene.hpp"
#include "homebench/task.hpp"

namespace homebench::forge {

struct VerifyFinding {
  int step = -1;  // reference-plan step index; -1 = structural
  std::string code;
  std::optional<scene::Predicate> violated;
  std::string message;

  Json to_json() const;
};

struct VerifyReport {
  std::vector<VerifyFinding> findings;
  // Clock value at which each key transition first held during the literal
  // rehearsal; meaningful only when ok().
  std::vector<std::int64_t> transition_steps;

  bool ok() const { return findings.empty(); }
  Json to_json() const;
};

// Rehearse the task's reference plan literally (no noise, no events, full
// visibility) and check every structural invariant: id validity, category
// shape, ordered key transitions, final goal. A clean report certifies the
// task is solvable exactly as written.
VerifyReport verify_task(const scene::SceneRegistry& registry,
                         const task::TaskSpec& task);

struct GenOptions {
  task::Category category = task::Category::Ideal;
  std::uint64_t seed = 0;
  std::string registry_ref = "registry.json";  // path written into the task
  std::optional<std::string> shape;            // default: seeded choice
};

// Seeded template instantiation, rejection-sampled against verify_task.
// Identical inputs yield identical tasks.
task::TaskSpec generate_task(const scene::SceneRegistry& registry,
                             const GenOptions& options);

std::vector<std::string> shapes_for(task::Category category);

struct SuiteOptions {
  std::uint64_t seed = 0;
  int per_category = 10;
  std::string name = "suite";
};

// Write tasks/<id>.json for every category plus suite.json under out_dir;
// returns the suite path. Byte-identical for identical inputs.
std::filesystem::path emit_suite(const scene::SceneRegistry& registry,
                                 const std::filesystem::path& registry_path,
                                 const std::filesystem::path& out_dir,
                                 const SuiteOptions& options);

}  // namespace homebench::forge
