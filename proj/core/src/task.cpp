#include "homebench/task.hpp"

#include "homebench/error.hpp"

namespace homebench::task {

const char* category_name(Category c) {
  switch (c) {
    case Category::Ideal: return "ideal";
    case Category::MemoryExploration: return "memory_exploration";
    case Category::MemoryExecution: return "memory_execution";
    case Category::RandomDisturbance: return "random_disturbance";
    case Category::ObservationMismatching: return "observation_mismatching";
    case Category::Mix: return "mix";
  }
  return "ideal";
}

Category category_from_name(const std::string& s) {
  for (Category c : all_categories()) {
    if (s == category_name(c)) return c;
  }
  throw ParseError("unknown category: " + s);
}

std::vector<Category> all_categories() {
  return {Category::Ideal,
          Category::MemoryExploration,
          Category::MemoryExecution,
          Category::RandomDisturbance,
          Category::ObservationMismatching,
          Category::Mix};
}

PerturbationEvent PerturbationEvent::from_json(const Json& j) {
  require_keys(j, {"trigger", "effect"}, {}, "perturbation");
  PerturbationEvent e;
  const Json& tj = j.at("trigger");
  const std::string tkind = require_field(tj, "kind", "trigger").get<std::string>();
  if (tkind == "at_step") {
    require_keys(tj, {"kind", "t"}, {}, "trigger");
    e.trigger = AtStep{tj.at("t").get<std::int64_t>()};
  } else if (tkind == "after_transition") {
    require_keys(tj, {"kind", "k"}, {}, "trigger");
    e.trigger = AfterTransition{tj.at("k").get<int>()};
  } else {
    throw ParseError("unknown trigger kind: " + tkind);
  }
  const Json& ej = j.at("effect");
  const std::string ekind = require_field(ej, "kind", "effect").get<std::string>();
  if (ekind == "relocate") {
    require_keys(ej, {"kind", "object", "to"}, {}, "effect");
    e.effect = Relocate{ej.at("object").get<std::string>(),
                        scene::location_from_json(ej.at("to"))};
  } else if (ekind == "drop_held") {
    require_keys(ej, {"kind"}, {}, "effect");
    e.effect = DropHeld{};
  } else {
    throw ParseError("unknown effect kind: " + ekind);
  }
  return e;
}

Json PerturbationEvent::to_json() const {
  Json j;
  Json tj;
  if (const auto* s = std::get_if<AtStep>(&trigger)) {
    tj["kind"] = "at_step";
    tj["t"] = s->t;
  } else {
    tj["kind"] = "after_transition";
    tj["k"] = std::get<AfterTransition>(trigger).k;
  }
  j["trigger"] = tj;
  Json ej;
  if (const auto* r = std::get_if<Relocate>(&effect)) {
    ej["kind"] = "relocate";
    ej["object"] = r->object;
    ej["to"] = scene::location_to_json(r->to);
  } else {
    ej["kind"] = "drop_held";
  }
  j["effect"] = ej;
  return j;
}

BinaryQuestion BinaryQuestion::from_json(const Json& j) {
  require_keys(j, {"id", "text", "probe"}, {"due_after"}, "question");
  BinaryQuestion q;
  q.id = j.at("id").get<std::string>();
  q.text = j.at("text").get<std::string>();
  q.probe = Predicate::from_json(j.at("probe"));
  q.due_after = j.value("due_after", 0);
  return q;
}

Json BinaryQuestion::to_json() const {
  Json j;
  j["id"] = id;
  j["text"] = text;
  j["probe"] = probe.to_json();
  if (due_after != 0) j["due_after"] = due_after;
  return j;
}

AnchorPolicy AnchorPolicy::from_json(const Json& j) {
  require_keys(j, {"kind"}, {"every"}, "anchor");
  AnchorPolicy a;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "macro_boundary") {
    a.kind = Kind::MacroBoundary;
  } else if (kind == "every_steps") {
    a.kind = Kind::EverySteps;
    a.every = j.value("every", 0);
    if (a.every <= 0) throw ParseError("every_steps anchor needs every >= 1");
  } else {
    throw ParseError("unknown anchor kind: " + kind);
  }
  return a;
}

Json AnchorPolicy::to_json() const {
  Json j;
  if (kind == Kind::MacroBoundary) {
    j["kind"] = "macro_boundary";
  } else {
    j["kind"] = "every_steps";
    j["every"] = every;
  }
  return j;
}

MemoryMeta MemoryMeta::from_json(const Json& j) {
  require_keys(j, {"style", "candidates", "target", "target_container", "goal_region"},
               {}, "memory");
  MemoryMeta m;
  const std::string style = j.at("style").get<std::string>();
  if (style == "exploration") {
    m.style = Style::Exploration;
  } else if (style == "execution") {
    m.style = Style::Execution;
  } else {
    throw ParseError("unknown memory style: " + style);
  }
  for (const auto& c : j.at("candidates")) m.candidates.push_back(c.get<std::string>());
  if (m.candidates.size() < 2) throw ParseError("memory needs >= 2 candidates");
  m.target = j.at("target").get<std::string>();
  m.target_container = j.at("target_container").get<std::string>();
  m.goal_region = j.at("goal_region").get<std::string>();
  return m;
}

Json MemoryMeta::to_json() const {
  Json j;
  j["style"] = style == Style::Exploration ? "exploration" : "execution";
  j["candidates"] = candidates;
  j["target"] = target;
  j["target_container"] = target_container;
  j["goal_region"] = goal_region;
  return j;
}

InitialOverrides InitialOverrides::from_json(const Json& j) {
  require_keys(j, {}, {"fixtures", "placements"}, "initial");
  InitialOverrides o;
  if (j.contains("fixtures")) {
    for (const auto& [id, fj] : j.at("fixtures").items()) {
      require_keys(fj, {"articulation", "power"}, {}, "initial fixture");
      o.fixtures[id] = scene::FixtureState{
          scene::articulation_from_name(fj.at("articulation").get<std::string>()),
          scene::power_from_name(fj.at("power").get<std::string>())};
    }
  }
  if (j.contains("placements")) {
    for (const auto& [id, lj] : j.at("placements").items()) {
      o.placements[id] = scene::location_from_json(lj);
    }
  }
  return o;
}

Json InitialOverrides::to_json() const {
  Json j = Json::object();
  if (!fixtures.empty()) {
    Json fj = Json::object();
    for (const auto& [id, st] : fixtures) {
      Json s;
      s["articulation"] = scene::articulation_name(st.articulation);
      s["power"] = scene::power_name(st.power);
      fj[id] = s;
    }
    j["fixtures"] = fj;
  }
  if (!placements.empty()) {
    Json pj = Json::object();
    for (const auto& [id, loc] : placements) pj[id] = scene::location_to_json(loc);
    j["placements"] = pj;
  }
  return j;
}

TaskSpec TaskSpec::from_json(const Json& j) {
  require_keys(j,
               {"schema", "id", "category", "instruction", "registry", "plan",
                "transitions", "goal"},
               {"initial", "perturbations", "stale", "memory", "questions", "anchor",
                "max_steps"},
               "task");
  if (j.at("schema").get<std::string>() != "task/v1") {
    throw ParseError("unsupported task schema");
  }
  TaskSpec t;
  t.id = j.at("id").get<std::string>();
  t.category = category_from_name(j.at("category").get<std::string>());
  t.instruction = j.at("instruction").get<std::string>();
  t.registry_path = j.at("registry").get<std::string>();
  if (j.contains("initial")) t.initial = InitialOverrides::from_json(j.at("initial"));
  t.gt_plan = actions::plan_from_json(j.at("plan"));
  if (!j.at("transitions").is_array() || j.at("transitions").empty()) {
    throw ParseError("task needs >= 1 key transition");
  }
  for (const auto& sj : j.at("transitions")) {
    t.key_transitions.push_back(PredicateSet::from_json(sj));
  }
  t.goal = PredicateSet::from_json(j.at("goal"));
  if (j.contains("perturbations")) {
    for (const auto& pj : j.at("perturbations")) {
      t.perturbations.push_back(PerturbationEvent::from_json(pj));
    }
  }
  if (j.contains("stale")) {
    for (const auto& [id, lj] : j.at("stale").items()) {
      t.stale_beliefs[id] = scene::location_from_json(lj);
    }
  }
  if (j.contains("memory")) t.memory = MemoryMeta::from_json(j.at("memory"));
  if (j.contains("questions")) {
    for (const auto& qj : j.at("questions")) {
      t.questions.push_back(BinaryQuestion::from_json(qj));
    }
  }
  if (j.contains("anchor")) t.anchor = AnchorPolicy::from_json(j.at("anchor"));
  if (j.contains("max_steps")) {
    t.max_steps = j.at("max_steps").get<int>();
    if (*t.max_steps <= 0) throw ParseError("max_steps must be positive");
  }
  return t;
}

Json TaskSpec::to_json() const {
  Json j;
  j["schema"] = "task/v1";
  j["id"] = id;
  j["category"] = category_name(category);
  j["instruction"] = instruction;
  j["registry"] = registry_path;
  Json init = initial.to_json();
  if (!init.empty()) j["initial"] = init;
  j["plan"] = actions::plan_to_json(gt_plan);
  j["transitions"] = Json::array();
  for (const auto& s : key_transitions) j["transitions"].push_back(s.to_json());
  j["goal"] = goal.to_json();
  if (!perturbations.empty()) {
    j["perturbations"] = Json::array();
    for (const auto& p : perturbations) j["perturbations"].push_back(p.to_json());
  }
  if (!stale_beliefs.empty()) {
    Json sj = Json::object();
    for (const auto& [id_, loc] : stale_beliefs) sj[id_] = scene::location_to_json(loc);
    j["stale"] = sj;
  }
  if (memory) j["memory"] = memory->to_json();
  if (!questions.empty()) {
    j["questions"] = Json::array();
    for (const auto& q : questions) j["questions"].push_back(q.to_json());
  }
  if (anchor != AnchorPolicy{}) j["anchor"] = anchor.to_json();
  if (max_steps) j["max_steps"] = *max_steps;
  return j;
}

TaskSpec load_task(const std::filesystem::path& path) {
  return TaskSpec::from_json(load_json_file(path));
}

void save_task(const std::filesystem::path& path, const TaskSpec& task) {
  save_json_file(path, task.to_json());
}

scene::SceneState starting_state(const scene::SceneRegistry& registry,
                                 const TaskSpec& task) {
  scene::SceneState s = scene::initial_state(registry);
  for (const auto& [id, st] : task.initial.fixtures) {
    if (!registry.has_fixture(id)) throw UnknownIdError(id);
    s.fixtures[id] = st;
  }
  for (const auto& [id, loc] : task.initial.placements) {
    if (!registry.has_object(id)) throw UnknownIdError(id);
    s.placements[id] = loc;
  }
  return s;
}

Suite Suite::from_json(const Json& j) {
  require_keys(j, {"schema", "name", "tasks"}, {}, "suite");
  if (j.at("schema").get<std::string>() != "suite/v1") {
    throw ParseError("unsupported suite schema");
  }
  Suite s;
  s.name = j.at("name").get<std::string>();
  for (const auto& p : j.at("tasks")) s.task_paths.push_back(p.get<std::string>());
  return s;
}

Json Suite::to_json() const {
  Json j;
  j["schema"] = "suite/v1";
  j["name"] = name;
  j["tasks"] = task_paths;
  return j;
}

Suite load_suite(const std::filesystem::path& path) {
  return Suite::from_json(load_json_file(path));
}

void save_suite(const std::filesystem::path& path, const Suite& suite) {
  save_json_file(path, suite.to_json());
}

std::vector<std::pair<std::filesystem::path, TaskSpec>> load_suite_tasks(
    const std::filesystem::path& suite_path) {
  Suite suite = load_suite(suite_path);
  std::vector<std::pair<std::filesystem::path, TaskSpec>> out;
  const auto base = suite_path.parent_path();
  for (const auto& rel : suite.task_paths) {
    auto path = base / rel;
    out.emplace_back(path, load_task(path));
  }
  return out;
}

}  // namespace homebench::task
