#include "homebench/scene.hpp"

#include <algorithm>

#include "homebench/error.hpp"

namespace homebench::scene {

bool operator==(const Location& a, const Location& b) {
  if (a.index() != b.index()) return false;
  if (std::holds_alternative<AtRegion>(a)) {
    return std::get<AtRegion>(a) == std::get<AtRegion>(b);
  }
  if (std::holds_alternative<InsideFixture>(a)) {
    return std::get<InsideFixture>(a) == std::get<InsideFixture>(b);
  }
  return true;
}

std::string location_text(const Location& loc) {
  if (const auto* r = std::get_if<AtRegion>(&loc)) return r->region;
  if (const auto* f = std::get_if<InsideFixture>(&loc)) return "inside " + f->fixture;
  return "gripper";
}

SceneRegistry::SceneRegistry(std::vector<FixtureDecl> fixtures,
                             std::vector<std::pair<ObjectId, Location>> objects)
    : fixtures_(std::move(fixtures)), objects_(std::move(objects)) {
  for (std::size_t i = 0; i < fixtures_.size(); ++i) {
    const auto& f = fixtures_[i];
    if (fixture_index_.count(f.id)) throw ParseError("duplicate fixture id: " + f.id);
    if (f.container && f.articulation == Articulation::Fixed) {
      throw ParseError("container fixture must articulate: " + f.id);
    }
    fixture_index_[f.id] = i;
    for (const auto& r : f.regions) {
      if (region_owner_.count(r.id)) throw ParseError("duplicate region id: " + r.id);
      region_owner_[r.id] = f.id;
    }
  }
  for (std::size_t i = 0; i < objects_.size(); ++i) {
    const auto& [id, loc] = objects_[i];
    if (object_index_.count(id)) throw ParseError("duplicate object id: " + id);
    if (fixture_index_.count(id)) throw ParseError("object id collides with fixture: " + id);
    object_index_[id] = i;
    if (const auto* r = std::get_if<AtRegion>(&loc)) {
      if (!region_owner_.count(r->region)) throw UnknownIdError(r->region);
    } else if (const auto* f = std::get_if<InsideFixture>(&loc)) {
      auto it = fixture_index_.find(f->fixture);
      if (it == fixture_index_.end()) throw UnknownIdError(f->fixture);
      if (!fixtures_[it->second].container) {
        throw ParseError("object declared inside non-container: " + f->fixture);
      }
    } else {
      throw ParseError("registry cannot declare objects in the gripper: " + id);
    }
  }
}

const FixtureDecl& SceneRegistry::fixture(const FixtureId& id) const {
  auto it = fixture_index_.find(id);
  if (it == fixture_index_.end()) throw UnknownIdError(id);
  return fixtures_[it->second];
}

const FixtureId& SceneRegistry::region_owner(const RegionId& id) const {
  auto it = region_owner_.find(id);
  if (it == region_owner_.end()) throw UnknownIdError(id);
  return it->second;
}

int SceneRegistry::region_capacity(const RegionId& id) const {
  const auto& f = fixture(region_owner(id));
  for (const auto& r : f.regions) {
    if (r.id == id) return r.capacity;
  }
  throw UnknownIdError(id);
}

std::vector<FixtureId> SceneRegistry::container_ids() const {
  std::vector<FixtureId> out;
  for (const auto& f : fixtures_) {
    if (f.container) out.push_back(f.id);
  }
  return out;
}

const char* articulation_name(Articulation a) {
  switch (a) {
    case Articulation::Open: return "open";
    case Articulation::Closed: return "closed";
    case Articulation::Fixed: return "fixed";
  }
  return "fixed";
}

const char* power_name(Power p) {
  switch (p) {
    case Power::On: return "on";
    case Power::Off: return "off";
    case Power::None: return "none";
  }
  return "none";
}

Articulation articulation_from_name(const std::string& s) {
  if (s == "open") return Articulation::Open;
  if (s == "closed") return Articulation::Closed;
  if (s == "fixed") return Articulation::Fixed;
  throw ParseError("bad articulation: " + s);
}

Power power_from_name(const std::string& s) {
  if (s == "on") return Power::On;
  if (s == "off") return Power::Off;
  if (s == "none") return Power::None;
  throw ParseError("bad power state: " + s);
}

Json location_to_json(const Location& loc) {
  Json j;
  if (const auto* r = std::get_if<AtRegion>(&loc)) {
    j["kind"] = "region";
    j["region"] = r->region;
  } else if (const auto* f = std::get_if<InsideFixture>(&loc)) {
    j["kind"] = "inside";
    j["fixture"] = f->fixture;
  } else {
    j["kind"] = "gripper";
  }
  return j;
}

Location location_from_json(const Json& j) {
  const std::string kind = require_field(j, "kind", "location").get<std::string>();
  if (kind == "region") {
    require_keys(j, {"kind", "region"}, {}, "location");
    return AtRegion{j.at("region").get<std::string>()};
  }
  if (kind == "inside") {
    require_keys(j, {"kind", "fixture"}, {}, "location");
    return InsideFixture{j.at("fixture").get<std::string>()};
  }
  if (kind == "gripper") {
    require_keys(j, {"kind"}, {}, "location");
    return InGripper{};
  }
  throw ParseError("bad location kind: " + kind);
}

SceneRegistry SceneRegistry::from_json(const Json& j) {
  require_keys(j, {"schema", "fixtures", "objects"}, {}, "registry");
  if (j.at("schema").get<std::string>() != "scene-registry/v1") {
    throw ParseError("unsupported registry schema");
  }
  std::vector<FixtureDecl> fixtures;
  for (const auto& fj : j.at("fixtures")) {
    require_keys(fj, {"id", "articulation", "power", "container", "regions"},
                 {"capacity"}, "fixture");
    FixtureDecl f;
    f.id = fj.at("id").get<std::string>();
    f.articulation = articulation_from_name(fj.at("articulation").get<std::string>());
    f.power = power_from_name(fj.at("power").get<std::string>());
    f.container = fj.at("container").get<bool>();
    f.capacity = fj.value("capacity", 0);
    for (const auto& rj : fj.at("regions")) {
      require_keys(rj, {"id"}, {"capacity"}, "region");
      f.regions.push_back(RegionDecl{rj.at("id").get<std::string>(), rj.value("capacity", 0)});
    }
    fixtures.push_back(std::move(f));
  }
  std::vector<std::pair<ObjectId, Location>> objects;
  for (const auto& oj : j.at("objects")) {
    require_keys(oj, {"id", "location"}, {}, "object");
    objects.emplace_back(oj.at("id").get<std::string>(),
                         location_from_json(oj.at("location")));
  }
  return SceneRegistry(std::move(fixtures), std::move(objects));
}

Json SceneRegistry::to_json() const {
  Json j;
  j["schema"] = "scene-registry/v1";
  j["fixtures"] = Json::array();
  for (const auto& f : fixtures_) {
    Json fj;
    fj["id"] = f.id;
    fj["articulation"] = articulation_name(f.articulation);
    fj["power"] = power_name(f.power);
    fj["container"] = f.container;
    if (f.capacity != 0) fj["capacity"] = f.capacity;
    fj["regions"] = Json::array();
    for (const auto& r : f.regions) {
      Json rj;
      rj["id"] = r.id;
      if (r.capacity != 0) rj["capacity"] = r.capacity;
      fj["regions"].push_back(rj);
    }
    j["fixtures"].push_back(fj);
  }
  j["objects"] = Json::array();
  for (const auto& [id, loc] : objects_) {
    Json oj;
    oj["id"] = id;
    oj["location"] = location_to_json(loc);
    j["objects"].push_back(oj);
  }
  return j;
}

std::optional<ObjectId> SceneState::held() const {
  for (const auto& [id, loc] : placements) {
    if (std::holds_alternative<InGripper>(loc)) return id;
  }
  return std::nullopt;
}

SceneState initial_state(const SceneRegistry& registry) {
  SceneState s;
  for (const auto& f : registry.fixtures()) {
    s.fixtures[f.id] = FixtureState{f.articulation, f.power};
  }
  for (const auto& [id, loc] : registry.objects()) {
    s.placements[id] = loc;
  }
  return s;
}

std::optional<FixtureId> containing_fixture(const SceneRegistry& registry,
                                            const Location& loc) {
  if (const auto* f = std::get_if<InsideFixture>(&loc)) return f->fixture;
  if (const auto* r = std::get_if<AtRegion>(&loc)) {
    const FixtureId& owner = registry.region_owner(r->region);
    if (registry.fixture(owner).container) return owner;
  }
  return std::nullopt;
}

bool location_hidden(const SceneRegistry& registry, const SceneState& state,
                     const Location& loc) {
  auto owner = containing_fixture(registry, loc);
  if (!owner) return false;
  auto it = state.fixtures.find(*owner);
  if (it == state.fixtures.end()) throw UnknownIdError(*owner);
  return it->second.articulation == Articulation::Closed;
}

Predicate Predicate::at_region(ObjectId obj, RegionId region) {
  return Predicate{PredicateKind::AtRegion, std::move(obj), std::move(region)};
}
Predicate Predicate::inside(ObjectId obj, FixtureId fixture) {
  return Predicate{PredicateKind::Inside, std::move(obj), std::move(fixture)};
}
Predicate Predicate::open(FixtureId fixture) {
  return Predicate{PredicateKind::Open, std::move(fixture), {}};
}
Predicate Predicate::closed(FixtureId fixture) {
  return Predicate{PredicateKind::Closed, std::move(fixture), {}};
}
Predicate Predicate::holding(ObjectId obj) {
  return Predicate{PredicateKind::Holding, std::move(obj), {}};
}
Predicate Predicate::gripper_empty() {
  return Predicate{PredicateKind::GripperEmpty, {}, {}};
}
Predicate Predicate::powered_on(FixtureId fixture) {
  return Predicate{PredicateKind::PoweredOn, std::move(fixture), {}};
}
Predicate Predicate::empty_container(FixtureId fixture) {
  return Predicate{PredicateKind::EmptyContainer, std::move(fixture), {}};
}

namespace {

const char* predicate_kind_name(PredicateKind k) {
  switch (k) {
    case PredicateKind::AtRegion: return "at_region";
    case PredicateKind::Inside: return "inside";
    case PredicateKind::Open: return "open";
    case PredicateKind::Closed: return "closed";
    case PredicateKind::Holding: return "holding";
    case PredicateKind::GripperEmpty: return "gripper_empty";
    case PredicateKind::PoweredOn: return "powered_on";
    case PredicateKind::EmptyContainer: return "empty_container";
  }
  return "?";
}

PredicateKind predicate_kind_from_name(const std::string& s) {
  if (s == "at_region") return PredicateKind::AtRegion;
  if (s == "inside") return PredicateKind::Inside;
  if (s == "open") return PredicateKind::Open;
  if (s == "closed") return PredicateKind::Closed;
  if (s == "holding") return PredicateKind::Holding;
  if (s == "gripper_empty") return PredicateKind::GripperEmpty;
  if (s == "powered_on") return PredicateKind::PoweredOn;
  if (s == "empty_container") return PredicateKind::EmptyContainer;
  throw ParseError("bad predicate kind: " + s);
}

const FixtureState& fixture_state(const SceneState& state, const FixtureId& id) {
  auto it = state.fixtures.find(id);
  if (it == state.fixtures.end()) throw UnknownIdError(id);
  return it->second;
}

const Location& object_location(const SceneState& state, const ObjectId& id) {
  auto it = state.placements.find(id);
  if (it == state.placements.end()) throw UnknownIdError(id);
  return it->second;
}

}  // namespace

Predicate Predicate::from_json(const Json& j) {
  require_keys(j, {"kind"}, {"subject", "where"}, "predicate");
  Predicate p;
  p.kind = predicate_kind_from_name(j.at("kind").get<std::string>());
  p.subject = j.value("subject", std::string{});
  p.where = j.value("where", std::string{});
  return p;
}

Json Predicate::to_json() const {
  Json j;
  j["kind"] = predicate_kind_name(kind);
  if (!subject.empty()) j["subject"] = subject;
  if (!where.empty()) j["where"] = where;
  return j;
}

std::string Predicate::text() const {
  switch (kind) {
    case PredicateKind::AtRegion: return subject + " at " + where;
    case PredicateKind::Inside: return subject + " inside " + where;
    case PredicateKind::Open: return subject + " open";
    case PredicateKind::Closed: return subject + " closed";
    case PredicateKind::Holding: return "holding " + subject;
    case PredicateKind::GripperEmpty: return "gripper empty";
    case PredicateKind::PoweredOn: return subject + " powered on";
    case PredicateKind::EmptyContainer: return subject + " empty";
  }
  return "?";
}

PredicateSet::PredicateSet(std::vector<Predicate> members)
    : members_(std::move(members)) {
  if (members_.empty()) throw ParseError("predicate set must be non-empty");
}

PredicateSet PredicateSet::from_json(const Json& j) {
  if (!j.is_array()) throw ParseError("predicate set: expected array");
  std::vector<Predicate> members;
  for (const auto& pj : j) members.push_back(Predicate::from_json(pj));
  return PredicateSet(std::move(members));
}

Json PredicateSet::to_json() const {
  Json j = Json::array();
  for (const auto& p : members_) j.push_back(p.to_json());
  return j;
}

std::string PredicateSet::text() const {
  std::string out;
  for (const auto& p : members_) {
    if (!out.empty()) out += " & ";
    out += p.text();
  }
  return out;
}

bool eval_predicate(const SceneRegistry& registry, const SceneState& state,
                    const Predicate& p) {
  switch (p.kind) {
    case PredicateKind::AtRegion: {
      if (!registry.has_region(p.where)) throw UnknownIdError(p.where);
      const Location& loc = object_location(state, p.subject);
      const auto* r = std::get_if<AtRegion>(&loc);
      return r != nullptr && r->region == p.where;
    }
    case PredicateKind::Inside: {
      const auto& decl = registry.fixture(p.where);
      if (!decl.container) return false;
      const Location& loc = object_location(state, p.subject);
      auto owner = containing_fixture(registry, loc);
      return owner.has_value() && *owner == p.where;
    }
    case PredicateKind::Open:
      return fixture_state(state, p.subject).articulation == Articulation::Open;
    case PredicateKind::Closed:
      return fixture_state(state, p.subject).articulation == Articulation::Closed;
    case PredicateKind::Holding: {
      const Location& loc = object_location(state, p.subject);
      return std::holds_alternative<InGripper>(loc);
    }
    case PredicateKind::GripperEmpty:
      return !state.held().has_value();
    case PredicateKind::PoweredOn:
      return fixture_state(state, p.subject).power == Power::On;
    case PredicateKind::EmptyContainer: {
      const auto& decl = registry.fixture(p.subject);
      if (!decl.container) throw UnknownIdError(p.subject);
      for (const auto& [obj, loc] : state.placements) {
        auto owner = containing_fixture(registry, loc);
        if (owner.has_value() && *owner == p.subject) return false;
      }
      return true;
    }
  }
  throw MalformedActionError("unreachable predicate kind");
}

bool eval_set(const SceneRegistry& registry, const SceneState& state,
              const PredicateSet& ps) {
  for (const auto& p : ps.members()) {
    if (!eval_predicate(registry, state, p)) return false;
  }
  return true;
}

ValidationReport validate_scene(const SceneRegistry& registry,
                                const SceneState& state) {
  ValidationReport report;
  auto add = [&](std::string code, std::string message) {
    report.findings.push_back({std::move(code), std::move(message)});
  };

  int held_count = 0;
  std::map<RegionId, int> region_load;
  std::map<FixtureId, int> interior_load;

  for (const auto& [id, loc] : state.placements) {
    if (std::holds_alternative<InGripper>(loc)) {
      ++held_count;
      continue;
    }
    if (const auto* r = std::get_if<AtRegion>(&loc)) {
      if (!registry.has_region(r->region)) {
        add("unknown-region", id + " placed at undeclared region " + r->region);
        continue;
      }
      ++region_load[r->region];
      auto owner = containing_fixture(registry, loc);
      if (owner) ++interior_load[*owner];
    } else if (const auto* f = std::get_if<InsideFixture>(&loc)) {
      if (!registry.has_fixture(f->fixture)) {
        add("unknown-fixture", id + " placed inside undeclared fixture " + f->fixture);
        continue;
      }
      if (!registry.fixture(f->fixture).container) {
        add("not-a-container", id + " placed inside non-container " + f->fixture);
        continue;
      }
      ++interior_load[f->fixture];
    }
  }
  if (held_count > 1) {
    add("gripper-overload", "more than one object held");
  }
  for (const auto& [region, load] : region_load) {
    int cap = registry.region_capacity(region);
    if (cap > 0 && load > cap) {
      add("region-capacity", region + " holds " + std::to_string(load) +
                                 " objects, capacity " + std::to_string(cap));
    }
  }
  for (const auto& [fixture, load] : interior_load) {
    int cap = registry.fixture(fixture).capacity;
    if (cap > 0 && load > cap) {
      add("fixture-capacity", fixture + " holds " + std::to_string(load) +
                                  " objects, capacity " + std::to_string(cap));
    }
  }

  for (const auto& f : registry.fixtures()) {
    auto it = state.fixtures.find(f.id);
    if (it == state.fixtures.end()) {
      add("missing-fixture-state", f.id + " has no runtime state");
      continue;
    }
    if (f.articulation == Articulation::Fixed &&
        it->second.articulation != Articulation::Fixed) {
      add("fixed-articulation", f.id + " is fixed but state says " +
                                    articulation_name(it->second.articulation));
    }
    if (f.articulation != Articulation::Fixed &&
        it->second.articulation == Articulation::Fixed) {
      add("fixed-articulation", f.id + " lost its articulation");
    }
  }
  for (const auto& [id, _] : state.fixtures) {
    if (!registry.has_fixture(id)) add("unknown-fixture", id + " not in registry");
  }
  for (const auto& [id, _] : state.placements) {
    if (!registry.has_object(id)) add("unknown-object", id + " not in registry");
  }
  for (const auto& [id, _] : registry.objects()) {
    if (!state.placements.count(id)) add("missing-object", id + " has no placement");
  }
  return report;
}

}  // namespace homebench::scene
