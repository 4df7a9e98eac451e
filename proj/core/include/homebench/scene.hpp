#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "homebench/jsonio.hpp"

namespace homebench::scene {

using ObjectId = std::string;
using FixtureId = std::string;
using RegionId = std::string;

enum class Articulation { Open, Closed, Fixed };
enum class Power { On, Off, None };

struct RegionDecl {
  RegionId id;
  int capacity = 0;  // 0 = unbounded
};

struct FixtureDecl {
  FixtureId id;
  Articulation articulation = Articulation::Fixed;
  Power power = Power::None;
  bool container = false;
  int capacity = 0;  // interior capacity, 0 = unbounded; containers only
  std::vector<RegionDecl> regions;
};

// Where an object is. Regions owned by a container fixture count as interior
// locations: their contents are hidden while the fixture is closed, same as
// the anonymous InsideFixture form.
struct AtRegion {
  RegionId region;
  auto operator<=>(const AtRegion&) const = default;
};
struct InsideFixture {
  FixtureId fixture;
  auto operator<=>(const InsideFixture&) const = default;
};
struct InGripper {
  auto operator<=>(const InGripper&) const = default;
};
using Location = std::variant<AtRegion, InsideFixture, InGripper>;

bool operator==(const Location& a, const Location& b);
inline bool operator!=(const Location& a, const Location& b) { return !(a == b); }

std::string location_text(const Location& loc);

// Static declaration of a scene: fixtures, their regions, the movable
// objects, and default placements. Runtime state starts from this.
class SceneRegistry {
 public:
  SceneRegistry() = default;
  SceneRegistry(std::vector<FixtureDecl> fixtures,
                std::vector<std::pair<ObjectId, Location>> objects);

  static SceneRegistry from_json(const Json& j);
  Json to_json() const;

  const std::vector<FixtureDecl>& fixtures() const { return fixtures_; }
  const std::vector<std::pair<ObjectId, Location>>& objects() const { return objects_; }

  bool has_object(const ObjectId& id) const { return object_index_.count(id) > 0; }
  bool has_fixture(const FixtureId& id) const { return fixture_index_.count(id) > 0; }
  bool has_region(const RegionId& id) const { return region_owner_.count(id) > 0; }

  const FixtureDecl& fixture(const FixtureId& id) const;
  // Fixture owning a region.
  const FixtureId& region_owner(const RegionId& id) const;
  int region_capacity(const RegionId& id) const;

  std::vector<FixtureId> container_ids() const;

 private:
  std::vector<FixtureDecl> fixtures_;
  std::vector<std::pair<ObjectId, Location>> objects_;
  std::map<FixtureId, std::size_t> fixture_index_;
  std::map<RegionId, FixtureId> region_owner_;
  std::map<ObjectId, std::size_t> object_index_;
};

struct FixtureState {
  Articulation articulation = Articulation::Fixed;
  Power power = Power::None;
  bool operator==(const FixtureState&) const = default;
};

// Value-type world snapshot; copy freely, one writer per episode.
struct SceneState {
  std::map<FixtureId, FixtureState> fixtures;
  std::map<ObjectId, Location> placements;
  std::int64_t clock = 0;

  bool operator==(const SceneState&) const = default;

  std::optional<ObjectId> held() const;
};

SceneState initial_state(const SceneRegistry& registry);

// Container fixture a location sits inside, if any.
std::optional<FixtureId> containing_fixture(const SceneRegistry& registry,
                                            const Location& loc);

// True if an object placed at `loc` is behind a closed container door.
bool location_hidden(const SceneRegistry& registry, const SceneState& state,
                     const Location& loc);

enum class PredicateKind {
  AtRegion,
  Inside,
  Open,
  Closed,
  Holding,
  GripperEmpty,
  PoweredOn,
  EmptyContainer,
};

// The testable condition language. Every goal check, key transition and QA
// probe bottoms out here.
struct Predicate {
  PredicateKind kind;
  std::string subject;  // object id for AtRegion/Inside/Holding, fixture id otherwise; empty for GripperEmpty
  std::string where;    // region id for AtRegion, fixture id for Inside

  auto operator<=>(const Predicate&) const = default;

  static Predicate at_region(ObjectId obj, RegionId region);
  static Predicate inside(ObjectId obj, FixtureId fixture);
  static Predicate open(FixtureId fixture);
  static Predicate closed(FixtureId fixture);
  static Predicate holding(ObjectId obj);
  static Predicate gripper_empty();
  static Predicate powered_on(FixtureId fixture);
  static Predicate empty_container(FixtureId fixture);

  static Predicate from_json(const Json& j);
  Json to_json() const;
  std::string text() const;
};

// Non-empty conjunction.
class PredicateSet {
 public:
  explicit PredicateSet(std::vector<Predicate> members);

  const std::vector<Predicate>& members() const { return members_; }

  static PredicateSet from_json(const Json& j);
  Json to_json() const;
  std::string text() const;

  bool operator==(const PredicateSet&) const = default;

 private:
  std::vector<Predicate> members_;
};

// Pure; throws UnknownIdError for ids missing from the registry/state.
bool eval_predicate(const SceneRegistry& registry, const SceneState& state,
                    const Predicate& p);
bool eval_set(const SceneRegistry& registry, const SceneState& state,
              const PredicateSet& ps);

struct ValidationFinding {
  std::string code;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationFinding> findings;
  bool ok() const { return findings.empty(); }
};

ValidationReport validate_scene(const SceneRegistry& registry,
                                const SceneState& state);

const char* articulation_name(Articulation a);
const char* power_name(Power p);
Articulation articulation_from_name(const std::string& s);
Power power_from_name(const std::string& s);

Json location_to_json(const Location& loc);
Location location_from_json(const Json& j);

}  // namespace homebench::scene
