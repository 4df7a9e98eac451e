#include "homebench/sim.hpp"

#include "homebench/error.hpp"

namespace homebench::sim {

using scene::Articulation;
using scene::AtRegion;
using scene::InGripper;
using scene::InsideFixture;
using scene::Power;

Json Observation::to_json() const {
  Json j;
  j["clock"] = clock;
  if (held) {
    j["held"] = *held;
  } else {
    j["held"] = nullptr;
  }
  Json fj = Json::object();
  for (const auto& [id, st] : fixtures) {
    Json s;
    s["articulation"] = scene::articulation_name(st.articulation);
    s["power"] = scene::power_name(st.power);
    fj[id] = s;
  }
  j["fixtures"] = fj;
  Json oj = Json::object();
  for (const auto& [id, loc] : objects) oj[id] = scene::location_to_json(loc);
  j["objects"] = oj;
  return j;
}

std::string Observation::digest() const { return content_hash(canonical_dump(to_json())); }

EnvState::EnvState(const SceneRegistry& registry, const task::TaskSpec& task,
                   std::uint64_t episode_seed, NoiseConfig noise, Observability mode,
                   bool perturbations_enabled)
    : registry_(&registry),
      task_(&task),
      truth_(task::starting_state(registry, task)),
      stale_(task.stale_beliefs),
      fired_(task.perturbations.size(), false),
      rng_(derive_stream(episode_seed, "sim")),
      noise_(noise),
      mode_(mode),
      perturbations_enabled_(perturbations_enabled) {
  for (const auto& [obj, loc] : stale_) {
    if (!registry.has_object(obj)) throw UnknownIdError(obj);
    if (std::holds_alternative<AtRegion>(loc) &&
        !registry.has_region(std::get<AtRegion>(loc).region)) {
      throw UnknownIdError(std::get<AtRegion>(loc).region);
    }
  }
}

void EnvState::clear_stale_for(const ObjectId& obj) { stale_.erase(obj); }

void EnvState::clear_stale_touching(const FixtureId& opened) {
  for (auto it = stale_.begin(); it != stale_.end();) {
    const ObjectId& obj = it->first;
    bool clears = false;
    // Opening either the container the belief points at or the container the
    // object truly sits in reveals the mismatch.
    auto believed = scene::containing_fixture(*registry_, it->second);
    if (believed && *believed == opened) clears = true;
    auto truth_it = truth_.placements.find(obj);
    if (truth_it != truth_.placements.end()) {
      auto actual = scene::containing_fixture(*registry_, truth_it->second);
      if (actual && *actual == opened) clears = true;
    }
    if (clears) {
      it = stale_.erase(it);
    } else {
      ++it;
    }
  }
}

void EnvState::drop_to_floor(const ObjectId& obj) {
  if (!registry_->has_region(kFloorRegion)) {
    throw UnsatisfiableConstraintError("registry lacks a floor region for drops");
  }
  truth_.placements[obj] = AtRegion{kFloorRegion};
}

namespace {

struct PreFail {
  std::optional<Predicate> violated;
  std::string message;
};

std::optional<PreFail> check_preconditions(const SceneRegistry& reg,
                                           const SceneState& s, const Action& a) {
  auto hidden_fail = [&](const Location& loc) -> std::optional<PreFail> {
    if (scene::location_hidden(reg, s, loc)) {
      auto owner = scene::containing_fixture(reg, loc);
      return PreFail{Predicate::open(*owner), *owner + " is closed"};
    }
    return std::nullopt;
  };
  switch (a.type) {
    case ActionType::Pick: {
      const ObjectId& obj = *a.object;
      auto it = s.placements.find(obj);
      if (it == s.placements.end()) throw UnknownIdError(obj);
      if (auto held = s.held()) {
        return PreFail{Predicate::gripper_empty(), "already holding " + *held};
      }
      if (auto f = hidden_fail(it->second)) return f;
      // A sourced pick is a grasp at that spot; if the object is elsewhere
      // the grasp comes up empty. This is how stale beliefs fail. A container
      // source matches any spot inside that container.
      if (const auto* r = a.source ? std::get_if<AtRegion>(&*a.source) : nullptr) {
        if (it->second != *a.source) {
          return PreFail{Predicate::at_region(obj, r->region),
                         obj + " is not at " + r->region};
        }
      } else if (const auto* f =
                     a.source ? std::get_if<InsideFixture>(&*a.source) : nullptr) {
        auto actual = scene::containing_fixture(reg, it->second);
        if (!actual || *actual != f->fixture) {
          return PreFail{Predicate::inside(obj, f->fixture),
                         obj + " is not inside " + f->fixture};
        }
      }
      return std::nullopt;
    }
    case ActionType::Place:
    case ActionType::Return: {
      const ObjectId& obj = *a.object;
      if (!s.placements.count(obj)) throw UnknownIdError(obj);
      if (s.held() != obj) {
        return PreFail{Predicate::holding(obj), "not holding " + obj};
      }
      const Location& target = *a.target;
      if (const auto* r = std::get_if<AtRegion>(&target)) {
        if (!reg.has_region(r->region)) throw UnknownIdError(r->region);
        int cap = reg.region_capacity(r->region);
        if (cap > 0) {
          int load = 0;
          for (const auto& [o, loc] : s.placements) {
            if (o != obj && loc == target) ++load;
          }
          if (load >= cap) {
            auto owner = scene::containing_fixture(reg, target);
            if (owner) {
              return PreFail{Predicate::empty_container(*owner),
                             r->region + " is full"};
            }
            return PreFail{std::nullopt, r->region + " is full"};
          }
        }
      } else if (const auto* f = std::get_if<InsideFixture>(&target)) {
        if (!reg.has_fixture(f->fixture)) throw UnknownIdError(f->fixture);
        if (!reg.fixture(f->fixture).container) {
          throw MalformedActionError(f->fixture + " is not a container");
        }
      } else {
        throw MalformedActionError("cannot place into the gripper");
      }
      if (auto owner = scene::containing_fixture(reg, target)) {
        auto st = s.fixtures.find(*owner);
        if (st == s.fixtures.end()) throw UnknownIdError(*owner);
        if (st->second.articulation != Articulation::Open) {
          return PreFail{Predicate::open(*owner), *owner + " is closed"};
        }
        int cap = reg.fixture(*owner).capacity;
        if (cap > 0) {
          int load = 0;
          for (const auto& [o, loc] : s.placements) {
            if (o == obj) continue;
            auto c = scene::containing_fixture(reg, loc);
            if (c && *c == *owner) ++load;
          }
          if (load >= cap) {
            return PreFail{Predicate::empty_container(*owner), *owner + " is full"};
          }
        }
      }
      return std::nullopt;
    }
    case ActionType::Open: {
      const FixtureId& f = *a.object;
      const auto& decl = reg.fixture(f);
      if (decl.articulation == Articulation::Fixed) {
        throw MalformedActionError(f + " does not articulate");
      }
      auto st = s.fixtures.find(f);
      if (st == s.fixtures.end()) throw UnknownIdError(f);
      if (st->second.articulation != Articulation::Closed) {
        return PreFail{Predicate::closed(f), f + " is not closed"};
      }
      return std::nullopt;
    }
    case ActionType::Close: {
      const FixtureId& f = *a.object;
      const auto& decl = reg.fixture(f);
      if (decl.articulation == Articulation::Fixed) {
        throw MalformedActionError(f + " does not articulate");
      }
      auto st = s.fixtures.find(f);
      if (st == s.fixtures.end()) throw UnknownIdError(f);
      if (st->second.articulation != Articulation::Open) {
        return PreFail{Predicate::open(f), f + " is not open"};
      }
      return std::nullopt;
    }
    case ActionType::Pour: {
      const ObjectId& obj = *a.object;
      if (!s.placements.count(obj)) throw UnknownIdError(obj);
      if (s.held() != obj) {
        return PreFail{Predicate::holding(obj), "not holding " + obj};
      }
      const Location& target = *a.target;
      if (const auto* r = std::get_if<AtRegion>(&target)) {
        if (!reg.has_region(r->region)) throw UnknownIdError(r->region);
      } else if (const auto* f = std::get_if<InsideFixture>(&target)) {
        if (!reg.has_fixture(f->fixture)) throw UnknownIdError(f->fixture);
      }
      return std::nullopt;
    }
    case ActionType::Turn:
    case ActionType::Press: {
      const FixtureId& f = *a.object;
      const auto& decl = reg.fixture(f);
      if (decl.power == Power::None) {
        throw MalformedActionError(f + " has no power control");
      }
      return std::nullopt;
    }
    case ActionType::Push: {
      const ObjectId& obj = *a.object;
      auto it = s.placements.find(obj);
      if (it == s.placements.end()) throw UnknownIdError(obj);
      if (std::holds_alternative<InGripper>(it->second)) {
        return PreFail{std::nullopt, obj + " is in the gripper"};
      }
      if (auto f = hidden_fail(it->second)) return f;
      const auto* r = std::get_if<AtRegion>(&*a.target);
      if (!r) throw MalformedActionError("push needs a region target");
      if (!reg.has_region(r->region)) throw UnknownIdError(r->region);
      return std::nullopt;
    }
    case ActionType::Move: {
      const auto* r = std::get_if<AtRegion>(&*a.target);
      if (!r) throw MalformedActionError("move needs a region target");
      if (!reg.has_region(r->region)) throw UnknownIdError(r->region);
      return std::nullopt;
    }
    case ActionType::Store: {
      const ObjectId& obj = *a.object;
      if (!s.placements.count(obj)) throw UnknownIdError(obj);
      const auto* f = std::get_if<InsideFixture>(&*a.target);
      if (!f) throw MalformedActionError("store needs a container target");
      const auto& decl = reg.fixture(f->fixture);
      if (!decl.container) throw MalformedActionError(f->fixture + " is not a container");
      if (s.held() != obj) {
        return PreFail{Predicate::holding(obj), "not holding " + obj};
      }
      auto st = s.fixtures.find(f->fixture);
      if (st == s.fixtures.end()) throw UnknownIdError(f->fixture);
      if (st->second.articulation != Articulation::Open) {
        return PreFail{Predicate::open(f->fixture), f->fixture + " is closed"};
      }
      int cap = decl.capacity;
      if (cap > 0) {
        int load = 0;
        for (const auto& [o, loc] : s.placements) {
          if (o == obj) continue;
          auto c = scene::containing_fixture(reg, loc);
          if (c && *c == f->fixture) ++load;
        }
        if (load >= cap) {
          return PreFail{Predicate::empty_container(f->fixture), f->fixture + " is full"};
        }
      }
      return std::nullopt;
    }
    case ActionType::Wait:
      return std::nullopt;
  }
  return std::nullopt;
}

bool noise_exempt(ActionType t) {
  return t == ActionType::Wait || t == ActionType::Move;
}

}  // namespace

StepOutcome EnvState::step(const Action& primitive) {
  actions::validate_action(primitive, /*plan_level=*/false);
  StepOutcome out;
  auto fail = check_preconditions(*registry_, truth_, primitive);
  if (fail) {
    out.status = StepStatus::PreconditionFailed;
    out.violated = fail->violated;
    out.message = fail->message;
    // A grasp that comes up empty disproves the believed location: reaching
    // for the object is an interaction, so the stale record is discarded.
    if (primitive.type == ActionType::Pick && primitive.object) {
      clear_stale_for(*primitive.object);
    }
    ++truth_.clock;
    return out;
  }
  if (!noise_exempt(primitive.type) && !rng_.chance(noise_.p_success)) {
    out.status = StepStatus::SlipFailed;
    out.message = "actuation slip";
    if (auto held = truth_.held()) {
      if (rng_.chance(noise_.q_drop)) {
        drop_to_floor(*held);
        out.dropped = held;
        clear_stale_for(*held);
      }
    }
    ++truth_.clock;
    return out;
  }

  switch (primitive.type) {
    case ActionType::Pick:
      truth_.placements[*primitive.object] = InGripper{};
      clear_stale_for(*primitive.object);
      break;
    case ActionType::Place:
    case ActionType::Return:
      truth_.placements[*primitive.object] = *primitive.target;
      clear_stale_for(*primitive.object);
      break;
    case ActionType::Open:
      truth_.fixtures[*primitive.object].articulation = Articulation::Open;
      clear_stale_touching(*primitive.object);
      break;
    case ActionType::Close:
      truth_.fixtures[*primitive.object].articulation = Articulation::Closed;
      break;
    case ActionType::Pour:
      clear_stale_for(*primitive.object);
      break;
    case ActionType::Turn:
    case ActionType::Press: {
      auto& st = truth_.fixtures[*primitive.object];
      st.power = st.power == Power::On ? Power::Off : Power::On;
      break;
    }
    case ActionType::Push:
      truth_.placements[*primitive.object] = *primitive.target;
      clear_stale_for(*primitive.object);
      break;
    case ActionType::Store:
      truth_.placements[*primitive.object] = *primitive.target;
      clear_stale_for(*primitive.object);
      break;
    case ActionType::Move:
    case ActionType::Wait:
      break;
  }
  ++truth_.clock;
  return out;
}

std::vector<std::string> EnvState::inject(int achieved_transitions) {
  std::vector<std::string> fired;
  if (!perturbations_enabled_) return fired;
  for (std::size_t i = 0; i < task_->perturbations.size(); ++i) {
    if (fired_[i]) continue;
    const auto& ev = task_->perturbations[i];
    bool due = false;
    if (const auto* s = std::get_if<task::AtStep>(&ev.trigger)) {
      due = truth_.clock >= s->t;
    } else {
      due = achieved_transitions >= std::get<task::AfterTransition>(ev.trigger).k;
    }
    if (!due) continue;
    fired_[i] = true;
    if (const auto* r = std::get_if<task::Relocate>(&ev.effect)) {
      if (!registry_->has_object(r->object)) throw UnknownIdError(r->object);
      truth_.placements[r->object] = r->to;
      fired.push_back(r->object + " relocated to " + scene::location_text(r->to));
    } else {
      if (auto held = truth_.held()) {
        drop_to_floor(*held);
        fired.push_back(*held + " knocked to the floor");
      } else {
        fired.push_back("drop event fired with empty gripper");
      }
    }
  }
  return fired;
}

Observation EnvState::observe() const {
  Observation obs;
  obs.clock = truth_.clock;
  obs.held = truth_.held();
  obs.fixtures = truth_.fixtures;
  if (mode_ == Observability::Full) {
    for (const auto& [obj, loc] : truth_.placements) {
      if (std::holds_alternative<InGripper>(loc)) continue;
      obs.objects[obj] = loc;
    }
    return obs;
  }
  for (const auto& [obj, loc] : truth_.placements) {
    if (std::holds_alternative<InGripper>(loc)) continue;
    if (stale_.count(obj)) continue;  // overlay decides below
    if (!scene::location_hidden(*registry_, truth_, loc)) {
      obs.objects[obj] = loc;
    }
  }
  for (const auto& [obj, believed] : stale_) {
    if (obs.held == obj) continue;
    if (!scene::location_hidden(*registry_, truth_, believed)) {
      obs.objects[obj] = believed;
    }
  }
  return obs;
}

}  // namespace homebench::sim
