#include "homebench/actions.hpp"

#include <sstream>

#include "homebench/error.hpp"

namespace homebench::actions {

using scene::AtRegion;
using scene::InsideFixture;

const char* action_name(ActionType t) {
  switch (t) {
    case ActionType::Pick: return "pick";
    case ActionType::Place: return "place";
    case ActionType::Open: return "open";
    case ActionType::Close: return "close";
    case ActionType::Pour: return "pour";
    case ActionType::Turn: return "turn";
    case ActionType::Press: return "press";
    case ActionType::Push: return "push";
    case ActionType::Move: return "move";
    case ActionType::Store: return "store";
    case ActionType::Return: return "return";
    case ActionType::Wait: return "wait";
  }
  return "wait";
}

ActionType action_from_name(const std::string& s) {
  if (s == "pick") return ActionType::Pick;
  if (s == "place") return ActionType::Place;
  if (s == "open") return ActionType::Open;
  if (s == "close") return ActionType::Close;
  if (s == "pour") return ActionType::Pour;
  if (s == "turn") return ActionType::Turn;
  if (s == "press") return ActionType::Press;
  if (s == "push") return ActionType::Push;
  if (s == "move") return ActionType::Move;
  if (s == "store") return ActionType::Store;
  if (s == "return") return ActionType::Return;
  if (s == "wait") return ActionType::Wait;
  throw MalformedActionError("unknown verb: " + s);
}

Action Action::pick(ObjectId obj, std::optional<Location> from) {
  Action a;
  a.type = ActionType::Pick;
  a.object = std::move(obj);
  a.source = std::move(from);
  return a;
}
Action Action::place(ObjectId obj, Location at) {
  Action a;
  a.type = ActionType::Place;
  a.object = std::move(obj);
  a.target = std::move(at);
  return a;
}
Action Action::open(FixtureId fixture) {
  Action a;
  a.type = ActionType::Open;
  a.object = std::move(fixture);
  return a;
}
Action Action::close(FixtureId fixture) {
  Action a;
  a.type = ActionType::Close;
  a.object = std::move(fixture);
  return a;
}
Action Action::pour(ObjectId obj, Location into) {
  Action a;
  a.type = ActionType::Pour;
  a.object = std::move(obj);
  a.target = std::move(into);
  return a;
}
Action Action::turn(FixtureId fixture) {
  Action a;
  a.type = ActionType::Turn;
  a.object = std::move(fixture);
  return a;
}
Action Action::press(FixtureId fixture) {
  Action a;
  a.type = ActionType::Press;
  a.object = std::move(fixture);
  return a;
}
Action Action::push(ObjectId obj, RegionId to) {
  Action a;
  a.type = ActionType::Push;
  a.object = std::move(obj);
  a.target = AtRegion{std::move(to)};
  return a;
}
Action Action::move(RegionId to) {
  Action a;
  a.type = ActionType::Move;
  a.target = AtRegion{std::move(to)};
  return a;
}
Action Action::store(ObjectId obj, FixtureId container) {
  Action a;
  a.type = ActionType::Store;
  a.object = std::move(obj);
  a.target = InsideFixture{std::move(container)};
  return a;
}
Action Action::put_back(ObjectId obj, Location at) {
  Action a;
  a.type = ActionType::Return;
  a.object = std::move(obj);
  a.target = std::move(at);
  return a;
}
Action Action::wait() { return Action{}; }

void validate_action(const Action& a, bool plan_level) {
  auto need_object = [&] {
    if (!a.object || a.object->empty()) {
      throw MalformedActionError(std::string(action_name(a.type)) + " needs an object");
    }
  };
  auto need_target = [&] {
    if (!a.target) {
      throw MalformedActionError(std::string(action_name(a.type)) + " needs a target");
    }
  };
  auto no_args = [&] {
    if (a.object || a.source || a.target) {
      throw MalformedActionError(std::string(action_name(a.type)) + " takes no arguments");
    }
  };
  switch (a.type) {
    case ActionType::Pick:
      need_object();
      if (!plan_level && a.target) {
        throw MalformedActionError("pick takes no target");
      }
      return;
    case ActionType::Place:
    case ActionType::Pour:
    case ActionType::Push:
    case ActionType::Store:
    case ActionType::Return:
      need_object();
      need_target();
      return;
    case ActionType::Open:
    case ActionType::Close:
    case ActionType::Turn:
    case ActionType::Press:
      need_object();
      if (a.source || a.target) {
        throw MalformedActionError(std::string(action_name(a.type)) +
                                   " takes only a fixture");
      }
      return;
    case ActionType::Move:
      need_target();
      if (a.object) throw MalformedActionError("move takes no object");
      return;
    case ActionType::Wait:
      no_args();
      return;
  }
}

Json Action::to_json() const {
  Json j;
  j["action"] = action_name(type);
  if (object) j["object"] = *object;
  if (source) j["source"] = scene::location_to_json(*source);
  if (target) j["target"] = scene::location_to_json(*target);
  return j;
}

Action Action::from_json(const Json& j) {
  require_keys(j, {"action"}, {"object", "source", "target"}, "action");
  Action a;
  a.type = action_from_name(j.at("action").get<std::string>());
  if (j.contains("object")) a.object = j.at("object").get<std::string>();
  if (j.contains("source")) a.source = scene::location_from_json(j.at("source"));
  if (j.contains("target")) a.target = scene::location_from_json(j.at("target"));
  validate_action(a, /*plan_level=*/true);
  return a;
}

namespace {

// Connective between the object and the location slot, per verb.
const char* location_link(ActionType t, bool source_side) {
  switch (t) {
    case ActionType::Pick: return "from";
    case ActionType::Place: return "at";
    case ActionType::Pour: return "into";
    case ActionType::Push: return "to";
    case ActionType::Move: return "to";
    case ActionType::Store: return "in";
    case ActionType::Return: return "to";
    default: return source_side ? "from" : "to";
  }
}

std::string location_phrase(const Location& loc) {
  if (const auto* f = std::get_if<InsideFixture>(&loc)) return "inside " + f->fixture;
  return scene::location_text(loc);
}

Location location_from_phrase(const std::vector<std::string>& words,
                              std::size_t start, std::size_t end) {
  if (start >= end) throw MalformedActionError("empty location phrase");
  if (words[start] == "inside") {
    if (end - start != 2) throw MalformedActionError("bad inside-phrase arity");
    return InsideFixture{words[start + 1]};
  }
  if (end - start != 1) throw MalformedActionError("bad location phrase");
  return AtRegion{words[start]};
}

}  // namespace

std::string Action::text() const {
  std::string out = action_name(type);
  // Store renders its container without the "inside" marker: "store x in f".
  if (object) out += " " + *object;
  if (type == ActionType::Store && target) {
    out += std::string(" ") + location_link(type, false) + " " +
           std::get<InsideFixture>(*target).fixture;
    return out;
  }
  if (source) {
    out += std::string(" ") + location_link(type, true) + " " + location_phrase(*source);
  }
  if (target) {
    out += std::string(" ") + location_link(type, false) + " " + location_phrase(*target);
  }
  return out;
}

Action Action::from_text(const std::string& line) {
  std::vector<std::string> words;
  {
    std::istringstream in(line);
    std::string w;
    while (in >> w) words.push_back(w);
  }
  if (words.empty()) throw MalformedActionError("empty action line");
  Action a;
  a.type = action_from_name(words[0]);
  switch (a.type) {
    case ActionType::Wait:
      if (words.size() != 1) throw MalformedActionError("wait takes no arguments");
      return a;
    case ActionType::Open:
    case ActionType::Close:
    case ActionType::Turn:
    case ActionType::Press:
      if (words.size() != 2) throw MalformedActionError(line);
      a.object = words[1];
      return a;
    case ActionType::Move:
      if (words.size() != 3 || words[1] != "to") throw MalformedActionError(line);
      a.target = AtRegion{words[2]};
      return a;
    case ActionType::Pick: {
      if (words.size() < 2) throw MalformedActionError(line);
      a.object = words[1];
      if (words.size() == 2) return a;
      if (words[2] != "from") throw MalformedActionError(line);
      a.source = location_from_phrase(words, 3, words.size());
      return a;
    }
    case ActionType::Store: {
      if (words.size() != 4 || words[2] != "in") throw MalformedActionError(line);
      a.object = words[1];
      a.target = InsideFixture{words[3]};
      return a;
    }
    case ActionType::Place:
    case ActionType::Pour:
    case ActionType::Push:
    case ActionType::Return: {
      if (words.size() < 4) throw MalformedActionError(line);
      a.object = words[1];
      if (words[2] != location_link(a.type, false)) throw MalformedActionError(line);
      a.target = location_from_phrase(words, 3, words.size());
      return a;
    }
  }
  throw MalformedActionError(line);
}

CanonicalStep canonical_step(const Action& a) {
  return {action_name(a.type), a.object.value_or(""),
          a.source ? location_phrase(*a.source) : "",
          a.target ? location_phrase(*a.target) : ""};
}

std::vector<CanonicalStep> canonical_plan(const Plan& plan) {
  std::vector<CanonicalStep> out;
  out.reserve(plan.size());
  for (const auto& a : plan) out.push_back(canonical_step(a));
  return out;
}

Json plan_to_json(const Plan& plan) {
  Json j = Json::array();
  for (const auto& a : plan) j.push_back(a.to_json());
  return j;
}

Plan plan_from_json(const Json& j) {
  if (!j.is_array()) throw ParseError("plan: expected array");
  Plan plan;
  for (const auto& aj : j) plan.push_back(Action::from_json(aj));
  return plan;
}

}  // namespace homebench::actions
