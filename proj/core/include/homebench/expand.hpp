#pragma once

#include <map>
#include <vector>

#include "homebench/actions.hpp"
#include "homebench/sim.hpp"

namespace homebench::expand {

using actions::Action;
using actions::ActionType;
using actions::Subgoal;
using scene::Location;
using scene::ObjectId;
using scene::SceneRegistry;

// Turn a plan step into the primitive string the executor runs. Belief-aware:
// binds unbound pick sources from the observation (stale entries included —
// mistakes surface as precondition failures, not crashes), falls back to
// `hints` (the planner's memory), and prepends an open when the believed
// container looks closed. Already-satisfied subgoals expand to a lone wait.
// Throws UnexpandableError when no location hypothesis exists.
std::vector<Action> expand_subgoal(const SceneRegistry& registry,
                                   const Subgoal& subgoal,
                                   const sim::Observation& obs,
                                   const std::map<ObjectId, Location>& hints);

// Literal single-primitive expansion used by the task verifier: no belief, no
// repairs, the plan must already be executable as written.
std::vector<Action> strict_expand(const Subgoal& subgoal);

// Primitive count the canonical expansion uses under ideal conditions; the
// per-window execution budget is derived from this.
int oracle_expansion_length(ActionType t);

}  // namespace homebench::expand
