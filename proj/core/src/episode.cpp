#include "homebench/episode.hpp"

#include <algorithm>

#include "homebench/error.hpp"
#include "homebench/expand.hpp"

namespace homebench::episode {

using actions::Action;
using actions::ActionType;
using actions::Plan;
using actions::Subgoal;
using planner::Decision;
using planner::DecisionKind;
using scene::FixtureId;
using scene::Location;
using scene::ObjectId;
using task::MemoryMeta;

const char* episode_status_name(EpisodeStatus s) {
  switch (s) {
    case EpisodeStatus::Done: return "done";
    case EpisodeStatus::PlanExhausted: return "plan_exhausted";
    case EpisodeStatus::Timeout: return "timeout";
    case EpisodeStatus::Aborted: return "aborted";
  }
  return "aborted";
}

namespace {

Json plan_texts(const Plan& p) {
  Json j = Json::array();
  for (const auto& a : p) j.push_back(a.text());
  return j;
}

std::map<ObjectId, Location> hint_map(const planner::MemoryBank& m) {
  std::map<ObjectId, Location> hints;
  for (const auto& [obj, fact] : m.facts) hints[obj] = fact.location;
  return hints;
}

const char* step_status_name(sim::StepStatus s) {
  switch (s) {
    case sim::StepStatus::Succeeded: return "ok";
    case sim::StepStatus::PreconditionFailed: return "precondition";
    case sim::StepStatus::SlipFailed: return "slip";
  }
  return "ok";
}

}  // namespace

EpisodeResult run_episode(const scene::SceneRegistry& registry,
                          const task::TaskSpec& task, std::uint64_t episode_seed,
                          const EpisodeConfig& config, planner::Planner& the_planner,
                          std::vector<Json>* trace_lines) {
  EpisodeResult res;
  sim::EnvState env(registry, task, episode_seed, config.noise,
                    config.observability, config.perturbations_enabled);
  const int total_transitions = static_cast<int>(task.key_transitions.size());
  const int max_steps = task.max_steps.value_or(config.max_steps);
  const task::AnchorPolicy anchor = config.anchor_override.value_or(task.anchor);

  auto emit = [&](Json j) {
    if (trace_lines) trace_lines->push_back(std::move(j));
  };

  auto sweep = [&] {
    while (res.transitions_achieved < total_transitions &&
           scene::eval_set(registry, env.truth(),
                           task.key_transitions[res.transitions_achieved])) {
      res.transition_clocks.push_back(env.clock());
      ++res.transitions_achieved;
    }
  };

  auto note_visibility = [&](const sim::Observation& obs) {
    if (!task.memory) return;
    const ObjectId& target = task.memory->target;
    if (obs.held == target || obs.objects.count(target)) res.target_seen = true;
  };

  auto capture_branch = [&](const Plan& replacement) {
    if (!task.memory || res.branch_container) return;
    const auto& cands = task.memory->candidates;
    auto is_candidate = [&](const FixtureId& f) {
      return std::find(cands.begin(), cands.end(), f) != cands.end();
    };
    for (const auto& step : replacement) {
      std::optional<FixtureId> chosen;
      if ((step.type == ActionType::Open) && step.object && is_candidate(*step.object)) {
        chosen = *step.object;
      } else if (step.type == ActionType::Pick && step.object &&
                 *step.object == task.memory->target && step.source) {
        auto c = scene::containing_fixture(registry, *step.source);
        if (c && is_candidate(*c)) chosen = *c;
      }
      if (chosen) {
        res.branch_container = *chosen;
        res.branch_correct = *chosen == task.memory->target_container;
        return;
      }
    }
  };

  auto abort_with = [&](const std::string& reason) {
    res.status = EpisodeStatus::Aborted;
    res.abort_reason = reason;
  };

  {
    Json h;
    h["record"] = "header";
    h["task"] = task.id;
    h["category"] = task::category_name(task.category);
    h["seed"] = episode_seed;
    h["max_steps"] = max_steps;
    emit(std::move(h));
  }

  sweep();
  sim::Observation obs0 = env.observe();
  note_visibility(obs0);

  Plan plan;
  try {
    plan = the_planner.plan(task, obs0);
    if (plan.empty()) throw MalformedPlanError("planner produced no steps");
    for (const auto& step : plan) actions::validate_action(step, /*plan_level=*/true);
  } catch (const std::exception& e) {
    abort_with(e.what());
  }

  if (res.status != EpisodeStatus::Aborted) {
    res.initial_plan = plan;
    {
      Json p;
      p["record"] = "plan";
      p["steps"] = plan_texts(plan);
      emit(std::move(p));
    }

    int active = 0;
    int attempts = 0;
    std::vector<char> asked(task.questions.size(), 0);
    bool explore_done = false;
    std::int64_t prims_since_anchor = 0;

    while (true) {
      if (env.clock() >= max_steps) {
        res.status = EpisodeStatus::Timeout;
        break;
      }
      if (active >= static_cast<int>(plan.size())) {
        sim::Observation obs = env.observe();
        note_visibility(obs);
        Decision d;
        try {
          d = the_planner.decide(task, obs, /*plan_exhausted=*/true);
          if (d.kind == DecisionKind::Replace) {
            if (d.replacement.empty()) throw MalformedPlanError("empty replacement");
            for (const auto& s : d.replacement) actions::validate_action(s, true);
          }
        } catch (const std::exception& e) {
          abort_with(e.what());
          break;
        }
        Json a;
        a["record"] = "anchor";
        a["t"] = env.clock();
        a["exhausted"] = true;
        a["decision"] = planner::decision_name(d.kind);
        if (d.kind == DecisionKind::Replace) a["replacement"] = plan_texts(d.replacement);
        a["memory"] = the_planner.memory().digest();
        emit(std::move(a));
        if (d.kind == DecisionKind::Replace) {
          capture_branch(d.replacement);
          plan = d.replacement;
          active = 0;
          attempts = 0;
          continue;
        }
        if (d.kind == DecisionKind::DeclareDone) {
          res.status = EpisodeStatus::Done;
        } else {
          res.status = EpisodeStatus::PlanExhausted;
        }
        break;
      }

      // ---- one subgoal window ----
      const Subgoal& sg = plan[active];
      planner::WindowReport window;
      window.subgoal_index = active;
      window.subgoal = sg;
      const int budget =
          std::max(2, config.budget_scale * expand::oracle_expansion_length(sg.type));
      std::vector<Action> prims;
      try {
        prims = expand::expand_subgoal(registry, sg, env.observe(),
                                       hint_map(the_planner.memory()));
      } catch (const UnexpandableError&) {
        window.expansion_failed = true;
        prims = {Action::wait()};  // burn a tick; the planner hears about it
      }
      if (static_cast<int>(prims.size()) > budget) prims.resize(budget);

      bool step_threw = false;
      for (const auto& prim : prims) {
        if (env.clock() >= max_steps) break;
        auto events = env.inject(res.transitions_achieved);
        const std::int64_t t_before = env.clock();
        sim::StepOutcome out;
        try {
          out = env.step(prim);
        } catch (const std::exception& e) {
          abort_with(std::string("bad primitive: ") + e.what());
          step_threw = true;
          break;
        }
        sweep();
        sim::Observation after = env.observe();
        note_visibility(after);
        window.steps.push_back({prim, out.status, out.violated, after});
        ++prims_since_anchor;

        Json s;
        s["record"] = "step";
        s["t"] = t_before;
        s["subgoal"] = active;
        s["primitive"] = prim.text();
        s["status"] = step_status_name(out.status);
        if (out.violated) s["violated"] = out.violated->text();
        if (out.dropped) s["dropped"] = *out.dropped;
        if (!events.empty()) s["events"] = events;
        s["achieved"] = res.transitions_achieved;
        s["obs"] = after.digest();
        emit(std::move(s));

        if (task.memory && task.memory->style == MemoryMeta::Style::Exploration &&
            !explore_done && out.status == sim::StepStatus::Succeeded &&
            (prim.type == ActionType::Open || prim.type == ActionType::Close) &&
            prim.object) {
          const auto& cands = task.memory->candidates;
          if (std::find(cands.begin(), cands.end(), *prim.object) != cands.end()) {
            res.explore_trace.push_back(prim);
            if (prim.type == ActionType::Open &&
                (after.objects.count(task.memory->target) ||
                 after.held == task.memory->target)) {
              explore_done = true;
            }
          }
        }

        if (out.status != sim::StepStatus::Succeeded) break;
      }
      if (step_threw) break;
      ++res.subgoal_executions;

      const bool sparse = anchor.kind == task::AnchorPolicy::Kind::EverySteps;
      if (sparse && prims_since_anchor < anchor.every) {
        // Between anchors run open loop: clean windows advance, failures
        // retry up to the attempt cap.
        bool clean = !window.expansion_failed && !window.steps.empty() &&
                     std::all_of(window.steps.begin(), window.steps.end(),
                                 [](const planner::WindowStep& s) {
                                   return s.status == sim::StepStatus::Succeeded;
                                 });
        if (clean) {
          ++active;
          attempts = 0;
        } else if (++attempts >= config.max_subgoal_attempts) {
          ++active;
          attempts = 0;
        }
        continue;
      }
      prims_since_anchor = 0;

      // ---- anchor: reflect, answer due probes, decide ----
      planner::CompletionJudgment judgment;
      Decision d;
      std::vector<QaRecord> answered_now;
      sim::Observation obs = env.observe();
      note_visibility(obs);
      try {
        judgment = the_planner.reflect(task, window);
        for (std::size_t qi = 0; qi < task.questions.size(); ++qi) {
          if (asked[qi]) continue;
          const auto& q = task.questions[qi];
          if (res.transitions_achieved < q.due_after) continue;
          bool ans = the_planner.answer(q, obs);
          bool truth = scene::eval_predicate(registry, env.truth(), q.probe);
          asked[qi] = 1;
          QaRecord rec{q.id, ans, truth};
          answered_now.push_back(rec);
          res.qa.push_back(rec);
        }
        d = the_planner.decide(task, obs, /*plan_exhausted=*/false);
        if (d.kind == DecisionKind::Replace) {
          if (d.replacement.empty()) throw MalformedPlanError("empty replacement");
          for (const auto& s : d.replacement) actions::validate_action(s, true);
        }
      } catch (const std::exception& e) {
        abort_with(e.what());
        break;
      }

      bool forced_advance = false;
      switch (d.kind) {
        case DecisionKind::Continue:
          if (++attempts >= config.max_subgoal_attempts) {
            ++active;
            attempts = 0;
            forced_advance = true;
          }
          break;
        case DecisionKind::Advance:
          active = std::clamp(d.advance_to, 0, static_cast<int>(plan.size()));
          attempts = 0;
          break;
        case DecisionKind::Replace:
          capture_branch(d.replacement);
          plan = d.replacement;
          active = 0;
          attempts = 0;
          break;
        case DecisionKind::DeclareDone:
          res.status = EpisodeStatus::Done;
          break;
      }

      Json a;
      a["record"] = "anchor";
      a["t"] = env.clock();
      a["subgoal"] = window.subgoal_index;
      a["complete"] = judgment.complete;
      a["decision"] = planner::decision_name(d.kind);
      if (d.kind == DecisionKind::Advance) a["advance_to"] = d.advance_to;
      if (d.kind == DecisionKind::Replace) a["replacement"] = plan_texts(d.replacement);
      if (forced_advance) a["forced_advance"] = true;
      if (!answered_now.empty()) {
        Json qa = Json::array();
        for (const auto& rec : answered_now) {
          Json q;
          q["id"] = rec.id;
          q["answer"] = rec.answer;
          q["truth"] = rec.truth;
          qa.push_back(q);
        }
        a["qa"] = qa;
      }
      a["memory"] = the_planner.memory().digest();
      emit(std::move(a));

      if (d.kind == DecisionKind::DeclareDone) break;
    }
  }

  res.goal_achieved = scene::eval_set(registry, env.truth(), task.goal);

  Json e;
  e["record"] = "end";
  e["status"] = episode_status_name(res.status);
  if (!res.abort_reason.empty()) e["reason"] = res.abort_reason;
  e["achieved"] = res.transitions_achieved;
  e["transitions"] = res.transition_clocks;
  e["subgoal_executions"] = res.subgoal_executions;
  e["goal_achieved"] = res.goal_achieved;
  if (task.memory) {
    e["target_seen"] = res.target_seen;
    if (task.memory->style == MemoryMeta::Style::Exploration) {
      e["explore"] = plan_texts(res.explore_trace);
    }
    if (res.branch_container) {
      Json b;
      b["container"] = *res.branch_container;
      b["correct"] = res.branch_correct;
      e["branch"] = b;
    }
  }
  emit(std::move(e));
  return res;
}

}  // namespace homebench::episode
