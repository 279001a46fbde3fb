#include "planguard/hierarchical.hpp"

#include <algorithm>

namespace planguard {

std::string to_string(HierEvent::Kind kind) {
  switch (kind) {
    case HierEvent::Kind::SubtaskStarted:
      return "subtask-started";
    case HierEvent::Kind::SubtaskSucceeded:
      return "subtask-succeeded";
    case HierEvent::Kind::SubtaskFailed:
      return "subtask-failed";
    case HierEvent::Kind::Push:
      return "push";
    case HierEvent::Kind::Rollback:
      return "rollback";
    case HierEvent::Kind::EmptyStackFailure:
      return "empty-stack-failure";
    case HierEvent::Kind::FallbackInvoked:
      return "fallback-invoked";
  }
  return {};
}

DifficultyDecision assess_difficulty(const PlanningProblem& problem,
                                     PlannerBackend& backend,
                                     const PromptTemplates& templates,
                                     const DomainPrompts& domain,
                                     double threshold,
                                     ConfidenceAggregate aggregate) {
  DifficultyDecision decision;
  decision.probe =
      backend.generate(build_task_prompt(templates, domain, problem));
  decision.confidence = confidence_score(decision.probe, aggregate);
  // Unavailable probabilities fall back to the optimistic policy: plan
  // directly rather than paying for decomposition.
  decision.direct = !decision.confidence || *decision.confidence >= threshold;
  return decision;
}

namespace {

struct RollbackEntry {
  std::size_t k;
  WorldState state;
  Plan partial_plan;
};

PlanningProblem scoped_problem(const PlanningProblem& problem,
                               const GoalNode& goal, const WorldState& state,
                               const std::string& name_suffix) {
  PlanningProblem scope = problem;
  if (!name_suffix.empty()) scope.name += name_suffix;
  scope.init = state;
  scope.goal = goal;
  return scope;
}

struct SubtaskResult {
  bool success = false;
  Plan plan;
  WorldState end_state;
  std::size_t loop_iterations = 0;
  bool fallback_used = false;
  std::size_t rollbacks = 0;
  std::size_t subtasks = 0;
};

SubtaskResult plan_leaf(const PlanningProblem& scope, PlannerBackend& backend,
                        const PromptTemplates& templates,
                        const DomainPrompts& domain,
                        const HierOptions& options) {
  // A sub-goal that already holds (with all constraints satisfied) is solved
  // by the empty plan; the reply format cannot express one, so don't ask.
  if (verify_plan(scope, Plan{}).valid) {
    SubtaskResult result;
    result.success = true;
    result.end_state = scope.init;
    return result;
  }

  LoopOptions loop;
  loop.iteration_limit = options.iteration_limit;
  loop.correction_style = options.correction_style;
  loop.transcript = options.transcript;
  if (options.discriminate_subtasks) {
    DifficultyDecision decision =
        assess_difficulty(scope, backend, templates, domain,
                          options.confidence_threshold, options.aggregate);
    // Atomic sub-goals cannot be decomposed further; the probe is reused as
    // iteration 1 either way so no generation is wasted.
    loop.initial_generation = decision.probe;
  }
  LoopOutcome outcome =
      plan_with_verification(scope, backend, templates, domain, loop);

  SubtaskResult result;
  result.loop_iterations = outcome.iterations_used;
  result.subtasks = 1;
  if (!outcome.success) return result;
  result.success = true;
  result.plan = *outcome.plan;
  SimulationResult sim = simulate(scope, result.plan);
  result.end_state = sim.trace.states.back();
  return result;
}

SubtaskResult plan_subtask(const PlanningProblem& problem,
                           const GoalNode& goal, const WorldState& state,
                           std::size_t index, PlannerBackend& backend,
                           const PromptTemplates& templates,
                           const DomainPrompts& domain,
                           const HierOptions& options, int depth);

HierOutcome decompose(const PlanningProblem& problem, const GoalNode& goal,
                      const WorldState& state, std::size_t failure_limit,
                      PlannerBackend& backend,
                      const PromptTemplates& templates,
                      const DomainPrompts& domain, const HierOptions& options,
                      int depth) {
  HierOutcome outcome;

  // OR goals: first successful disjunct wins.
  if (goal.kind == GoalNode::Kind::Or) {
    for (const GoalNode& disjunct : goal.children) {
      HierOutcome attempt =
          decompose(problem, disjunct, state, failure_limit, backend,
                    templates, domain, options, depth);
      outcome.subtasks_attempted += attempt.subtasks_attempted;
      outcome.rollbacks += attempt.rollbacks;
      outcome.loop_iterations += attempt.loop_iterations;
      if (attempt.success) {
        outcome.success = true;
        outcome.plan = std::move(attempt.plan);
        outcome.final_state = std::move(attempt.final_state);
        outcome.fallback_used = attempt.fallback_used;
        return outcome;
      }
    }
    return outcome;
  }

  const std::vector<GoalNode> subgoals = get_subgoals(goal);
  const PlanningProblem scope = scoped_problem(problem, goal, state, "");

  auto emit = [&](HierEvent::Kind kind, std::size_t k, std::size_t counter,
                  const FailureKey& key, const WorldState& s,
                  const Plan& partial) {
    if (!options.events) return;
    HierEvent event;
    event.kind = kind;
    event.k = k;
    event.counter = counter;
    event.key = key;
    event.state = s;
    event.partial_plan = partial;
    options.events(event);
  };

  WorldState current = state;
  Plan total;
  std::size_t k = 0;
  std::vector<RollbackEntry> stack;
  std::map<FailureKey, std::size_t> failures;
  std::vector<SubPlanResult> subresults;

  // Bounded total work: t attempts per sub-goal per revision, each costing
  // at most iteration_limit generations.
  const std::size_t attempt_budget =
      std::max<std::size_t>(1, failure_limit * subgoals.size() *
                                   std::max<std::size_t>(
                                       1, options.iteration_limit));
  std::size_t attempts = 0;

  while (k < subgoals.size()) {
    const GoalNode& subgoal = subgoals[k];
    FailureKey key{current.canonical(), subgoal.to_string()};

    if (failures[key] >= failure_limit) {
      if (stack.empty()) {
        emit(HierEvent::Kind::EmptyStackFailure, k, failures[key], key,
             current, total);
        outcome.plan = std::move(total);
        return outcome;
      }
      RollbackEntry entry = std::move(stack.back());
      stack.pop_back();
      k = entry.k;
      current = std::move(entry.state);
      total = std::move(entry.partial_plan);
      subresults.resize(k);
      ++outcome.rollbacks;
      emit(HierEvent::Kind::Rollback, k, 0,
           FailureKey{current.canonical(), subgoals[k].to_string()}, current,
           total);
      continue;
    }

    if (attempts++ >= attempt_budget) {
      outcome.plan = std::move(total);
      return outcome;
    }

    emit(HierEvent::Kind::SubtaskStarted, k, failures[key], key, current,
         total);
    ++outcome.subtasks_attempted;

    SubtaskResult sub = plan_subtask(problem, subgoal, current, k, backend,
                                     templates, domain, options, depth);
    outcome.loop_iterations += sub.loop_iterations;
    outcome.subtasks_attempted += sub.subtasks - 1;
    outcome.rollbacks += sub.rollbacks;

    if (!sub.success) {
      ++failures[key];
      emit(HierEvent::Kind::SubtaskFailed, k, failures[key], key, current,
           total);
      continue;
    }

    stack.push_back({k, current, total});
    emit(HierEvent::Kind::Push, k, failures[key], key, current, total);

    SubPlanResult record;
    record.goal = subgoal;
    record.problem_text =
        scoped_problem(problem, subgoal, current, "").to_text();
    record.plan = sub.plan;
    record.start_state = current;
    record.end_state = sub.end_state;
    subresults.push_back(std::move(record));

    total.steps.insert(total.steps.end(), sub.plan.steps.begin(),
                       sub.plan.steps.end());
    failures[key] = 0;
    current = sub.end_state;
    ++k;
    emit(HierEvent::Kind::SubtaskSucceeded, k - 1, 0, key, current, total);
  }

  // Composition: direct concatenation must survive re-verification against
  // the whole goal; dependent sub-goals or a failed re-check route through
  // the in-context-example fallback.
  bool need_fallback = detect_dependencies(scope, subresults);
  if (!need_fallback) {
    Verdict verdict = verify_plan(scope, total);
    if (verdict.valid) {
      outcome.success = true;
      outcome.plan = std::move(total);
      outcome.final_state = current;
      return outcome;
    }
    need_fallback = true;
  }

  if (need_fallback && !subresults.empty()) {
    emit(HierEvent::Kind::FallbackInvoked, k, 0,
         FailureKey{current.canonical(), goal.to_string()}, current, total);
    LoopOptions loop;
    loop.iteration_limit = options.iteration_limit;
    loop.correction_style = options.correction_style;
    loop.transcript = options.transcript;
    LoopOutcome composed = compose_with_examples(scope, subresults, backend,
                                                 templates, domain, loop);
    outcome.loop_iterations += composed.iterations_used;
    outcome.fallback_used = true;
    if (composed.success) {
      outcome.success = true;
      outcome.plan = *composed.plan;
      outcome.final_state = simulate(scope, outcome.plan).trace.states.back();
      return outcome;
    }
  }
  outcome.plan = std::move(total);
  return outcome;
}

SubtaskResult plan_subtask(const PlanningProblem& problem,
                           const GoalNode& goal, const WorldState& state,
                           std::size_t index, PlannerBackend& backend,
                           const PromptTemplates& templates,
                           const DomainPrompts& domain,
                           const HierOptions& options, int depth) {
  // Conjunctive sub-goals decompose one level deeper; beyond that (and for
  // atomic goals) the verification loop takes over directly.
  if (goal.kind == GoalNode::Kind::And && depth < 2) {
    HierOutcome nested =
        decompose(problem, goal, state, options.failure_limit, backend,
                  templates, domain, options, depth + 1);
    SubtaskResult result;
    result.success = nested.success;
    result.plan = std::move(nested.plan);
    result.end_state = std::move(nested.final_state);
    result.loop_iterations = nested.loop_iterations;
    result.fallback_used = nested.fallback_used;
    result.rollbacks = nested.rollbacks;
    result.subtasks = std::max<std::size_t>(1, nested.subtasks_attempted);
    return result;
  }
  PlanningProblem scope = scoped_problem(
      problem, goal, state, "-sub" + std::to_string(index + 1));
  return plan_leaf(scope, backend, templates, domain, options);
}

}  // namespace

bool detect_dependencies(const PlanningProblem& problem,
                         const std::vector<SubPlanResult>& subresults) {
  if (subresults.size() <= 1) return false;
  Plan concatenated;
  for (const SubPlanResult& sub : subresults)
    concatenated.steps.insert(concatenated.steps.end(),
                              sub.plan.steps.begin(), sub.plan.steps.end());
  SimulationResult sim = simulate(problem, concatenated);
  if (!sim.complete()) return true;
  const WorldState& final_state = sim.trace.states.back();
  for (const SubPlanResult& sub : subresults)
    if (!goal_holds(final_state, sub.goal)) return true;
  return false;
}

LoopOutcome compose_with_examples(const PlanningProblem& problem,
                                  const std::vector<SubPlanResult>& subresults,
                                  PlannerBackend& backend,
                                  const PromptTemplates& templates,
                                  const DomainPrompts& domain,
                                  const LoopOptions& options) {
  if (subresults.empty())
    throw std::invalid_argument(
        "compose_with_examples needs at least one solved sub-problem");
  LoopOptions loop = options;
  for (const SubPlanResult& sub : subresults)
    loop.in_context_examples.emplace_back(sub.problem_text,
                                          format_plan(sub.plan, problem));
  return plan_with_verification(problem, backend, templates, domain, loop);
}

HierOutcome hierarchical_plan(const PlanningProblem& problem,
                              const GoalNode& goal, const WorldState& state,
                              std::size_t failure_limit,
                              PlannerBackend& backend,
                              const PromptTemplates& templates,
                              const DomainPrompts& domain,
                              const HierOptions& options) {
  HierOptions scoped = options;
  scoped.failure_limit = failure_limit;
  return decompose(problem, goal, state, failure_limit, backend, templates,
                   domain, scoped, 1);
}

AssuredOutcome plan_with_assurance(const PlanningProblem& problem,
                                   PlannerBackend& backend,
                                   const PromptTemplates& templates,
                                   const DomainPrompts& domain,
                                   const HierOptions& options) {
  AssuredOutcome outcome;
  DifficultyDecision decision =
      assess_difficulty(problem, backend, templates, domain,
                        options.confidence_threshold, options.aggregate);
  if (decision.direct) {
    LoopOptions loop;
    loop.iteration_limit = options.iteration_limit;
    loop.correction_style = options.correction_style;
    loop.transcript = options.transcript;
    loop.initial_generation = decision.probe;
    LoopOutcome direct =
        plan_with_verification(problem, backend, templates, domain, loop);
    outcome.success = direct.success;
    if (direct.plan) outcome.plan = *direct.plan;
    outcome.iterations = direct.iterations_used;
    outcome.direct_history = std::move(direct.history);
    return outcome;
  }

  outcome.decomposed = true;
  outcome.iterations = 1;  // the probe
  HierOutcome hier =
      hierarchical_plan(problem, problem.goal, problem.init,
                        options.failure_limit, backend, templates, domain,
                        options);
  outcome.success = hier.success;
  outcome.plan = std::move(hier.plan);
  outcome.fallback_used = hier.fallback_used;
  outcome.iterations += hier.loop_iterations;
  outcome.rollbacks = hier.rollbacks;
  return outcome;
}

}  // namespace planguard
