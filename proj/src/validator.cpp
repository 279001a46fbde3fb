#include "planguard/validator.hpp"

#include <algorithm>

#include "json.hpp"

namespace planguard {

std::string to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::Precondition:
      return "precondition";
    case ViolationKind::StateConstraint:
      return "state-constraint";
    case ViolationKind::Temporal:
      return "temporal";
    case ViolationKind::GoalNotReached:
      return "goal-not-reached";
    case ViolationKind::MalformedStep:
      return "malformed-step";
  }
  return {};
}

Verdict Verdict::ok() {
  Verdict v;
  v.valid = true;
  return v;
}

Verdict Verdict::violation(ViolationKind kind, std::optional<std::size_t> step,
                           std::string constraint_text, std::string detail) {
  Verdict v;
  v.valid = false;
  v.kind = kind;
  v.step = step;
  v.constraint_text = std::move(constraint_text);
  v.detail = std::move(detail);
  return v;
}

namespace {

GroundAtom ground_literal(const Literal& lit, const ActionSchema& schema,
                          const GroundAction& action) {
  GroundAtom atom;
  atom.predicate = lit.predicate;
  atom.args.reserve(lit.args.size());
  for (const std::string& term : lit.args) {
    if (term.starts_with("?")) {
      auto it = std::find(schema.params.begin(), schema.params.end(), term);
      atom.args.push_back(action.args[it - schema.params.begin()]);
    } else {
      atom.args.push_back(term);
    }
  }
  return atom;
}

bool literal_holds(const WorldState& state, const Literal& lit,
                   const ActionSchema& schema, const GroundAction& action) {
  return state.contains(ground_literal(lit, schema, action)) == lit.positive;
}

std::string ground_clause_text(const PrecondClause& clause,
                               const ActionSchema& schema,
                               const GroundAction& action) {
  auto one = [&](const Literal& lit) {
    GroundAtom atom = ground_literal(lit, schema, action);
    return lit.positive ? atom.to_string() : "(not " + atom.to_string() + ")";
  };
  if (clause.any_of.size() == 1) return one(clause.any_of.front());
  std::string out = "(or";
  for (const Literal& lit : clause.any_of) out += " " + one(lit);
  out += ")";
  return out;
}

}  // namespace

ApplyResult apply_action(const WorldState& state, const GroundAction& action,
                         const PlanningProblem& problem) {
  const ActionSchema* schema = problem.find_schema(action.schema);
  if (!schema || schema->arity() != action.args.size())
    throw std::invalid_argument("action does not match a schema of problem '" +
                                problem.name + "': " + action.to_string());

  for (const PrecondClause& clause : schema->preconditions) {
    bool satisfied = std::any_of(
        clause.any_of.begin(), clause.any_of.end(), [&](const Literal& lit) {
          return literal_holds(state, lit, *schema, action);
        });
    if (!satisfied)
      return PreconditionFailure{ground_clause_text(clause, *schema, action)};
  }

  WorldState next = state;
  for (const Literal& lit : schema->del_effects)
    next.remove(ground_literal(lit, *schema, action));
  for (const Literal& lit : schema->add_effects)
    next.add(ground_literal(lit, *schema, action));
  return next;
}

SimulationResult simulate(const PlanningProblem& problem, const Plan& plan) {
  SimulationResult result;
  result.trace.states.push_back(problem.init);

  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    const GroundAction& action = plan.steps[i];
    const std::size_t step = i + 1;

    const ActionSchema* schema = problem.find_schema(action.schema);
    if (!schema) {
      result.failed_step = step;
      result.malformed = true;
      result.failed_schema = action.schema;
      result.failure_detail = "unknown action '" + action.schema + "'";
      return result;
    }
    if (schema->arity() != action.args.size()) {
      result.failed_step = step;
      result.malformed = true;
      result.failed_schema = action.schema;
      result.failure_detail =
          "action '" + action.schema + "' takes " +
          std::to_string(schema->arity()) + " arguments, got " +
          std::to_string(action.args.size());
      return result;
    }
    for (const std::string& arg : action.args) {
      if (!problem.has_object(arg)) {
        result.failed_step = step;
        result.malformed = true;
        result.failed_schema = action.schema;
        result.failure_detail = "undeclared object '" + arg + "'";
        return result;
      }
    }

    ApplyResult applied =
        apply_action(result.trace.states.back(), action, problem);
    if (auto* failure = std::get_if<PreconditionFailure>(&applied)) {
      result.failed_step = step;
      result.failed_schema = action.schema;
      result.failure_detail = failure->literal;
      return result;
    }
    result.trace.states.push_back(std::move(std::get<WorldState>(applied)));
  }
  return result;
}

Trace trace_valuations(const StateTrace& trace,
                       const std::map<std::string, GroundAtom>& bindings) {
  Trace out;
  out.steps.reserve(trace.states.size());
  for (const WorldState& state : trace.states) {
    std::vector<std::string> props;
    for (const auto& [prop, atom] : bindings)
      if (state.contains(atom)) props.push_back(prop);
    out.steps.push_back(Valuation(std::move(props)));
  }
  return out;
}

Verdict verify_plan(const PlanningProblem& problem, const Plan& plan) {
  for (const TemporalConstraint& constraint :
       problem.constraints.temporal_constraints) {
    if (!constraint.translated())
      throw UntranslatedConstraint("constraint lacks a formal formula: " +
                                   constraint.text);
  }

  SimulationResult sim = simulate(problem, plan);
  if (!sim.complete()) {
    if (sim.malformed)
      return Verdict::violation(ViolationKind::MalformedStep, sim.failed_step,
                                sim.failed_schema, sim.failure_detail);
    return Verdict::violation(ViolationKind::Precondition, sim.failed_step,
                              sim.failed_schema,
                              "unsatisfied precondition " + sim.failure_detail);
  }

  for (std::size_t i = 0; i < sim.trace.states.size(); ++i) {
    for (const StateConstraint& constraint :
         problem.constraints.state_constraints) {
      if (!goal_holds(sim.trace.states[i], constraint.formula)) {
        std::optional<std::size_t> step;
        if (i > 0) step = i;
        return Verdict::violation(
            ViolationKind::StateConstraint, step, constraint.text,
            i == 0 ? "initial state violates the constraint"
                   : "state after step " + std::to_string(i) +
                         " violates the constraint");
      }
    }
  }

  for (const TemporalConstraint& constraint :
       problem.constraints.temporal_constraints) {
    LtlAutomaton automaton = compile_automaton(constraint.formula);
    Trace trace = trace_valuations(sim.trace, constraint.bindings);
    AutomatonRun run = run_automaton(automaton, trace.steps);
    if (!run.accepted) {
      std::optional<std::size_t> step;
      if (run.rejected_at && *run.rejected_at > 0) step = *run.rejected_at;
      return Verdict::violation(
          ViolationKind::Temporal, step, constraint.text,
          step ? "violation established after step " + std::to_string(*step)
               : "trace rejected at end of plan");
    }
  }

  if (!goal_holds(sim.trace.states.back(), problem.goal))
    return Verdict::violation(ViolationKind::GoalNotReached, std::nullopt,
                              problem.goal.to_string(),
                              "final state does not satisfy the goal");
  return Verdict::ok();
}

std::string reasoning_text(const Verdict& verdict, const Plan& plan,
                           const PlanningProblem& problem) {
  Plan prefix;
  if (verdict.step)
    prefix.steps.assign(plan.steps.begin(),
                        plan.steps.begin() +
                            std::min<std::size_t>(*verdict.step,
                                                  plan.steps.size()));
  else
    prefix = plan;

  std::string out = format_plan(prefix, problem);
  if (!out.empty()) out += '\n';
  out += "is invalid.\n";

  auto with_period = [](std::string text) {
    if (!text.empty() && text.back() != '.') text += '.';
    return text;
  };

  switch (verdict.kind) {
    case ViolationKind::Precondition:
      out += "Step " + std::to_string(verdict.step.value()) +
             " violates the precondition of the action " +
             verdict.constraint_text + ".";
      break;
    case ViolationKind::MalformedStep:
      out += "Step " + std::to_string(verdict.step.value()) +
             " is not a valid action.";
      break;
    case ViolationKind::StateConstraint:
    case ViolationKind::Temporal:
      out += "It violates the constraint: " +
             with_period(verdict.constraint_text);
      break;
    case ViolationKind::GoalNotReached:
      out += "It does not reach the goal: " + verdict.constraint_text;
      break;
  }
  return out;
}

std::string verdict_record_json(const Verdict& verdict, const Plan& plan,
                                const PlanningProblem& problem) {
  nlohmann::json record;
  if (verdict.valid) {
    record["kind"] = "valid";
  } else {
    record["kind"] = to_string(verdict.kind);
    if (verdict.step)
      record["step"] = *verdict.step;
    else
      record["step"] = nullptr;
    record["constraint_text"] = verdict.constraint_text;
    record["reasoning"] = reasoning_text(verdict, plan, problem);
  }
  return record.dump();
}

}  // namespace planguard
