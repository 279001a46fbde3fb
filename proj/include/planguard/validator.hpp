#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "planguard/ltl.hpp"
#include "planguard/problem.hpp"

namespace planguard {

class UntranslatedConstraint : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ViolationKind {
  Precondition,
  StateConstraint,
  Temporal,
  GoalNotReached,
  MalformedStep,
};

std::string to_string(ViolationKind kind);

struct Verdict {
  bool valid = false;
  ViolationKind kind = ViolationKind::GoalNotReached;
  // 1-based step; empty for GoalNotReached and end-of-trace/initial-state
  // violations.
  std::optional<std::size_t> step;
  // NL sentence for constraint violations, schema name for precondition and
  // malformed-step violations, goal text for goal misses.
  std::string constraint_text;
  std::string detail;

  static Verdict ok();
  static Verdict violation(ViolationKind kind, std::optional<std::size_t> step,
                           std::string constraint_text, std::string detail);
};

// states[0] = init, states[i] = state after step i.
struct StateTrace {
  std::vector<WorldState> states;
};

// Not an exception: a verdict ingredient.
struct PreconditionFailure {
  std::string literal;  // first unsatisfied precondition clause, ground form
};

using ApplyResult = std::variant<WorldState, PreconditionFailure>;

// (state \ del) ∪ add when every ground precondition clause holds.
ApplyResult apply_action(const WorldState& state, const GroundAction& action,
                         const PlanningProblem& problem);

struct SimulationResult {
  StateTrace trace;  // full, or the prefix up to the failing step
  std::optional<std::size_t> failed_step;  // 1-based
  bool malformed = false;   // failing step was not a well-formed action
  std::string failure_detail;
  std::string failed_schema;

  bool complete() const { return !failed_step.has_value(); }
};

SimulationResult simulate(const PlanningProblem& problem, const Plan& plan);

// Projects a state trace onto LTL propositions: prop true at i iff its bound
// atom is in states[i].
Trace trace_valuations(const StateTrace& trace,
                       const std::map<std::string, GroundAtom>& bindings);

// Check order: simulation, state constraints, temporal constraints, goal.
// First failure wins. Throws UntranslatedConstraint when a temporal
// constraint lacks a formal formula.
Verdict verify_plan(const PlanningProblem& problem, const Plan& plan);

// Counterexample text fed back to the planner: the plan prefix through the
// violating step (full plan when no step is attached), "is invalid.", and one
// explanatory sentence.
std::string reasoning_text(const Verdict& verdict, const Plan& plan,
                           const PlanningProblem& problem);

// Result-record form of a verdict: {"kind", "step", "constraint_text",
// "reasoning"}; embedded in benchmark result files.
std::string verdict_record_json(const Verdict& verdict, const Plan& plan,
                                const PlanningProblem& problem);

}  // namespace planguard
