#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "planguard/ltl.hpp"
#include "planguard/sexpr.hpp"

namespace planguard {

class SemanticError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

bool is_identifier(std::string_view token);  // [A-Za-z][A-Za-z0-9_-]*

struct GroundAtom {
  std::string predicate;
  std::vector<std::string> args;

  std::string to_string() const;  // "(pred a b)"
  auto operator<=>(const GroundAtom&) const = default;
};

// Finite set of ground atoms with set semantics and a canonical
// serialization (sorted atom strings).
class WorldState {
 public:
  WorldState() = default;
  WorldState(std::initializer_list<GroundAtom> atoms);
  explicit WorldState(std::vector<GroundAtom> atoms);

  bool contains(const GroundAtom& atom) const;
  void add(GroundAtom atom);
  void remove(const GroundAtom& atom);
  const std::vector<GroundAtom>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  std::string canonical() const;

  bool operator==(const WorldState&) const = default;

 private:
  std::vector<GroundAtom> atoms_;  // sorted, unique
};

// Atom template over schema parameters ("?x") and/or object constants.
struct Literal {
  bool positive = true;
  std::string predicate;
  std::vector<std::string> args;

  std::string to_string() const;
  bool operator==(const Literal&) const = default;
};

// One conjunct of a precondition: a literal, or a disjunction of literals.
struct PrecondClause {
  std::vector<Literal> any_of;  // size 1 = plain literal

  std::string to_string() const;
  bool operator==(const PrecondClause&) const = default;
};

struct ActionSchema {
  std::string name;
  std::vector<std::string> params;  // "?x" spelling, declared order
  std::vector<PrecondClause> preconditions;
  std::vector<Literal> add_effects;  // stored positive
  std::vector<Literal> del_effects;  // stored positive, deletion implied

  std::size_t arity() const { return params.size(); }
  bool operator==(const ActionSchema&) const = default;
};

struct GroundAction {
  std::string schema;
  std::vector<std::string> args;

  std::string to_string() const;  // "name a b"
  bool operator==(const GroundAction&) const = default;
};

struct GoalNode {
  enum class Kind { Literal, And, Or, Not };

  Kind kind = Kind::And;
  GroundAtom atom;       // Literal only
  bool positive = true;  // Literal only
  std::vector<GoalNode> children;  // And/Or: >=1, Not: exactly 1

  static GoalNode literal(GroundAtom atom, bool positive = true);
  static GoalNode conj(std::vector<GoalNode> children);
  static GoalNode disj(std::vector<GoalNode> children);
  static GoalNode negation(GoalNode child);

  std::string to_string() const;  // s-expression form
  bool operator==(const GoalNode&) const = default;
};

struct StateConstraint {
  std::string text;  // natural-language identity
  GoalNode formula;  // ground formula checked on every state

  bool operator==(const StateConstraint&) const = default;
};

struct TemporalConstraint {
  std::string text;
  LtlPtr formula;  // null until translated
  std::map<std::string, GroundAtom> bindings;  // proposition -> atom

  bool translated() const { return formula != nullptr; }
  bool operator==(const TemporalConstraint& other) const;
};

struct ConstraintSet {
  std::vector<StateConstraint> state_constraints;
  std::vector<TemporalConstraint> temporal_constraints;

  bool operator==(const ConstraintSet&) const = default;
};

inline constexpr std::size_t kDefaultPlanCap = 200;

struct Plan {
  std::vector<GroundAction> steps;

  std::size_t size() const { return steps.size(); }
  bool empty() const { return steps.empty(); }
  bool operator==(const Plan&) const = default;
};

struct PlanningProblem {
  std::string name;
  std::string domain_name;  // from (:domain ...), may be empty
  bool objects_keyword_cities = false;  // declared via (:cities ...)
  std::vector<std::string> objects;     // declared order, unique
  std::vector<ActionSchema> schemas;    // from the companion domain file
  WorldState init;
  GoalNode goal;
  ConstraintSet constraints;

  bool has_object(std::string_view name) const;
  const ActionSchema* find_schema(std::string_view name) const;
  // The unique schema with exactly two parameters, or null.
  const ActionSchema* unique_binary_schema() const;
  std::string to_text() const;  // problem-file form; parse round-trips

  bool operator==(const PlanningProblem&) const = default;
};

struct Domain {
  std::string name;
  std::vector<ActionSchema> schemas;
};

PlanningProblem parse_problem(std::string_view text);
Domain parse_domain(std::string_view text);

// Installs the domain's schemas into the problem, checking predicate
// arities against the problem's usage.
void attach_domain(PlanningProblem& problem, const Domain& domain);

enum class PlanTextErrorKind {
  NoPlanFound,
  UnknownAction,
  ArityMismatch,
  PlanTooLong,
};

class PlanTextError : public std::runtime_error {
 public:
  PlanTextError(PlanTextErrorKind kind, std::string message,
                std::size_t step = 0, std::string token = {})
      : std::runtime_error(std::move(message)),
        kind_(kind),
        step_(step),
        token_(std::move(token)) {}

  PlanTextErrorKind kind() const { return kind_; }
  std::size_t step() const { return step_; }  // 1-based, 0 = n/a
  const std::string& token() const { return token_; }

 private:
  PlanTextErrorKind kind_;
  std::size_t step_;
  std::string token_;
};

// Extracts the first contiguous run of step lines (numbered "N. action args"
// or arrow "A -> B" lines), skipping everything before a START-PLAN marker
// when one is present. Arrow steps desugar to the problem's unique binary
// schema.
Plan parse_plan_text(std::string_view text, const PlanningProblem& problem,
                     std::size_t cap = kDefaultPlanCap);

// Parses a ground goal expression ("(and (p a) (not (q b)))") against the
// problem's object declarations.
GoalNode parse_goal_text(std::string_view text,
                         const PlanningProblem& problem);

bool goal_holds(const WorldState& state, const GoalNode& goal);

// AND-decomposition: children of a conjunctive root, else the goal itself.
std::vector<GoalNode> get_subgoals(const GoalNode& goal);

// "1. name a b" lines, or "A -> B" lines for single-binary-schema problems.
std::string format_plan(const Plan& plan, const PlanningProblem& problem);
bool uses_arrow_format(const Plan& plan, const PlanningProblem& problem);

}  // namespace planguard
