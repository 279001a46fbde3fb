#include "planguard/oracle.hpp"

#include <algorithm>
#include <deque>
#include <queue>
#include <unordered_map>
#include <unordered_set>

namespace planguard {

namespace {

struct GroundLiteral {
  GroundAtom atom;
  bool positive;
};

struct GroundOp {
  GroundAction action;
  std::vector<std::vector<GroundLiteral>> precond_clauses;
  std::vector<GroundAtom> add;
  std::vector<GroundAtom> del;
};

GroundAtom instantiate(const Literal& lit, const ActionSchema& schema,
                       const std::vector<std::string>& args) {
  GroundAtom atom;
  atom.predicate = lit.predicate;
  atom.args.reserve(lit.args.size());
  for (const std::string& term : lit.args) {
    if (term.starts_with("?")) {
      auto it = std::find(schema.params.begin(), schema.params.end(), term);
      atom.args.push_back(args[it - schema.params.begin()]);
    } else {
      atom.args.push_back(term);
    }
  }
  return atom;
}

std::vector<GroundOp> ground_all_actions(const PlanningProblem& problem,
                                         std::size_t grounding_bound) {
  std::vector<std::string> objects = problem.objects;
  std::sort(objects.begin(), objects.end());

  std::size_t total = 0;
  for (const ActionSchema& schema : problem.schemas) {
    std::size_t count = 1;
    for (std::size_t i = 0; i < schema.arity(); ++i) {
      count *= objects.size();
      if (count > grounding_bound) break;
    }
    total += count;
    if (total > grounding_bound)
      throw GroundingExplosion("ground action count exceeds " +
                               std::to_string(grounding_bound));
  }

  std::vector<GroundOp> ops;
  ops.reserve(total);
  for (const ActionSchema& schema : problem.schemas) {
    std::vector<std::size_t> odometer(schema.arity(), 0);
    while (true) {
      GroundOp op;
      op.action.schema = schema.name;
      for (std::size_t digit : odometer)
        op.action.args.push_back(objects[digit]);
      for (const PrecondClause& clause : schema.preconditions) {
        std::vector<GroundLiteral> ground_clause;
        for (const Literal& lit : clause.any_of)
          ground_clause.push_back(
              {instantiate(lit, schema, op.action.args), lit.positive});
        op.precond_clauses.push_back(std::move(ground_clause));
      }
      for (const Literal& lit : schema.add_effects)
        op.add.push_back(instantiate(lit, schema, op.action.args));
      for (const Literal& lit : schema.del_effects)
        op.del.push_back(instantiate(lit, schema, op.action.args));
      ops.push_back(std::move(op));

      if (schema.arity() == 0) break;
      std::size_t i = odometer.size();
      bool wrapped = true;
      while (i-- > 0) {
        if (++odometer[i] < objects.size()) {
          wrapped = false;
          break;
        }
        odometer[i] = 0;
      }
      if (wrapped) break;
    }
  }
  return ops;
}

bool executable(const GroundOp& op, const WorldState& state) {
  for (const auto& clause : op.precond_clauses) {
    bool ok = std::any_of(clause.begin(), clause.end(),
                          [&](const GroundLiteral& lit) {
                            return state.contains(lit.atom) == lit.positive;
                          });
    if (!ok) return false;
  }
  return true;
}

WorldState apply_op(const GroundOp& op, const WorldState& state) {
  WorldState next = state;
  for (const GroundAtom& atom : op.del) next.remove(atom);
  for (const GroundAtom& atom : op.add) next.add(atom);
  return next;
}

bool state_constraints_hold(const PlanningProblem& problem,
                            const WorldState& state) {
  for (const StateConstraint& c : problem.constraints.state_constraints)
    if (!goal_holds(state, c.formula)) return false;
  return true;
}

// Compiled temporal constraints advanced in lockstep with the state.
struct TemporalProduct {
  std::vector<LtlAutomaton> automata;
  std::vector<std::map<std::string, GroundAtom>> bindings;

  static TemporalProduct build(const PlanningProblem& problem) {
    TemporalProduct product;
    for (const TemporalConstraint& c :
         problem.constraints.temporal_constraints) {
      if (!c.translated())
        throw UntranslatedConstraint("constraint lacks a formal formula: " +
                                     c.text);
      product.automata.push_back(compile_automaton(c.formula));
      product.bindings.push_back(c.bindings);
    }
    return product;
  }

  Valuation valuation(std::size_t i, const WorldState& state) const {
    std::vector<std::string> props;
    for (const auto& [prop, atom] : bindings[i])
      if (state.contains(atom)) props.push_back(prop);
    return Valuation(std::move(props));
  }

  std::vector<std::uint32_t> start(const WorldState& s0) const {
    std::vector<std::uint32_t> states(automata.size());
    for (std::size_t i = 0; i < automata.size(); ++i)
      states[i] = static_cast<std::uint32_t>(
          automata[i].next_state(automata[i].initial, valuation(i, s0)));
    return states;
  }

  std::vector<std::uint32_t> advance(const std::vector<std::uint32_t>& from,
                                     const WorldState& state) const {
    std::vector<std::uint32_t> states(automata.size());
    for (std::size_t i = 0; i < automata.size(); ++i)
      states[i] = static_cast<std::uint32_t>(
          automata[i].next_state(from[i], valuation(i, state)));
    return states;
  }

  bool all_accepting(const std::vector<std::uint32_t>& states) const {
    for (std::size_t i = 0; i < automata.size(); ++i)
      if (!automata[i].states[states[i]].accepting) return false;
    return true;
  }

  bool doomed(const std::vector<std::uint32_t>& states) const {
    for (std::size_t i = 0; i < automata.size(); ++i)
      if (automata[i].rejecting_sink(states[i])) return true;
    return false;
  }
};

std::string node_key(const WorldState& state,
                     const std::vector<std::uint32_t>& autos) {
  std::string key = state.canonical();
  for (std::uint32_t q : autos) {
    key += '#';
    key += std::to_string(q);
  }
  return key;
}

struct SearchEdge {
  std::int64_t parent;
  std::int32_t op;
};

Plan reconstruct(const std::vector<SearchEdge>& edges, std::int64_t leaf,
                 const std::vector<GroundOp>& ops) {
  std::vector<std::int32_t> applied;
  for (std::int64_t at = leaf; at >= 0 && edges[at].op >= 0;
       at = edges[at].parent)
    applied.push_back(edges[at].op);
  std::reverse(applied.begin(), applied.end());
  Plan plan;
  for (std::int32_t op : applied) plan.steps.push_back(ops[op].action);
  return plan;
}

enum class BfsStatus { Found, Exhausted, BudgetExceeded };

struct BfsOutcome {
  BfsStatus status;
  Plan plan;
};

BfsOutcome bfs_search(const PlanningProblem& problem,
                      const std::vector<GroundOp>& ops,
                      const TemporalProduct& product, std::size_t max_depth,
                      std::size_t node_budget) {
  if (!state_constraints_hold(problem, problem.init))
    return {BfsStatus::Exhausted, {}};
  std::vector<std::uint32_t> root_autos = product.start(problem.init);
  if (product.doomed(root_autos)) return {BfsStatus::Exhausted, {}};
  if (goal_holds(problem.init, problem.goal) &&
      product.all_accepting(root_autos))
    return {BfsStatus::Found, Plan{}};

  struct Frontier {
    std::int64_t id;
    std::size_t depth;
    WorldState state;
    std::vector<std::uint32_t> autos;
  };

  std::vector<SearchEdge> edges{{-1, -1}};
  std::unordered_set<std::string> visited{
      node_key(problem.init, root_autos)};
  std::deque<Frontier> queue;
  queue.push_back({0, 0, problem.init, root_autos});

  std::size_t expanded = 0;
  while (!queue.empty()) {
    Frontier node = std::move(queue.front());
    queue.pop_front();
    if (node.depth >= max_depth) continue;
    if (++expanded > node_budget) return {BfsStatus::BudgetExceeded, {}};

    for (std::size_t op_index = 0; op_index < ops.size(); ++op_index) {
      const GroundOp& op = ops[op_index];
      if (!executable(op, node.state)) continue;
      WorldState next = apply_op(op, node.state);
      if (!state_constraints_hold(problem, next)) continue;
      std::vector<std::uint32_t> autos = product.advance(node.autos, next);
      if (product.doomed(autos)) continue;
      std::string key = node_key(next, autos);
      if (!visited.insert(std::move(key)).second) continue;

      edges.push_back({node.id, static_cast<std::int32_t>(op_index)});
      std::int64_t id = static_cast<std::int64_t>(edges.size()) - 1;
      if (goal_holds(next, problem.goal) && product.all_accepting(autos))
        return {BfsStatus::Found, reconstruct(edges, id, ops)};
      queue.push_back({id, node.depth + 1, std::move(next), std::move(autos)});
    }
  }
  return {BfsStatus::Exhausted, {}};
}

// ---------------------------------------------------------------------------
// Greedy best-first search with an additive delete-relaxation heuristic.

constexpr int kInfinity = std::numeric_limits<int>::max() / 4;

class RelaxedHeuristic {
 public:
  RelaxedHeuristic(const PlanningProblem& problem,
                   const std::vector<GroundOp>& ops)
      : ops_(ops) {
    for (const GroundAtom& atom : problem.init.atoms()) index_of(atom);
    for (const GroundOp& op : ops) {
      for (const GroundAtom& atom : op.add) index_of(atom);
      for (const auto& clause : op.precond_clauses)
        for (const GroundLiteral& lit : clause)
          if (lit.positive) index_of(lit.atom);
    }
    index_goal(problem.goal);
  }

  int evaluate(const WorldState& state, const GoalNode& goal) {
    cost_.assign(universe_.size(), kInfinity);
    for (const GroundAtom& atom : state.atoms()) {
      auto it = ids_.find(atom.to_string());
      if (it != ids_.end()) cost_[it->second] = 0;
    }
    bool changed = true;
    int passes = 0;
    while (changed && passes++ < 200) {
      changed = false;
      for (const GroundOp& op : ops_) {
        int op_cost = 1;
        for (const auto& clause : op.precond_clauses) {
          int clause_cost = kInfinity;
          bool has_positive = false;
          for (const GroundLiteral& lit : clause) {
            if (!lit.positive) {
              clause_cost = 0;  // negative literals relaxed away
              has_positive = true;
              break;
            }
            has_positive = true;
            clause_cost = std::min(clause_cost, atom_cost(lit.atom));
          }
          if (!has_positive) clause_cost = 0;
          if (clause_cost >= kInfinity) {
            op_cost = kInfinity;
            break;
          }
          op_cost = std::min(op_cost + clause_cost, kInfinity);
        }
        if (op_cost >= kInfinity) continue;
        for (const GroundAtom& atom : op.add) {
          int& slot = cost_[ids_.at(atom.to_string())];
          if (op_cost < slot) {
            slot = op_cost;
            changed = true;
          }
        }
      }
    }
    return goal_cost(goal);
  }

 private:
  void index_of(const GroundAtom& atom) {
    auto [it, inserted] = ids_.emplace(atom.to_string(), universe_.size());
    if (inserted) universe_.push_back(atom);
  }

  void index_goal(const GoalNode& goal) {
    if (goal.kind == GoalNode::Kind::Literal) {
      index_of(goal.atom);
      return;
    }
    for (const GoalNode& child : goal.children) index_goal(child);
  }

  int atom_cost(const GroundAtom& atom) const {
    auto it = ids_.find(atom.to_string());
    return it == ids_.end() ? kInfinity : cost_[it->second];
  }

  int goal_cost(const GoalNode& goal) const {
    switch (goal.kind) {
      case GoalNode::Kind::Literal:
        return goal.positive ? atom_cost(goal.atom) : 0;
      case GoalNode::Kind::Not:
        return 0;
      case GoalNode::Kind::And: {
        int total = 0;
        for (const GoalNode& child : goal.children) {
          int c = goal_cost(child);
          if (c >= kInfinity) return kInfinity;
          total = std::min(total + c, kInfinity);
        }
        return total;
      }
      case GoalNode::Kind::Or: {
        int best = kInfinity;
        for (const GoalNode& child : goal.children)
          best = std::min(best, goal_cost(child));
        return best;
      }
    }
    return kInfinity;
  }

  const std::vector<GroundOp>& ops_;
  std::unordered_map<std::string, std::size_t> ids_;
  std::vector<GroundAtom> universe_;
  std::vector<int> cost_;
};

std::optional<Plan> greedy_search(const PlanningProblem& problem,
                                  const std::vector<GroundOp>& ops,
                                  const TemporalProduct& product,
                                  std::size_t max_depth,
                                  std::size_t node_budget) {
  if (!state_constraints_hold(problem, problem.init)) return std::nullopt;
  std::vector<std::uint32_t> root_autos = product.start(problem.init);
  if (product.doomed(root_autos)) return std::nullopt;
  if (goal_holds(problem.init, problem.goal) &&
      product.all_accepting(root_autos))
    return Plan{};

  RelaxedHeuristic heuristic(problem, ops);

  struct Entry {
    int h;
    std::uint64_t seq;
    std::int64_t id;
    std::size_t depth;
    WorldState state;
    std::vector<std::uint32_t> autos;
  };
  struct Worse {
    bool operator()(const Entry& a, const Entry& b) const {
      if (a.h != b.h) return a.h > b.h;
      return a.seq > b.seq;
    }
  };

  std::vector<SearchEdge> edges{{-1, -1}};
  std::unordered_set<std::string> visited{node_key(problem.init, root_autos)};
  std::priority_queue<Entry, std::vector<Entry>, Worse> open;
  std::uint64_t seq = 0;
  open.push({heuristic.evaluate(problem.init, problem.goal), seq++, 0, 0,
             problem.init, root_autos});

  std::size_t expanded = 0;
  while (!open.empty()) {
    Entry node = open.top();
    open.pop();
    if (node.depth >= max_depth) continue;
    if (++expanded > node_budget) return std::nullopt;

    for (std::size_t op_index = 0; op_index < ops.size(); ++op_index) {
      const GroundOp& op = ops[op_index];
      if (!executable(op, node.state)) continue;
      WorldState next = apply_op(op, node.state);
      if (!state_constraints_hold(problem, next)) continue;
      std::vector<std::uint32_t> autos = product.advance(node.autos, next);
      if (product.doomed(autos)) continue;
      if (!visited.insert(node_key(next, autos)).second) continue;

      edges.push_back({node.id, static_cast<std::int32_t>(op_index)});
      std::int64_t id = static_cast<std::int64_t>(edges.size()) - 1;
      if (goal_holds(next, problem.goal) && product.all_accepting(autos))
        return reconstruct(edges, id, ops);
      int h = heuristic.evaluate(next, problem.goal);
      if (h >= kInfinity) continue;  // relaxed-unreachable: dead end
      open.push({h, seq++, id, node.depth + 1, std::move(next),
                 std::move(autos)});
    }
  }
  return std::nullopt;
}

}  // namespace

std::optional<Plan> oracle_plan(const PlanningProblem& problem,
                                std::size_t max_depth,
                                const SearchLimits& limits) {
  std::vector<GroundOp> ops =
      ground_all_actions(problem, limits.grounding_bound);
  TemporalProduct product = TemporalProduct::build(problem);
  BfsOutcome outcome = bfs_search(problem, ops, product, max_depth,
                                  std::numeric_limits<std::size_t>::max());
  if (outcome.status == BfsStatus::Found) return outcome.plan;
  return std::nullopt;
}

std::optional<Plan> solve_portfolio(const PlanningProblem& problem,
                                    std::size_t max_depth,
                                    const SearchLimits& limits) {
  std::vector<GroundOp> ops =
      ground_all_actions(problem, limits.grounding_bound);
  TemporalProduct product = TemporalProduct::build(problem);
  BfsOutcome outcome =
      bfs_search(problem, ops, product, max_depth, limits.bfs_node_budget);
  if (outcome.status == BfsStatus::Found) return outcome.plan;
  if (outcome.status == BfsStatus::Exhausted) return std::nullopt;
  return greedy_search(problem, ops, product, max_depth,
                       limits.greedy_node_budget);
}

OracleBackend::OracleBackend(PlanningProblem problem, SearchLimits limits)
    : problem_(std::move(problem)), limits_(limits) {}

GenerationResult OracleBackend::generate(const std::string&,
                                         const DecodingOptions&) {
  std::lock_guard<std::mutex> lock(mutex_);
  if (!cached_text_) {
    std::optional<Plan> plan =
        solve_portfolio(problem_, kDefaultPlanCap, limits_);
    if (plan) {
      std::string text = "START-PLAN\n";
      for (std::size_t i = 0; i < plan->steps.size(); ++i)
        text += std::to_string(i + 1) + ". " + plan->steps[i].to_string() +
                "\n";
      cached_text_ = std::move(text);
    } else {
      cached_text_ = "No valid plan was found for this problem.";
    }
  }
  GenerationResult result;
  result.text = *cached_text_;
  result.backend_id = id();
  return result;
}

}  // namespace planguard
