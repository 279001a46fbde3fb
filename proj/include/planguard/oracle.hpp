#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string>

#include "planguard/backend.hpp"
#include "planguard/problem.hpp"
#include "planguard/validator.hpp"

namespace planguard {

class GroundingExplosion : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SearchLimits {
  std::size_t grounding_bound = 200000;  // max ground action count
  // Expansion budget for the exhaustive pass; exceeded means "undecided",
  // not "no solution".
  std::size_t bfs_node_budget = std::numeric_limits<std::size_t>::max();
  std::size_t greedy_node_budget = 2000000;
};

// Breadth-first search over (world state × temporal automaton product),
// expanding executable ground actions in schema order then lexicographic
// argument order, pruning states that violate a state constraint or enter a
// rejecting automaton sink. Returns a shortest plan accepted by all checks,
// or nothing when the bounded space holds no solution. Deterministic.
// Throws GroundingExplosion past limits.grounding_bound and
// UntranslatedConstraint on temporal constraints without formulas.
std::optional<Plan> oracle_plan(const PlanningProblem& problem,
                                std::size_t max_depth = kDefaultPlanCap,
                                const SearchLimits& limits = {});

// BFS under a node budget, then greedy best-first search guided by an
// additive delete-relaxation heuristic. Plans from the greedy pass are valid
// but not necessarily shortest.
std::optional<Plan> solve_portfolio(const PlanningProblem& problem,
                                    std::size_t max_depth = kDefaultPlanCap,
                                    const SearchLimits& limits = {
                                        .bfs_node_budget = 60000});

// Backend wrapper around the portfolio solver. The solve runs once; repeated
// generate() calls replay the same completion text.
class OracleBackend : public PlannerBackend {
 public:
  explicit OracleBackend(PlanningProblem problem, SearchLimits limits = {
                             .bfs_node_budget = 60000});
  GenerationResult generate(const std::string& prompt,
                            const DecodingOptions& options = {}) override;
  std::string id() const override { return "oracle"; }

 private:
  PlanningProblem problem_;
  SearchLimits limits_;
  std::mutex mutex_;
  std::optional<std::string> cached_text_;
};

}  // namespace planguard
