#pragma once

#include <cstdint>
#include <stdexcept>

#include "planguard/problem.hpp"

namespace planguard {

class InvalidSize : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The generators' built-in schemas; share/domains carries the same text for
// the CLI.
Domain builtin_blocksworld_domain();
Domain builtin_navigation_domain();

// Distribution knobs for the random instances; the defaults below define
// this project's benchmark distribution.
struct GeneratorTuning {
  // Extra roads beyond the spanning tree, as a fraction of the city count.
  double nav_extra_road_fraction = 0.2;
  // Witness/goal walk lengths, as multiples of the instance size.
  std::size_t nav_walk_factor = 3;
  std::size_t bw_walk_factor = 4;
  // Constraint template mix: "all", "before", "until", or "avoid".
  std::string nav_templates = "all";
};

// Deterministic in (n_blocks, seed). Init and goal are legal configurations
// (arm empty); the goal lists the target on-atoms. Solvability is certified
// at generation time: by oracle search for n <= 7, by a random walk of legal
// moves for larger n.
PlanningProblem gen_blocksworld(std::size_t n_blocks, std::uint64_t seed,
                                const GeneratorTuning& tuning = {});

// Deterministic in (n_cities, seed). Connected two-way road graph, two goal
// cities, and one visit-ordering constraint drawn from the template family
// ("been to X and Y before Z", "not X until Y", "not visiting X") with its
// formal formula and bindings attached. Certified by a witness walk, plus
// oracle search for n <= 7.
PlanningProblem gen_navigation(std::size_t n_cities, std::uint64_t seed,
                               const GeneratorTuning& tuning = {});

}  // namespace planguard
