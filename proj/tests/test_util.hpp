#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "planguard/problem.hpp"

#ifndef PLANGUARD_SHARE_DIR
#error "PLANGUARD_SHARE_DIR must point at the repository share/ directory"
#endif

namespace planguard::test {

inline std::string share_dir() { return PLANGUARD_SHARE_DIR; }

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

inline PlanningProblem load_problem(const std::string& problem_file,
                                    const std::string& domain_file) {
  PlanningProblem problem =
      parse_problem(read_file(share_dir() + "/problems/" + problem_file));
  Domain domain =
      parse_domain(read_file(share_dir() + "/domains/" + domain_file));
  attach_domain(problem, domain);
  return problem;
}

inline PlanningProblem load_bw_rand_6() {
  return load_problem("bw-rand-6.pddl", "blocksworld.pddl");
}

// driver-1 with the temporal constraint left untranslated.
inline PlanningProblem load_driver_1_raw() {
  return load_problem("driver-1.pddl", "navigation.pddl");
}

// driver-1 with G(!g U (c & d)) and its bindings attached.
inline PlanningProblem load_driver_1() {
  PlanningProblem problem = load_driver_1_raw();
  TemporalConstraint& constraint =
      problem.constraints.temporal_constraints.at(0);
  constraint.formula = parse_ltl("G(!g U (c & d))");
  constraint.bindings = {
      {"c", {"reached", {"C"}}},
      {"d", {"reached", {"D"}}},
      {"g", {"reached", {"G"}}},
  };
  return problem;
}

}  // namespace planguard::test
