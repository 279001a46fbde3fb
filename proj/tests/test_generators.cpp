#include "doctest.h"
#include "planguard/generators.hpp"
#include "planguard/oracle.hpp"
#include "test_util.hpp"

using namespace planguard;

TEST_SUITE_BEGIN("generators");

TEST_CASE("builtin domains match the shipped domain files") {
  Domain bw_file = parse_domain(
      test::read_file(test::share_dir() + "/domains/blocksworld.pddl"));
  Domain bw_builtin = builtin_blocksworld_domain();
  CHECK(bw_file.name == bw_builtin.name);
  CHECK(bw_file.schemas == bw_builtin.schemas);

  Domain nav_file = parse_domain(
      test::read_file(test::share_dir() + "/domains/navigation.pddl"));
  Domain nav_builtin = builtin_navigation_domain();
  CHECK(nav_file.name == nav_builtin.name);
  CHECK(nav_file.schemas == nav_builtin.schemas);
}

TEST_CASE("gen_blocksworld is deterministic in (n, seed)") {
  PlanningProblem a = gen_blocksworld(5, 7);
  PlanningProblem b = gen_blocksworld(5, 7);
  CHECK(a == b);
  PlanningProblem c = gen_blocksworld(5, 8);
  CHECK_FALSE(a == c);
}

TEST_CASE("gen_blocksworld instances are legal and solvable") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    PlanningProblem problem = gen_blocksworld(5, seed);
    CHECK(problem.init.contains({"arm-empty", {}}));
    CHECK_FALSE(goal_holds(problem.init, problem.goal));

    // Every block sits on the table or on exactly one block.
    for (const std::string& block : problem.objects) {
      int supports = 0;
      if (problem.init.contains({"on-table", {block}})) ++supports;
      for (const std::string& other : problem.objects)
        if (problem.init.contains({"on", {block, other}})) ++supports;
      CHECK(supports == 1);
    }

    std::optional<Plan> plan = oracle_plan(problem);
    REQUIRE(plan.has_value());
    CHECK(verify_plan(problem, *plan).valid);
  }
}

TEST_CASE("gen_blocksworld walk certification covers large instances") {
  PlanningProblem problem = gen_blocksworld(9, 1);
  CHECK(problem.objects.size() == 9);
  CHECK_FALSE(goal_holds(problem.init, problem.goal));
  std::optional<Plan> plan = solve_portfolio(problem);
  REQUIRE(plan.has_value());
  CHECK(verify_plan(problem, *plan).valid);
}

TEST_CASE("gen_navigation is deterministic and certified") {
  PlanningProblem a = gen_navigation(7, 3);
  PlanningProblem b = gen_navigation(7, 3);
  CHECK(a == b);

  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    PlanningProblem problem = gen_navigation(7, seed);
    REQUIRE(problem.constraints.temporal_constraints.size() == 1);
    CHECK(problem.constraints.temporal_constraints[0].translated());
    std::optional<Plan> plan = oracle_plan(problem);
    REQUIRE(plan.has_value());
    CHECK(verify_plan(problem, *plan).valid);
  }
}

TEST_CASE("gen_navigation covers the constraint template family") {
  bool saw_before = false, saw_until = false, saw_avoid = false;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    PlanningProblem problem = gen_navigation(7, seed);
    const TemporalConstraint& c =
        problem.constraints.temporal_constraints.at(0);
    if (c.text.find("You should have been to") == 0) {
      saw_before = true;
      CHECK(to_string(c.formula).find(" U ") != std::string::npos);
      CHECK(c.bindings.size() == 3);
    } else if (c.text.find("You shouldn't go to") == 0) {
      saw_until = true;
      CHECK(c.bindings.size() == 2);
    } else if (c.text.find("not visiting ") == 0) {
      saw_avoid = true;
      REQUIRE(c.bindings.size() == 1);
      const auto& [prop, atom] = *c.bindings.begin();
      CHECK(to_string(c.formula) == "G(!" + prop + ")");
      CHECK(atom.predicate == "reached");
    }
  }
  CHECK(saw_before);
  CHECK(saw_until);
  CHECK(saw_avoid);
}

TEST_CASE("size guards") {
  CHECK_THROWS_AS(gen_blocksworld(1, 0), InvalidSize);
  CHECK_THROWS_AS(gen_navigation(2, 0), InvalidSize);
}

TEST_CASE("generator tuning forces a constraint template") {
  GeneratorTuning tuning;
  tuning.nav_templates = "avoid";
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    PlanningProblem problem = gen_navigation(8, seed, tuning);
    const TemporalConstraint& c =
        problem.constraints.temporal_constraints.at(0);
    CHECK(c.text.find("not visiting ") == 0);
  }

  GeneratorTuning denser;
  denser.nav_extra_road_fraction = 0.8;
  PlanningProblem sparse = gen_navigation(10, 4);
  PlanningProblem dense = gen_navigation(10, 4, denser);
  auto road_count = [](const PlanningProblem& p) {
    std::size_t roads = 0;
    for (const GroundAtom& atom : p.init.atoms())
      if (atom.predicate == "road") ++roads;
    return roads;
  };
  CHECK(road_count(dense) >= road_count(sparse));
}

TEST_SUITE_END();
