#include "planguard/generators.hpp"

#include <algorithm>
#include <cctype>
#include <random>

#include "planguard/oracle.hpp"
#include "planguard/validator.hpp"

namespace planguard {

namespace {

constexpr const char* kBlocksworldDomain = R"((define (domain blocksworld-4ops)
  (:action pick-up
    :parameters (?b)
    :precondition (and (clear ?b) (on-table ?b) (arm-empty))
    :effect (and (holding ?b)
                 (not (on-table ?b)) (not (clear ?b)) (not (arm-empty))))
  (:action put-down
    :parameters (?b)
    :precondition (and (holding ?b))
    :effect (and (on-table ?b) (clear ?b) (arm-empty)
                 (not (holding ?b))))
  (:action stack
    :parameters (?b ?target)
    :precondition (and (holding ?b) (clear ?target))
    :effect (and (on ?b ?target) (clear ?b) (arm-empty)
                 (not (holding ?b)) (not (clear ?target))))
  (:action unstack
    :parameters (?b ?from)
    :precondition (and (on ?b ?from) (clear ?b) (arm-empty))
    :effect (and (holding ?b) (clear ?from)
                 (not (on ?b ?from)) (not (clear ?b)) (not (arm-empty)))))
)";

constexpr const char* kNavigationDomain = R"((define (domain navigation)
  (:action drive
    :parameters (?from ?to)
    :precondition (and (at ?from)
                       (or (road ?from ?to) (road ?to ?from)))
    :effect (and (at ?to) (reached ?to)
                 (not (at ?from)))))
)";

std::uint64_t mix_seed(std::size_t n, std::uint64_t seed) {
  // splitmix64 over the (size, seed) pair.
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (n + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// A legal blocks configuration as support[i] = index of the block under
// block i, or -1 for the table.
struct BlocksConfig {
  std::vector<int> support;

  bool operator==(const BlocksConfig&) const = default;

  std::vector<GroundAtom> on_atoms(
      const std::vector<std::string>& names) const {
    std::vector<GroundAtom> atoms;
    for (std::size_t i = 0; i < support.size(); ++i)
      if (support[i] >= 0)
        atoms.push_back({"on", {names[i], names[support[i]]}});
    return atoms;
  }

  std::vector<GroundAtom> full_atoms(
      const std::vector<std::string>& names) const {
    std::vector<GroundAtom> atoms{{"arm-empty", {}}};
    std::vector<bool> covered(support.size(), false);
    for (std::size_t i = 0; i < support.size(); ++i) {
      if (support[i] >= 0) {
        atoms.push_back({"on", {names[i], names[support[i]]}});
        covered[support[i]] = true;
      } else {
        atoms.push_back({"on-table", {names[i]}});
      }
    }
    for (std::size_t i = 0; i < support.size(); ++i)
      if (!covered[i]) atoms.push_back({"clear", {names[i]}});
    return atoms;
  }
};

BlocksConfig random_config(std::size_t n, std::mt19937_64& rng) {
  BlocksConfig config;
  config.support.assign(n, -1);
  std::vector<int> clear;  // blocks currently on top of a tower
  for (std::size_t i = 0; i < n; ++i) {
    // Place block i on the table or on any currently clear block.
    std::uniform_int_distribution<std::size_t> pick(0, clear.size());
    std::size_t choice = pick(rng);
    if (choice == clear.size()) {
      config.support[i] = -1;
    } else {
      config.support[i] = clear[choice];
      clear.erase(clear.begin() + choice);
    }
    clear.push_back(static_cast<int>(i));
  }
  return config;
}

GroundAction pick_random(const std::vector<GroundAction>& actions,
                         std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, actions.size() - 1);
  return actions[pick(rng)];
}

// Executable ground actions of `problem` in `state`, deterministic order.
std::vector<GroundAction> executable_actions(const PlanningProblem& problem,
                                             const WorldState& state) {
  std::vector<GroundAction> out;
  std::vector<std::string> objects = problem.objects;
  std::sort(objects.begin(), objects.end());
  for (const ActionSchema& schema : problem.schemas) {
    std::vector<std::vector<std::string>> tuples{{}};
    for (std::size_t p = 0; p < schema.arity(); ++p) {
      std::vector<std::vector<std::string>> next;
      for (const auto& tuple : tuples)
        for (const auto& obj : objects) {
          auto extended = tuple;
          extended.push_back(obj);
          next.push_back(std::move(extended));
        }
      tuples = std::move(next);
    }
    for (auto& tuple : tuples) {
      GroundAction action{schema.name, tuple};
      if (std::holds_alternative<WorldState>(
              apply_action(state, action, problem)))
        out.push_back(std::move(action));
    }
  }
  return out;
}

}  // namespace

Domain builtin_blocksworld_domain() {
  return parse_domain(kBlocksworldDomain);
}

Domain builtin_navigation_domain() { return parse_domain(kNavigationDomain); }

PlanningProblem gen_blocksworld(std::size_t n_blocks, std::uint64_t seed,
                                const GeneratorTuning& tuning) {
  if (n_blocks < 2) throw InvalidSize("blocksworld needs at least 2 blocks");
  std::mt19937_64 rng(mix_seed(n_blocks, seed));

  std::vector<std::string> names;
  for (std::size_t i = 1; i <= n_blocks; ++i)
    names.push_back("b" + std::to_string(i));

  PlanningProblem problem;
  problem.name = "bw-" + std::to_string(n_blocks) + "-" +
                 std::to_string(seed);
  problem.objects = names;
  attach_domain(problem, builtin_blocksworld_domain());

  BlocksConfig init = random_config(n_blocks, rng);
  problem.init = WorldState(init.full_atoms(names));

  auto satisfied_at_init = [&](const std::vector<GroundAtom>& atoms) {
    return std::all_of(atoms.begin(), atoms.end(), [&](const GroundAtom& a) {
      return problem.init.contains(a);
    });
  };

  std::vector<GroundAtom> goal_atoms;
  if (n_blocks <= 7) {
    // Independent target configuration, certified by the oracle.
    for (int tries = 0; tries < 64; ++tries) {
      BlocksConfig target = random_config(n_blocks, rng);
      goal_atoms = target.on_atoms(names);
      if (!goal_atoms.empty() && !satisfied_at_init(goal_atoms)) break;
      goal_atoms.clear();
    }
  } else {
    // Random walk of legal moves; its end configuration is reachable by
    // construction.
    for (int tries = 0; tries < 64 && goal_atoms.empty(); ++tries) {
      WorldState state = problem.init;
      const std::size_t walk_length = tuning.bw_walk_factor * n_blocks;
      for (std::size_t step = 0; step < walk_length; ++step) {
        std::vector<GroundAction> actions = executable_actions(problem, state);
        state = std::get<WorldState>(
            apply_action(state, pick_random(actions, rng), problem));
      }
      if (!state.contains({"arm-empty", {}})) {
        // End with the arm empty so the goal is a legal configuration.
        for (const GroundAtom& atom : state.atoms()) {
          if (atom.predicate == "holding") {
            state = std::get<WorldState>(apply_action(
                state, {"put-down", {atom.args[0]}}, problem));
            break;
          }
        }
      }
      std::vector<GroundAtom> candidate;
      for (const GroundAtom& atom : state.atoms())
        if (atom.predicate == "on") candidate.push_back(atom);
      if (!candidate.empty() &&
          !goal_holds(problem.init, GoalNode::conj([&] {
            std::vector<GoalNode> lits;
            for (const GroundAtom& atom : candidate)
              lits.push_back(GoalNode::literal(atom));
            return lits;
          }())))
        goal_atoms = candidate;
    }
  }
  if (goal_atoms.empty())
    throw std::runtime_error("blocksworld generation failed to find a goal");

  std::sort(goal_atoms.begin(), goal_atoms.end());
  std::vector<GoalNode> literals;
  for (const GroundAtom& atom : goal_atoms)
    literals.push_back(GoalNode::literal(atom));
  problem.goal = GoalNode::conj(std::move(literals));

  if (n_blocks <= 7) {
    std::optional<Plan> certificate = oracle_plan(problem);
    if (!certificate || !verify_plan(problem, *certificate).valid)
      throw std::runtime_error("blocksworld oracle certification failed: " +
                               problem.name);
  }
  return problem;
}

PlanningProblem gen_navigation(std::size_t n_cities, std::uint64_t seed,
                               const GeneratorTuning& tuning) {
  if (n_cities < 3) throw InvalidSize("navigation needs at least 3 cities");
  if (n_cities > 26)
    throw InvalidSize("navigation supports at most 26 cities");
  std::mt19937_64 rng(mix_seed(n_cities, seed));

  std::vector<std::string> cities;
  for (std::size_t i = 0; i < n_cities; ++i)
    cities.push_back(std::string(1, static_cast<char>('A' + i)));

  PlanningProblem problem;
  problem.name = "nav-" + std::to_string(n_cities) + "-" +
                 std::to_string(seed);
  problem.objects = cities;
  problem.objects_keyword_cities = true;
  attach_domain(problem, builtin_navigation_domain());

  // Connected graph: a random spanning tree plus a few extra roads.
  std::vector<std::pair<std::size_t, std::size_t>> roads;
  auto has_road = [&](std::size_t a, std::size_t b) {
    for (auto [x, y] : roads)
      if ((x == a && y == b) || (x == b && y == a)) return true;
    return false;
  };
  for (std::size_t i = 1; i < n_cities; ++i) {
    std::uniform_int_distribution<std::size_t> pick(0, i - 1);
    roads.emplace_back(pick(rng), i);
  }
  std::size_t extras = std::max<std::size_t>(
      1, static_cast<std::size_t>(tuning.nav_extra_road_fraction *
                                  static_cast<double>(n_cities)));
  for (std::size_t e = 0; e < extras; ++e) {
    std::uniform_int_distribution<std::size_t> pick(0, n_cities - 1);
    std::size_t a = pick(rng), b = pick(rng);
    if (a != b && !has_road(a, b)) roads.emplace_back(a, b);
  }

  std::uniform_int_distribution<std::size_t> pick_city(0, n_cities - 1);
  const std::size_t start = pick_city(rng);

  std::vector<GroundAtom> init_atoms;
  for (auto [a, b] : roads)
    init_atoms.push_back({"road", {cities[a], cities[b]}});
  init_atoms.push_back({"reached", {cities[start]}});
  init_atoms.push_back({"at", {cities[start]}});
  problem.init = WorldState(init_atoms);

  // Witness walk from the start; goals and the constraint are instantiated
  // so the walk itself is a valid plan.
  std::vector<std::vector<std::size_t>> adjacency(n_cities);
  for (auto [a, b] : roads) {
    adjacency[a].push_back(b);
    adjacency[b].push_back(a);
  }

  for (int attempt = 0; attempt < 64; ++attempt) {
    std::vector<std::size_t> walk{start};
    std::vector<std::size_t> first_visit_order{start};
    std::vector<bool> visited(n_cities, false);
    visited[start] = true;
    std::size_t at = start;
    const std::size_t walk_length = tuning.nav_walk_factor * n_cities;
    for (std::size_t step = 0; step < walk_length; ++step) {
      const auto& next_options = adjacency[at];
      std::uniform_int_distribution<std::size_t> pick(0,
                                                      next_options.size() - 1);
      at = next_options[pick(rng)];
      walk.push_back(at);
      if (!visited[at]) {
        visited[at] = true;
        first_visit_order.push_back(at);
      }
    }
    if (first_visit_order.size() < 4) continue;  // too little coverage

    // Two goal cities among the later first-visits.
    std::size_t goal_a = first_visit_order[first_visit_order.size() - 1];
    std::size_t goal_b = first_visit_order[first_visit_order.size() - 2];

    TemporalConstraint constraint;
    auto prop_of = [&](std::size_t city) {
      std::string p = cities[city];
      p[0] = static_cast<char>(std::tolower(p[0]));
      return p;
    };

    std::vector<std::size_t> unvisited;
    for (std::size_t c = 0; c < n_cities; ++c)
      if (!visited[c]) unvisited.push_back(c);

    std::uniform_int_distribution<int> pick_template(0, 2);
    int tmpl = pick_template(rng);
    if (tuning.nav_templates == "before") tmpl = 0;
    else if (tuning.nav_templates == "until") tmpl = 1;
    else if (tuning.nav_templates == "avoid") tmpl = 2;
    if (tmpl == 2 && unvisited.empty()) {
      if (tuning.nav_templates == "avoid") continue;
      tmpl = 0;
    }

    if (tmpl == 0) {
      // Visit X and Y before the first goal city.
      std::size_t z = goal_a;
      std::vector<std::size_t> earlier;
      for (std::size_t c : first_visit_order) {
        if (c == z) break;
        if (c != start) earlier.push_back(c);
      }
      if (earlier.size() < 2) continue;
      std::size_t x = earlier[0];
      std::size_t y = earlier[earlier.size() - 1];
      if (x == y) continue;
      constraint.text = "You should have been to " + cities[x] + " and " +
                        cities[y] + " before you go to " + cities[z];
      constraint.formula =
          parse_ltl("!" + prop_of(z) + " U (" + prop_of(x) + " & " +
                    prop_of(y) + ")");
      constraint.bindings = {{prop_of(x), {"reached", {cities[x]}}},
                             {prop_of(y), {"reached", {cities[y]}}},
                             {prop_of(z), {"reached", {cities[z]}}}};
    } else if (tmpl == 1) {
      // Don't visit X until Y was visited: Y first-visited before X.
      std::vector<std::size_t> late;
      for (std::size_t i = 2; i < first_visit_order.size(); ++i)
        late.push_back(first_visit_order[i]);
      if (late.empty()) continue;
      std::size_t x = late[late.size() - 1];
      std::size_t y = first_visit_order[1];
      if (x == y || x == start || y == start) continue;
      constraint.text = "You shouldn't go to " + cities[x] +
                        " until you go to " + cities[y] + " before";
      constraint.formula = parse_ltl("!" + prop_of(x) + " U " + prop_of(y));
      constraint.bindings = {{prop_of(x), {"reached", {cities[x]}}},
                             {prop_of(y), {"reached", {cities[y]}}}};
    } else {
      std::uniform_int_distribution<std::size_t> pick(0, unvisited.size() - 1);
      std::size_t x = unvisited[pick(rng)];
      constraint.text = "not visiting " + cities[x];
      constraint.formula = parse_ltl("G(!" + prop_of(x) + ")");
      constraint.bindings = {{prop_of(x), {"reached", {cities[x]}}}};
    }

    problem.goal =
        GoalNode::conj({GoalNode::literal({"reached", {cities[goal_a]}}),
                        GoalNode::literal({"reached", {cities[goal_b]}})});
    problem.constraints.temporal_constraints = {constraint};

    // The walk is the certificate.
    Plan witness;
    for (std::size_t i = 0; i + 1 < walk.size(); ++i)
      witness.steps.push_back(
          {"drive", {cities[walk[i]], cities[walk[i + 1]]}});
    if (!verify_plan(problem, witness).valid) continue;

    if (n_cities <= 7) {
      std::optional<Plan> certificate = oracle_plan(problem);
      if (!certificate || !verify_plan(problem, *certificate).valid)
        throw std::runtime_error("navigation oracle certification failed: " +
                                 problem.name);
    }
    return problem;
  }
  throw std::runtime_error("navigation generation failed for " +
                           problem.name);
}

}  // namespace planguard
