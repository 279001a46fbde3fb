// Acceptance suite: runs every release criterion at its stated tolerance and
// prints one PASS/FAIL line per criterion. Exit code 0 iff all pass.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <vector>

#include "planguard/benchmark.hpp"
#include "planguard/generators.hpp"
#include "planguard/oracle.hpp"

using namespace planguard;
using Clock = std::chrono::steady_clock;

namespace {

#ifndef PLANGUARD_SHARE_DIR
#error "PLANGUARD_SHARE_DIR must be defined"
#endif

const std::string kShare = PLANGUARD_SHARE_DIR;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

struct Criterion {
  int number;
  std::string name;
  std::function<void(std::string& detail)> run;  // throws on failure
};

struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool condition, const std::string& message) {
  if (!condition) throw Failure(message);
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// --- shared fixtures --------------------------------------------------------

PlanningProblem load_bw() {
  PlanningProblem problem =
      parse_problem(read_file(kShare + "/problems/bw-rand-6.pddl"));
  attach_domain(problem,
                parse_domain(read_file(kShare + "/domains/blocksworld.pddl")));
  return problem;
}

PlanningProblem load_driver(bool with_formula = true) {
  PlanningProblem problem =
      parse_problem(read_file(kShare + "/problems/driver-1.pddl"));
  attach_domain(problem,
                parse_domain(read_file(kShare + "/domains/navigation.pddl")));
  if (with_formula) {
    TemporalConstraint& c = problem.constraints.temporal_constraints.at(0);
    c.formula = parse_ltl("G(!g U (c & d))");
    c.bindings = {{"c", {"reached", {"C"}}},
                  {"d", {"reached", {"D"}}},
                  {"g", {"reached", {"G"}}}};
  }
  return problem;
}

const char* kBwSecondOutput =
    "1. pick-up b5\n2. stack b5 b3\n3. unstack b1 b6\n4. pick-up b6\n"
    "5. stack b6 b4\n6. unstack b2 b3\n7. stack b2 b1";
const char* kBwThirdOutput =
    "1. unstack b4 b1\n2. put-down b4\n3. unstack b1 b6\n4. put-down b1\n"
    "5. pick-up b6\n6. stack b6 b4\n7. unstack b2 b3\n8. put-down b2\n"
    "9. pick-up b5\n10. stack b5 b3\n11. pick-up b1\n12. stack b1 b2";
const char* kNavSecondOutput = "A -> B\nB -> C\nC -> B\nB -> F\nF -> G";
const char* kNavThirdOutput =
    "A -> B\nB -> C\nC -> B\nB -> A\nA -> E\nE -> D\nD -> E\nE -> A\n"
    "A -> B\nB -> F\nF -> G";

// The regression corpus of criterion 3/4: >= 20 formulas over <= 3 props.
const char* kCorpus[] = {
    "G(!g U (c & d))", "!g U (c & d)", "!b U a",      "G(!a)",
    "a",               "!a",           "X a",         "X(X a)",
    "X(G a)",          "G(X a)",       "F a",         "G a",
    "F(G a)",          "G(F a)",       "a U b",       "a U (b U c)",
    "(a U b) U c",     "G(a -> X b)",  "F(a & X b)",  "(F a) -> (F b)",
    "a -> (b U a)",    "G(a | b) & F c", "!(F(a & b))",
    "(a | b) U (c & !a)", "X true",    "G(a) | X(G a)",
};

std::vector<Valuation> alphabet_of(const std::vector<std::string>& props) {
  std::vector<Valuation> letters;
  for (std::size_t mask = 0; mask < (std::size_t{1} << props.size()); ++mask) {
    std::vector<std::string> on;
    for (std::size_t i = 0; i < props.size(); ++i)
      if (mask & (std::size_t{1} << i)) on.push_back(props[i]);
    letters.push_back(Valuation(std::move(on)));
  }
  return letters;
}

void for_each_trace(const std::vector<Valuation>& alphabet,
                    std::size_t max_len,
                    const std::function<void(const std::vector<Valuation>&)>&
                        visit) {
  std::vector<Valuation> trace;
  std::function<void()> recurse = [&]() {
    if (!trace.empty()) visit(trace);
    if (trace.size() == max_len) return;
    for (const Valuation& v : alphabet) {
      trace.push_back(v);
      recurse();
      trace.pop_back();
    }
  };
  recurse();
}

// Plan validity without the automaton path: simulation + direct finite-trace
// evaluation + goal test.
bool valid_by_direct_evaluation(const PlanningProblem& problem,
                                const Plan& plan) {
  SimulationResult sim = simulate(problem, plan);
  if (!sim.complete()) return false;
  for (const WorldState& state : sim.trace.states)
    for (const StateConstraint& c : problem.constraints.state_constraints)
      if (!goal_holds(state, c.formula)) return false;
  for (const TemporalConstraint& c : problem.constraints.temporal_constraints)
    if (!evaluate_trace(c.formula, trace_valuations(sim.trace, c.bindings)))
      return false;
  return goal_holds(sim.trace.states.back(), problem.goal);
}

// Exhaustive depth-by-depth enumeration: is there any valid plan shorter
// than `length`?
bool shorter_plan_exists(const PlanningProblem& problem, std::size_t length) {
  std::vector<GroundAction> actions;
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
          next.push_back(extended);
        }
      tuples = std::move(next);
    }
    for (auto& tuple : tuples) actions.push_back({schema.name, tuple});
  }

  Plan candidate;
  std::function<bool(const WorldState&, std::size_t)> dfs =
      [&](const WorldState& state, std::size_t remaining) -> bool {
    if (valid_by_direct_evaluation(problem, candidate)) return true;
    if (remaining == 0) return false;
    for (const GroundAction& action : actions) {
      ApplyResult next = apply_action(state, action, problem);
      if (std::holds_alternative<PreconditionFailure>(next)) continue;
      candidate.steps.push_back(action);
      if (dfs(std::get<WorldState>(next), remaining - 1)) return true;
      candidate.steps.pop_back();
    }
    return false;
  };
  for (std::size_t depth = 0; depth < length; ++depth) {
    candidate.steps.clear();
    if (dfs(problem.init, depth)) return true;
  }
  return false;
}

std::string fmt_seconds(double s) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.2fs", s);
  return buffer;
}

// --- criteria ---------------------------------------------------------------

void criterion1(std::string& detail) {
  auto start = Clock::now();
  PlanningProblem bw = load_bw();

  Plan bad = parse_plan_text(kBwSecondOutput, bw);
  require(bad.size() == 7, "2nd output must parse to 7 steps");
  Verdict verdict = verify_plan(bw, bad);
  require(!verdict.valid, "2nd output must be rejected");
  require(verdict.kind == ViolationKind::Precondition,
          "rejection must be a precondition violation");
  require(verdict.step == 2, "violation must be at step 2");
  require(verdict.constraint_text == "stack",
          "violated schema must be stack");
  require(reasoning_text(verdict, bad, bw) ==
              "1. pick-up b5\n2. stack b5 b3\nis invalid.\n"
              "Step 2 violates the precondition of the action stack.",
          "reasoning text must match the reference prompt byte for byte");

  Plan good = parse_plan_text(kBwThirdOutput, bw);
  require(good.size() == 12, "3rd output must parse to 12 steps");
  require(verify_plan(bw, good).valid, "3rd output must be accepted");

  double elapsed = seconds_since(start);
  require(elapsed < 1.0, "must finish within 1 s");
  detail = "runtime " + fmt_seconds(elapsed);
}

void criterion2(std::string& detail) {
  auto start = Clock::now();
  PlanningProblem driver = load_driver();

  Plan bad = parse_plan_text(kNavSecondOutput, driver);
  require(bad.size() == 5, "2nd output must parse to 5 steps");
  Verdict verdict = verify_plan(driver, bad);
  require(!verdict.valid, "5-step plan must be rejected");
  require(verdict.kind == ViolationKind::Temporal,
          "rejection must be temporal");
  require(verdict.constraint_text ==
              "You should have been to C and D before you go to G",
          "constraint identity must be the reference sentence");

  Plan good = parse_plan_text(kNavThirdOutput, driver);
  require(good.size() == 11, "3rd output must parse to 11 steps");
  require(verify_plan(driver, good).valid, "11-step plan must be accepted");

  double elapsed = seconds_since(start);
  require(elapsed < 1.0, "must finish within 1 s");
  detail = "runtime " + fmt_seconds(elapsed);
}

void criterion3(std::string& detail) {
  auto start = Clock::now();
  std::size_t formulas = 0, traces = 0;
  for (const char* text : kCorpus) {
    LtlPtr f = parse_ltl(text);
    LtlAutomaton automaton = compile_automaton(f);
    std::vector<std::string> props = propositions(f);
    if (props.empty()) props = {"a"};
    require(props.size() <= 3, "corpus formulas stay within 3 propositions");
    std::vector<Valuation> alphabet = alphabet_of(props);
    ++formulas;
    for_each_trace(alphabet, 6, [&](const std::vector<Valuation>& t) {
      ++traces;
      std::span<const Valuation> steps(t);
      if (evaluate_trace(f, steps) != run_automaton(automaton, steps).accepted)
        throw Failure(std::string("automaton/evaluation mismatch for ") +
                      text);
    });
  }
  double elapsed = seconds_since(start);
  require(formulas >= 20, "corpus must contain at least 20 formulas");
  require(elapsed < 60.0, "must finish within 60 s");
  detail = std::to_string(formulas) + " formulas, " + std::to_string(traces) +
           " traces, runtime " + fmt_seconds(elapsed);
}

void criterion4(std::string& detail) {
  auto start = Clock::now();
  std::size_t checks = 0;
  for (const char* text : kCorpus) {
    LtlPtr f = parse_ltl(text);
    std::vector<std::string> props = propositions(f);
    if (props.empty()) props = {"a"};
    std::vector<Valuation> alphabet = alphabet_of(props);
    for (const Valuation& v : alphabet) {
      LtlPtr residual = progress(f, v);
      for_each_trace(alphabet, 5, [&](const std::vector<Valuation>& t) {
        ++checks;
        std::vector<Valuation> full;
        full.reserve(t.size() + 1);
        full.push_back(v);
        full.insert(full.end(), t.begin(), t.end());
        if (evaluate_trace(f, std::span<const Valuation>(full)) !=
            evaluate_trace(residual, std::span<const Valuation>(t)))
          throw Failure(std::string("progression mismatch for ") + text +
                        " under " + v.to_string());
      });
    }
  }
  double elapsed = seconds_since(start);
  detail = std::to_string(checks) + " checks, zero mismatches, runtime " +
           fmt_seconds(elapsed);
}

void criterion5(std::string& detail) {
  auto start = Clock::now();
  std::size_t solved = 0, minimality_checked = 0;

  struct Slice {
    BenchDomain domain;
    std::size_t size;
    std::size_t count;
  };
  const Slice slices[] = {
      {BenchDomain::Blocksworld, 3, 8}, {BenchDomain::Blocksworld, 4, 8},
      {BenchDomain::Blocksworld, 5, 9}, {BenchDomain::Navigation, 5, 8},
      {BenchDomain::Navigation, 6, 8},  {BenchDomain::Navigation, 7, 9},
  };

  for (const Slice& slice : slices) {
    for (std::size_t i = 0; i < slice.count; ++i) {
      PlanningProblem problem =
          slice.domain == BenchDomain::Blocksworld
              ? gen_blocksworld(slice.size, 500 + i)
              : gen_navigation(slice.size, 500 + i);
      std::optional<Plan> plan = oracle_plan(problem);
      require(plan.has_value(),
              "oracle must solve " + problem.name);
      require(verify_plan(problem, *plan).valid,
              "oracle plan must verify for " + problem.name);
      ++solved;

      const bool enumerable =
          (slice.domain == BenchDomain::Blocksworld && slice.size <= 4) ||
          (slice.domain == BenchDomain::Navigation && slice.size <= 5);
      if (enumerable) {
        require(!shorter_plan_exists(problem, plan->size()),
                "oracle plan must be shortest for " + problem.name);
        ++minimality_checked;
      }
    }
  }

  double elapsed = seconds_since(start);
  require(solved == 50, "exactly 50 instances are exercised");
  require(elapsed < 300.0, "must finish within 5 min");
  detail = "50 instances solved and verified, " +
           std::to_string(minimality_checked) +
           " checked shortest by enumeration, runtime " + fmt_seconds(elapsed);
}

PromptTemplates acceptance_templates() {
  return PromptTemplates::load(kShare + "/prompts");
}

void criterion6(std::string& detail) {
  PromptTemplates templates = acceptance_templates();
  DomainPrompts bw_prompts = DomainPrompts::load(kShare +
                                                 "/prompts/blocksworld");
  DomainPrompts nav_prompts = DomainPrompts::load(kShare +
                                                  "/prompts/navigation");

  {
    PlanningProblem bw = load_bw();
    ScriptedBackend backend =
        scripted_generate({kBwSecondOutput, kBwThirdOutput});
    LoopOutcome outcome =
        plan_with_verification(bw, backend, templates, bw_prompts);
    require(outcome.success && outcome.iterations_used == 2,
            "blocksworld script must succeed at iteration 2");
    require(outcome.history.at(0).verdict &&
                outcome.history[0].verdict->kind ==
                    ViolationKind::Precondition &&
                outcome.history[0].verdict->step == 2,
            "intermediate verdict must be Invalid(Precondition, step 2)");
  }
  {
    PlanningProblem driver = load_driver();
    ScriptedBackend backend =
        scripted_generate({kNavSecondOutput, kNavThirdOutput});
    LoopOutcome outcome =
        plan_with_verification(driver, backend, templates, nav_prompts);
    require(outcome.success && outcome.iterations_used == 2,
            "navigation script must succeed at iteration 2");
    require(outcome.history.at(0).verdict &&
                outcome.history[0].verdict->kind == ViolationKind::Temporal,
            "intermediate verdict must be Invalid(Temporal)");
  }
  {
    PlanningProblem bw = load_bw();
    ScriptedBackend backend = scripted_generate({kBwSecondOutput});
    LoopOutcome outcome =
        plan_with_verification(bw, backend, templates, bw_prompts);
    require(!outcome.success && outcome.iterations_used == 20 &&
                outcome.history.size() == 20,
            "always-invalid script must fail after exactly 20 iterations");
  }
  detail = "both worked loops succeed at iteration 2; limit exhaustion at 20";
}

void criterion7(std::string& detail) {
  PromptTemplates templates = acceptance_templates();
  DomainPrompts nav_prompts =
      DomainPrompts::load(kShare + "/prompts/navigation");

  PlanningProblem diamond = parse_problem(R"((define (problem diamond)
(:cities A B C D)
(:init
(road A B) (road B C) (road A C) (road C D)
(reached A) (at A))
(:goal (and (reached C) (reached D)))))");
  attach_domain(diamond,
                parse_domain(read_file(kShare + "/domains/navigation.pddl")));

  std::vector<HierEvent> events;
  HierOptions options;
  options.iteration_limit = 1;
  options.failure_limit = 3;
  options.events = [&events](const HierEvent& e) { events.push_back(e); };

  // (a) rollback exactly at t = 3, restoring the pushed start point
  {
    ScriptedBackend backend = scripted_generate({
        "1. A -> B\n2. B -> C", "garbage", "garbage", "garbage",
        "1. A -> C", "1. C -> D"});
    HierOutcome outcome =
        hierarchical_plan(diamond, diamond.goal, diamond.init, 3, backend,
                          templates, nav_prompts, options);
    require(outcome.success && outcome.rollbacks == 1,
            "(a) scenario must succeed with exactly one rollback");
    std::size_t failures = 0, pushes = 0, rollbacks = 0;
    HierEvent push_event, rollback_event;
    for (const HierEvent& e : events) {
      if (e.kind == HierEvent::Kind::SubtaskFailed) {
        ++failures;
        require(e.counter == failures, "(a) counter must march 1,2,3");
      }
      if (e.kind == HierEvent::Kind::Push && pushes++ == 0) push_event = e;
      if (e.kind == HierEvent::Kind::Rollback && rollbacks++ == 0)
        rollback_event = e;
    }
    require(failures == 3, "(a) exactly three failures before rollback");
    require(rollbacks == 1, "(a) exactly one rollback");
    require(rollback_event.k == push_event.k &&
                rollback_event.state == push_event.state &&
                rollback_event.partial_plan == push_event.partial_plan,
            "(a) rollback must restore the pushed (k, state, partial plan)");
  }

  // (b) empty stack: failure after t attempts on the first sub-goal
  {
    events.clear();
    ScriptedBackend backend = scripted_generate({"garbage"});
    HierOutcome outcome =
        hierarchical_plan(diamond, diamond.goal, diamond.init, 3, backend,
                          templates, nav_prompts, options);
    require(!outcome.success && outcome.subtasks_attempted == 3,
            "(b) must fail after exactly t attempts");
    bool saw_empty_stack = false;
    for (const HierEvent& e : events)
      if (e.kind == HierEvent::Kind::EmptyStackFailure) saw_empty_stack = true;
    require(saw_empty_stack, "(b) empty-stack failure event must fire");
  }

  // (c) counter resets on success
  {
    events.clear();
    ScriptedBackend backend = scripted_generate({
        "garbage", "1. A -> C", "1. C -> D"});
    HierOutcome outcome =
        hierarchical_plan(diamond, diamond.goal, diamond.init, 3, backend,
                          templates, nav_prompts, options);
    require(outcome.success, "(c) scenario must succeed");
    bool saw_failure = false;
    for (const HierEvent& e : events) {
      if (e.kind == HierEvent::Kind::SubtaskFailed) saw_failure = true;
      if (e.kind == HierEvent::Kind::SubtaskSucceeded)
        require(e.counter == 0, "(c) success must reset the counter to 0");
    }
    require(saw_failure, "(c) scenario must include a failure first");
  }

  // (d) single sub-goal degenerates to the plain loop
  {
    PlanningProblem single = diamond;
    single.goal = GoalNode::literal({"reached", {"C"}});
    HierOptions quiet = options;
    quiet.events = {};

    ScriptedBackend hier_backend = scripted_generate({"1. A -> B\n2. B -> C"});
    HierOutcome hier =
        hierarchical_plan(single, single.goal, single.init, 3, hier_backend,
                          templates, nav_prompts, quiet);

    ScriptedBackend loop_backend = scripted_generate({"1. A -> B\n2. B -> C"});
    LoopOptions loop_options;
    loop_options.iteration_limit = 1;
    LoopOutcome loop = plan_with_verification(single, loop_backend, templates,
                                              nav_prompts, loop_options);
    require(hier.success && loop.success && hier.plan == *loop.plan,
            "(d) single sub-goal must produce the plain loop's plan");
  }
  detail = "rollback restore, empty-stack failure, counter reset, degenerate "
           "case all hold";
}

RunReport bench_sweep(BenchDomain domain, std::vector<std::size_t> sizes,
                      BenchMode mode, const std::string& backend,
                      std::uint64_t seed) {
  BenchConfig config;
  config.domain = domain;
  config.sizes = std::move(sizes);
  config.instances_per_size = 10;
  config.seed = seed;
  config.backend = backend;
  config.mode = mode;
  config.prompts_dir = kShare + "/prompts";
  config.jobs = 2;
  return run_benchmark(config);
}

// Criterion 8 checks every reported success against an independently
// constructed problem + validator, from the report alone.
void reverify_report(const RunReport& report, BenchDomain domain,
                     std::uint64_t seed) {
  for (const InstanceRecord& record : report.records) {
    if (!record.success) continue;
    std::size_t index = 0;
    {
      auto dash = record.id.rfind('-');
      index = std::stoul(record.id.substr(dash + 1));
    }
    PlanningProblem fresh = bench_instance(domain, record.size, seed, index);
    Plan plan = parse_plan_text(record.plan_text, fresh);
    require(verify_plan(fresh, plan).valid,
            "reported success must re-verify: " + record.id);
  }
}

RunReport g_bw_sweep, g_nav_sweep;
double g_sweep_seconds = 0.0;

void criterion9(std::string& detail) {
  auto start = Clock::now();
  g_bw_sweep = bench_sweep(BenchDomain::Blocksworld, {5, 7, 9, 11, 13},
                           BenchMode::SafePilot, "oracle", 2025);
  g_nav_sweep = bench_sweep(BenchDomain::Navigation, {7, 9, 11, 13, 15},
                            BenchMode::SafePilot, "oracle", 2025);
  g_sweep_seconds = seconds_since(start);

  require(g_bw_sweep.records.size() == 50 && g_nav_sweep.records.size() == 50,
          "each sweep must run 50 instances");
  require(g_bw_sweep.successes() == 50,
          "blocksworld sweep must succeed 50/50");
  require(g_nav_sweep.successes() == 50,
          "navigation sweep must succeed 50/50");
  require(g_sweep_seconds < 600.0, "sweeps must finish within 10 min");
  detail = "oracle sweeps 100/100 (live-LLM success rates are "
           "environment-dependent and not asserted); runtime " +
           fmt_seconds(g_sweep_seconds);
}

void criterion8(std::string& detail) {
  // The sweeps of criterion 9 are this run's benchmark corpus; every reported
  // success must re-verify under a fresh validator. A scripted run is
  // included so both backend families are covered.
  reverify_report(g_bw_sweep, BenchDomain::Blocksworld, 2025);
  reverify_report(g_nav_sweep, BenchDomain::Navigation, 2025);

  std::string script_path = "/tmp/planguard-acceptance.script";
  {
    std::ofstream out(script_path);
    out << "1. pick-up b1\n";  // valid only when b1 is clear and on the table
  }
  BenchConfig config;
  config.domain = BenchDomain::Blocksworld;
  config.sizes = {3};
  config.instances_per_size = 5;
  config.seed = 7;
  config.backend = "scripted:" + script_path;
  config.mode = BenchMode::OneShot;
  config.prompts_dir = kShare + "/prompts";
  RunReport scripted = run_benchmark(config);
  reverify_report(scripted, BenchDomain::Blocksworld, 7);

  std::size_t successes =
      g_bw_sweep.successes() + g_nav_sweep.successes() + scripted.successes();
  detail = std::to_string(successes) +
           " reported successes re-verified under a fresh validator, zero "
           "failures";
}

void criterion10(std::string& detail) {
  PromptTemplates templates = acceptance_templates();
  DomainPrompts bw_prompts =
      DomainPrompts::load(kShare + "/prompts/blocksworld");
  PlanningProblem bw = load_bw();

  auto gated_script = []() {
    std::vector<ScriptEntry> script;
    script.push_back({kBwSecondOutput, {}, ""});
    script.push_back({kBwThirdOutput, {},
                      "violates the precondition of the action stack"});
    return script;
  };

  ScriptedBackend reasoning_backend(gated_script());
  LoopOutcome with_reasoning = plan_with_verification(
      bw, reasoning_backend, templates, bw_prompts, LoopOptions{});

  ScriptedBackend no_reason_backend(gated_script());
  LoopOptions no_reason;
  no_reason.correction_style = CorrectionStyle::InvalidOnly;
  LoopOutcome without_reasoning = plan_with_verification(
      bw, no_reason_backend, templates, bw_prompts, no_reason);

  require(with_reasoning.success,
          "task-planner mode must unlock the gated valid plan");
  require(with_reasoning.iterations_used == 2,
          "task-planner mode must succeed at iteration 2");
  require(!without_reasoning.success,
          "no-reason mode must never unlock the gated plan");
  require(without_reasoning.iterations_used == 20,
          "no-reason mode must exhaust the limit");
  detail = "task-planner succeeds at iteration 2; no-reason fails at the "
           "limit on the same script";
}

}  // namespace

int main() {
  std::vector<Criterion> criteria = {
      {1, "blocksworld worked example, exact reproduction", criterion1},
      {2, "navigation worked example, exact reproduction", criterion2},
      {3, "automaton/evaluation agreement, exhaustive to length 6",
       criterion3},
      {4, "progression soundness, exhaustive to length 5", criterion4},
      {5, "oracle/validator consistency and minimality", criterion5},
      {6, "verification loop semantics on scripted backends", criterion6},
      {7, "hierarchical rollback, counters, and degenerate case", criterion7},
      {9, "oracle benchmark sweeps at the reference sizes", criterion9},
      {8, "reported successes re-verify under a fresh validator", criterion8},
      {10, "reasoning-bearing corrections beat bare invalid flags",
       criterion10},
  };

  int failures = 0;
  for (const Criterion& criterion : criteria) {
    std::string detail;
    try {
      criterion.run(detail);
      std::cout << "PASS criterion " << criterion.number << ": "
                << criterion.name;
      if (!detail.empty()) std::cout << " [" << detail << "]";
      std::cout << "\n";
    } catch (const std::exception& e) {
      ++failures;
      std::cout << "FAIL criterion " << criterion.number << ": "
                << criterion.name << " - " << e.what() << "\n";
    }
    std::cout.flush();
  }

  if (failures == 0) {
    std::cout << "all 10 acceptance criteria pass\n";
    return 0;
  }
  std::cout << failures << " criteria failing\n";
  return 1;
}
