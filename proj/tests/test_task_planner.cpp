#include "doctest.h"
#include "planguard/task_planner.hpp"
#include "test_util.hpp"

using namespace planguard;

TEST_SUITE_BEGIN("task-planner");

namespace {

PromptTemplates templates() {
  return PromptTemplates::load(test::share_dir() + "/prompts");
}

DomainPrompts nav_prompts() {
  return DomainPrompts::load(test::share_dir() + "/prompts/navigation");
}

DomainPrompts bw_prompts() {
  return DomainPrompts::load(test::share_dir() + "/prompts/blocksworld");
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

// Wraps a backend and records every prompt it sees.
class RecordingBackend : public PlannerBackend {
 public:
  explicit RecordingBackend(PlannerBackend& inner) : inner_(inner) {}
  GenerationResult generate(const std::string& prompt,
                            const DecodingOptions& options = {}) override {
    prompts.push_back(prompt);
    return inner_.generate(prompt, options);
  }
  std::string id() const override { return inner_.id(); }

  std::vector<std::string> prompts;

 private:
  PlannerBackend& inner_;
};

}  // namespace

TEST_CASE("blocksworld worked loop: success at iteration 2") {
  PlanningProblem bw = test::load_bw_rand_6();
  ScriptedBackend script =
      scripted_generate({kBwSecondOutput, kBwThirdOutput});
  RecordingBackend backend(script);

  LoopOutcome outcome =
      plan_with_verification(bw, backend, templates(), bw_prompts());
  REQUIRE(outcome.success);
  CHECK(outcome.iterations_used == 2);
  REQUIRE(outcome.history.size() == 2);

  REQUIRE(outcome.history[0].verdict.has_value());
  CHECK_FALSE(outcome.history[0].verdict->valid);
  CHECK(outcome.history[0].verdict->kind == ViolationKind::Precondition);
  CHECK(outcome.history[0].verdict->step == 2);
  CHECK(outcome.history[0].verdict->constraint_text == "stack");
  REQUIRE(outcome.history[1].verdict.has_value());
  CHECK(outcome.history[1].verdict->valid);

  CHECK(outcome.plan == parse_plan_text(kBwThirdOutput, bw));
  CHECK(verify_plan(bw, *outcome.plan).valid);

  // The second prompt re-sends the task and appends the reasoning text.
  REQUIRE(backend.prompts.size() == 2);
  CHECK(backend.prompts[1].find("# Correction.") != std::string::npos);
  CHECK(backend.prompts[1].find("1. pick-up b5\n2. stack b5 b3\nis invalid.\n"
                                "Step 2 violates the precondition of the "
                                "action stack.") != std::string::npos);
  // Stateless re-send: the follow-up starts with the full original prompt.
  CHECK(backend.prompts[1].find(backend.prompts[0]) == 0);
  CHECK(backend.prompts[1].find("# Problem.") != std::string::npos);
}

TEST_CASE("navigation worked loop: success at iteration 2") {
  PlanningProblem driver = test::load_driver_1();
  ScriptedBackend backend =
      scripted_generate({kNavSecondOutput, kNavThirdOutput});

  LoopOutcome outcome =
      plan_with_verification(driver, backend, templates(), nav_prompts());
  REQUIRE(outcome.success);
  CHECK(outcome.iterations_used == 2);
  REQUIRE(outcome.history.size() == 2);
  CHECK(outcome.history[0].verdict->kind == ViolationKind::Temporal);
  CHECK(outcome.history[0].verdict->constraint_text ==
        "You should have been to C and D before you go to G");
  CHECK(verify_plan(driver, *outcome.plan).valid);
}

TEST_CASE("always-invalid script exhausts the default limit of 20") {
  PlanningProblem bw = test::load_bw_rand_6();
  ScriptedBackend backend = scripted_generate({kBwSecondOutput});
  LoopOutcome outcome =
      plan_with_verification(bw, backend, templates(), bw_prompts());
  CHECK_FALSE(outcome.success);
  CHECK(outcome.iterations_used == 20);
  CHECK(outcome.history.size() == 20);
  for (const IterationRecord& record : outcome.history) {
    REQUIRE(record.verdict.has_value());
    CHECK_FALSE(record.verdict->valid);
  }
}

TEST_CASE("unparseable replies consume an iteration with a format nudge") {
  PlanningProblem bw = test::load_bw_rand_6();
  ScriptedBackend script =
      scripted_generate({"I refuse to answer in the format.",
                         kBwThirdOutput});
  RecordingBackend backend(script);
  LoopOutcome outcome =
      plan_with_verification(bw, backend, templates(), bw_prompts());
  REQUIRE(outcome.success);
  CHECK(outcome.iterations_used == 2);
  CHECK_FALSE(outcome.history[0].parsed());
  CHECK_FALSE(outcome.history[0].parse_error.empty());
  CHECK(backend.prompts[1].find(
            "no plan found, reply in the required format") !=
        std::string::npos);
}

TEST_CASE("no-reason corrections carry no reasoning detail") {
  PlanningProblem bw = test::load_bw_rand_6();
  ScriptedBackend script =
      scripted_generate({kBwSecondOutput, kBwThirdOutput});
  RecordingBackend backend(script);
  LoopOptions options;
  options.correction_style = CorrectionStyle::InvalidOnly;
  LoopOutcome outcome =
      plan_with_verification(bw, backend, templates(), bw_prompts(), options);
  REQUIRE(outcome.success);
  CHECK(backend.prompts[1].find("the generated plan is invalid") !=
        std::string::npos);
  CHECK(backend.prompts[1].find("violates the precondition") ==
        std::string::npos);
}

TEST_CASE("reasoning feedback separates the modes on a gated script") {
  // The valid plan is only unlocked by a prompt containing the reasoning
  // detail, which the no-reason mode never sends.
  PlanningProblem bw = test::load_bw_rand_6();
  auto gated_script = [&]() {
    std::vector<ScriptEntry> script;
    script.push_back({kBwSecondOutput, {}, ""});
    script.push_back(
        {kBwThirdOutput, {}, "violates the precondition of the action stack"});
    return script;
  };

  {
    ScriptedBackend backend(gated_script());
    LoopOutcome outcome =
        plan_with_verification(bw, backend, templates(), bw_prompts());
    CHECK(outcome.success);
    CHECK(outcome.iterations_used == 2);
  }
  {
    ScriptedBackend backend(gated_script());
    LoopOptions options;
    options.correction_style = CorrectionStyle::InvalidOnly;
    options.iteration_limit = 20;
    LoopOutcome outcome =
        plan_with_verification(bw, backend, templates(), bw_prompts(),
                               options);
    CHECK_FALSE(outcome.success);
    CHECK(outcome.iterations_used == 20);
  }
}

TEST_CASE("initial generation is consumed as iteration 1") {
  PlanningProblem bw = test::load_bw_rand_6();
  ScriptedBackend script = scripted_generate({"unused"});
  RecordingBackend backend(script);
  LoopOptions options;
  GenerationResult probe;
  probe.text = kBwThirdOutput;
  options.initial_generation = probe;
  LoopOutcome outcome =
      plan_with_verification(bw, backend, templates(), bw_prompts(), options);
  CHECK(outcome.success);
  CHECK(outcome.iterations_used == 1);
  CHECK(backend.prompts.empty());  // no backend call was needed
}

TEST_CASE("loop requires translated constraints") {
  PlanningProblem raw = test::load_driver_1_raw();
  ScriptedBackend backend = scripted_generate({kNavThirdOutput});
  CHECK_THROWS_AS(
      plan_with_verification(raw, backend, templates(), nav_prompts()),
      UntranslatedConstraint);
}

TEST_SUITE_END();
