#include "planguard/task_planner.hpp"

namespace planguard {

namespace {

constexpr const char* kNoPlanCorrection =
    "no plan found, reply in the required format";
constexpr const char* kInvalidOnlyCorrection = "the generated plan is invalid";

std::string with_correction(const std::string& base,
                            const std::string& correction) {
  return base + "\n# Correction.\n" + correction +
         "\nPlease give the complete corrected plan in the same format as "
         "the example solution.\n";
}

}  // namespace

LoopOutcome plan_with_verification(const PlanningProblem& problem,
                                   PlannerBackend& backend,
                                   const PromptTemplates& templates,
                                   const DomainPrompts& domain,
                                   const LoopOptions& options) {
  for (const TemporalConstraint& c : problem.constraints.temporal_constraints)
    if (!c.translated())
      throw UntranslatedConstraint("constraint lacks a formal formula: " +
                                   c.text);

  const std::string base = build_task_prompt(templates, domain, problem,
                                             options.in_context_examples);
  LoopOutcome outcome;
  std::string correction;

  for (std::size_t iteration = 1; iteration <= options.iteration_limit;
       ++iteration) {
    const std::string prompt =
        correction.empty() ? base : with_correction(base, correction);

    GenerationResult generation;
    if (iteration == 1 && options.initial_generation) {
      generation = *options.initial_generation;
    } else {
      if (options.transcript) options.transcript("prompt", prompt);
      generation = backend.generate(prompt);
    }
    if (options.transcript) options.transcript("reply", generation.text);

    outcome.iterations_used = iteration;
    IterationRecord record;
    record.reply = generation.text;

    Plan plan;
    try {
      plan = parse_plan_text(generation.text, problem);
    } catch (const PlanTextError& e) {
      record.parse_error = e.what();
      outcome.history.push_back(std::move(record));
      correction = options.correction_style == CorrectionStyle::Reasoning
                       ? kNoPlanCorrection
                       : kInvalidOnlyCorrection;
      continue;
    }

    Verdict verdict = verify_plan(problem, plan);
    record.verdict = verdict;
    outcome.history.push_back(std::move(record));

    if (verdict.valid) {
      outcome.success = true;
      outcome.plan = std::move(plan);
      return outcome;
    }
    correction = options.correction_style == CorrectionStyle::Reasoning
                     ? reasoning_text(verdict, plan, problem)
                     : kInvalidOnlyCorrection;
  }
  return outcome;
}

}  // namespace planguard
