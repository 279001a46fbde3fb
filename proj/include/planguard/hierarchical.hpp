#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "planguard/task_planner.hpp"

namespace planguard {

inline constexpr std::size_t kDefaultFailureLimit = 3;
inline constexpr double kDefaultConfidenceThreshold = 0.6;

// Identity of one sub-task attempt site: the canonical state serialization
// paired with the canonical goal print. Injective on both.
struct FailureKey {
  std::string state_fingerprint;
  std::string goal_fingerprint;

  auto operator<=>(const FailureKey&) const = default;
};

// Instrumentation stream for scenario assertions and run logs.
struct HierEvent {
  enum class Kind {
    SubtaskStarted,
    SubtaskSucceeded,
    SubtaskFailed,
    Push,
    Rollback,
    EmptyStackFailure,
    FallbackInvoked,
  };

  Kind kind;
  std::size_t k = 0;          // sub-goal index
  std::size_t counter = 0;    // failure counter after the event
  FailureKey key;
  WorldState state;           // loop state after the event
  Plan partial_plan;          // accumulated plan after the event
};

std::string to_string(HierEvent::Kind kind);

using HierEventSink = std::function<void(const HierEvent&)>;

struct HierOptions {
  std::size_t iteration_limit = kDefaultIterationLimit;
  std::size_t failure_limit = kDefaultFailureLimit;  // t
  double confidence_threshold = kDefaultConfidenceThreshold;
  ConfidenceAggregate aggregate = ConfidenceAggregate::ArithmeticMean;
  // Re-apply the difficulty discriminator to every sub-task (switchable; see
  // assess_difficulty).
  bool discriminate_subtasks = true;
  CorrectionStyle correction_style = CorrectionStyle::Reasoning;
  HierEventSink events;
  TranscriptSink transcript;
};

struct DifficultyDecision {
  bool direct = true;
  GenerationResult probe;  // reused as the loop's first iteration when direct
  std::optional<double> confidence;  // empty: probabilities unavailable
};

// One real generation of the task prompt, scored by mean token probability.
// At or above the threshold (or with probabilities unavailable, optimistic
// policy) the task goes directly to the verification loop.
DifficultyDecision assess_difficulty(const PlanningProblem& problem,
                                     PlannerBackend& backend,
                                     const PromptTemplates& templates,
                                     const DomainPrompts& domain,
                                     double threshold,
                                     ConfidenceAggregate aggregate =
                                         ConfidenceAggregate::ArithmeticMean);

struct SubPlanResult {
  GoalNode goal;
  std::string problem_text;  // sub-problem rendering used for prompts
  Plan plan;
  WorldState start_state;
  WorldState end_state;
};

// True iff replaying the concatenated sub-plans leaves an earlier sub-goal
// unsatisfied in the final state.
bool detect_dependencies(const PlanningProblem& problem,
                         const std::vector<SubPlanResult>& subresults);

// Re-plans the original problem with the solved sub-problems rendered as
// in-context examples.
LoopOutcome compose_with_examples(const PlanningProblem& problem,
                                  const std::vector<SubPlanResult>& subresults,
                                  PlannerBackend& backend,
                                  const PromptTemplates& templates,
                                  const DomainPrompts& domain,
                                  const LoopOptions& options = {});

struct HierOutcome {
  bool success = false;
  Plan plan;               // verified full plan, or the partial plan on failure
  WorldState final_state;  // on success
  std::size_t subtasks_attempted = 0;
  std::size_t rollbacks = 0;
  bool fallback_used = false;
  std::size_t loop_iterations = 0;  // backend iterations across all sub-loops
};

// AND-decomposition with a rollback stack and per-(state, sub-goal) failure
// counters; sub-goals are planned left to right, failed sub-tasks revise
// earlier sub-plans by popping the stack, and the composed plan is always
// re-verified against the whole goal (falling back to in-context-example
// composition when that fails). OR goals try their disjuncts in declared
// order.
HierOutcome hierarchical_plan(const PlanningProblem& problem,
                              const GoalNode& goal, const WorldState& state,
                              std::size_t failure_limit,
                              PlannerBackend& backend,
                              const PromptTemplates& templates,
                              const DomainPrompts& domain,
                              const HierOptions& options = {});

struct AssuredOutcome {
  bool success = false;
  Plan plan;
  bool decomposed = false;
  bool fallback_used = false;
  std::size_t iterations = 0;  // backend iterations consumed in total
  std::size_t rollbacks = 0;
  // Iteration records of the direct loop; empty for decomposed runs.
  std::vector<IterationRecord> direct_history;
};

// Top-level entry: discriminator gate, then either the direct verification
// loop (reusing the probe) or hierarchical decomposition.
AssuredOutcome plan_with_assurance(const PlanningProblem& problem,
                                   PlannerBackend& backend,
                                   const PromptTemplates& templates,
                                   const DomainPrompts& domain,
                                   const HierOptions& options = {});

}  // namespace planguard
