#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "planguard/backend.hpp"
#include "planguard/prompts.hpp"
#include "planguard/validator.hpp"

namespace planguard {

inline constexpr std::size_t kDefaultIterationLimit = 20;

enum class CorrectionStyle {
  Reasoning,    // append the verdict's full reasoning text
  InvalidOnly,  // append only "the generated plan is invalid"
};

struct IterationRecord {
  std::string reply;
  std::optional<Verdict> verdict;  // empty when the reply failed to parse
  std::string parse_error;

  bool parsed() const { return verdict.has_value(); }
};

struct LoopOutcome {
  bool success = false;
  std::optional<Plan> plan;  // present on success, verified
  std::size_t iterations_used = 0;
  std::vector<IterationRecord> history;  // one entry per iteration
};

// role is "prompt" or "reply"; used for run transcripts.
using TranscriptSink =
    std::function<void(const std::string& role, const std::string& text)>;

struct LoopOptions {
  std::size_t iteration_limit = kDefaultIterationLimit;
  CorrectionStyle correction_style = CorrectionStyle::Reasoning;
  // When set, consumed as iteration 1 instead of a fresh generation (the
  // discriminator's probe).
  std::optional<GenerationResult> initial_generation;
  std::vector<std::pair<std::string, std::string>> in_context_examples;
  TranscriptSink transcript;
};

// The generate/verify/refine loop: iteration 1 sends the task prompt, later
// iterations append the previous verdict's correction; the first Valid
// verdict wins. Unparseable replies consume an iteration.
LoopOutcome plan_with_verification(const PlanningProblem& problem,
                                   PlannerBackend& backend,
                                   const PromptTemplates& templates,
                                   const DomainPrompts& domain,
                                   const LoopOptions& options = {});

}  // namespace planguard
