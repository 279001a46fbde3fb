#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "planguard/backend.hpp"
#include "planguard/problem.hpp"

namespace planguard {

// Per-domain prompt fixtures: the "# Tasks background." body, the
// "# Permitted actions." body, and a worked example problem plus solution.
struct DomainPrompts {
  std::string background;
  std::string permitted_actions;
  std::string example_block;

  // Reads background.txt, actions.txt and example.txt from `dir`.
  static DomainPrompts load(const std::string& dir);
};

// Template files with {{placeholder}} substitution.
struct PromptTemplates {
  std::string task_template;
  std::string translation_template;

  // Reads task.txt and translation.txt from `dir`.
  static PromptTemplates load(const std::string& dir);
};

std::string render_template(
    const std::string& tmpl,
    const std::map<std::string, std::string>& values);

// Background, permitted actions, worked example, optional solved sub-problem
// examples, then the target problem, in that order. Deterministic.
std::string build_task_prompt(
    const PromptTemplates& templates, const DomainPrompts& domain,
    const PlanningProblem& problem,
    const std::vector<std::pair<std::string, std::string>>&
        in_context_examples = {});

// Asks for one delimited formula block per constraint sentence. Throws
// std::invalid_argument on an empty sentence list.
std::string build_translation_prompt(const PromptTemplates& templates,
                                     const DomainPrompts& domain,
                                     const std::vector<std::string>& sentences);

// Both rendered prompts for one problem, plus the fixtures they were built
// from. translation_prompt is empty for unconstrained problems.
struct PromptBundle {
  std::string translation_prompt;
  std::string task_prompt;
  std::string example_block;
  std::vector<std::pair<std::string, std::string>> in_context_examples;
};

PromptBundle build_prompt_bundle(
    const PromptTemplates& templates, const DomainPrompts& domain,
    const PlanningProblem& problem,
    const std::vector<std::pair<std::string, std::string>>&
        in_context_examples = {});

class UnboundProposition : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TranslationRetryExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TranslatedConstraint {
  std::string text;
  bool temporal = true;
  LtlPtr formula;                              // temporal form
  GoalNode state_formula;                      // ground state form
  std::map<std::string, GroundAtom> bindings;  // temporal only
};

inline constexpr const char* kFormulaBegin = "BEGIN-FORMULA";
inline constexpr const char* kFormulaEnd = "END-FORMULA";
inline constexpr const char* kBindingsBegin = "BEGIN-BINDINGS";
inline constexpr const char* kBindingsEnd = "END-BINDINGS";

// Extracts the delimited formula/bindings blocks of a translation reply, in
// order. Formulas without temporal operators become ground state constraints
// through their bindings. Throws SyntaxError / SemanticError /
// UnboundProposition on malformed replies.
std::vector<TranslatedConstraint> parse_translation_reply(
    const std::string& reply, const std::vector<std::string>& sentences,
    const PlanningProblem& problem);

enum class ApprovalMode { Interactive, Auto, RejectAll };

inline constexpr int kTranslationRetryLimit = 3;

// Queries the backend for formal counterparts of the problem's NL
// constraints. Interactive mode confirms each formula on `input`/`output`;
// rejected or unparseable replies re-query up to `retry_limit` times.
ConstraintSet translate_constraints(const PlanningProblem& problem,
                                    PlannerBackend& backend,
                                    const PromptTemplates& templates,
                                    const DomainPrompts& domain,
                                    ApprovalMode mode,
                                    int retry_limit = kTranslationRetryLimit,
                                    std::istream* input = nullptr,
                                    std::ostream* output = nullptr);

// Sidecar constraints JSON: {"constraints": [{"text", "kind",
// "formula", "bindings": {prop: "(pred args)"}}]} in problem order.
ConstraintSet parse_constraint_sidecar(const std::string& json_text,
                                       const PlanningProblem& problem);
std::string constraint_sidecar_json(const ConstraintSet& constraints);

}  // namespace planguard
