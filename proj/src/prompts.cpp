#include "planguard/prompts.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include "json.hpp"

namespace planguard {

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open prompt fixture: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  std::string text = buffer.str();
  while (!text.empty() && (text.back() == '\n' || text.back() == '\r'))
    text.pop_back();
  return text;
}

}  // namespace

DomainPrompts DomainPrompts::load(const std::string& dir) {
  DomainPrompts prompts;
  prompts.background = slurp(dir + "/background.txt");
  prompts.permitted_actions = slurp(dir + "/actions.txt");
  prompts.example_block = slurp(dir + "/example.txt");
  return prompts;
}

PromptTemplates PromptTemplates::load(const std::string& dir) {
  PromptTemplates templates;
  templates.task_template = slurp(dir + "/task.txt");
  templates.translation_template = slurp(dir + "/translation.txt");
  return templates;
}

std::string render_template(
    const std::string& tmpl,
    const std::map<std::string, std::string>& values) {
  std::string out;
  std::size_t pos = 0;
  while (pos < tmpl.size()) {
    std::size_t open = tmpl.find("{{", pos);
    if (open == std::string::npos) {
      out += tmpl.substr(pos);
      break;
    }
    std::size_t close = tmpl.find("}}", open + 2);
    if (close == std::string::npos) {
      out += tmpl.substr(pos);
      break;
    }
    out += tmpl.substr(pos, open - pos);
    std::string name = tmpl.substr(open + 2, close - open - 2);
    auto it = values.find(name);
    if (it == values.end())
      throw std::runtime_error("prompt template placeholder without value: " +
                               name);
    out += it->second;
    pos = close + 2;
  }
  return out;
}

std::string build_task_prompt(
    const PromptTemplates& templates, const DomainPrompts& domain,
    const PlanningProblem& problem,
    const std::vector<std::pair<std::string, std::string>>&
        in_context_examples) {
  std::string examples;
  if (!in_context_examples.empty()) {
    examples += "# Solved sub-problems.\n";
    examples +=
        "Here are sub-problems of the target problem together with correct "
        "plans; use them as templates.\n";
    for (const auto& [sub_problem, sub_plan] : in_context_examples) {
      examples += "Sub-problem:\n" + sub_problem + "\n";
      examples += "Sub-plan:\nSTART-PLAN\n" + sub_plan + "\n";
    }
    examples += "\n";
  }
  return render_template(templates.task_template,
                         {{"background", domain.background},
                          {"permitted_actions", domain.permitted_actions},
                          {"example_block", domain.example_block},
                          {"in_context_examples", examples},
                          {"problem_name", problem.name},
                          {"problem_text", problem.to_text()}});
}

std::string build_translation_prompt(
    const PromptTemplates& templates, const DomainPrompts& domain,
    const std::vector<std::string>& sentences) {
  if (sentences.empty())
    throw std::invalid_argument("no constraint sentences to translate");
  std::string numbered;
  for (std::size_t i = 0; i < sentences.size(); ++i)
    numbered += std::to_string(i + 1) + ". " + sentences[i] + "\n";
  return render_template(templates.translation_template,
                         {{"background", domain.background},
                          {"count", std::to_string(sentences.size())},
                          {"sentences", numbered}});
}

PromptBundle build_prompt_bundle(
    const PromptTemplates& templates, const DomainPrompts& domain,
    const PlanningProblem& problem,
    const std::vector<std::pair<std::string, std::string>>&
        in_context_examples) {
  PromptBundle bundle;
  bundle.example_block = domain.example_block;
  bundle.in_context_examples = in_context_examples;
  bundle.task_prompt =
      build_task_prompt(templates, domain, problem, in_context_examples);
  std::vector<std::string> sentences;
  for (const StateConstraint& c : problem.constraints.state_constraints)
    sentences.push_back(c.text);
  for (const TemporalConstraint& c : problem.constraints.temporal_constraints)
    sentences.push_back(c.text);
  if (!sentences.empty())
    bundle.translation_prompt =
        build_translation_prompt(templates, domain, sentences);
  return bundle;
}

namespace {

bool has_temporal_operator(const LtlPtr& f) {
  switch (f->kind) {
    case LtlKind::Next:
    case LtlKind::Globally:
    case LtlKind::Finally:
    case LtlKind::Until:
      return true;
    case LtlKind::True:
    case LtlKind::False:
    case LtlKind::Atom:
      return false;
    default:
      break;
  }
  if (f->left && has_temporal_operator(f->left)) return true;
  return f->right && has_temporal_operator(f->right);
}

GroundAtom parse_bound_atom(const std::string& text,
                            const PlanningProblem& problem) {
  SExpr expr = parse_sexpr(text);
  if (expr.is_atom || expr.children.empty() || !expr.children[0].is_atom)
    throw SemanticError("binding must be a ground atom: " + text);
  GroundAtom atom;
  atom.predicate = expr.children[0].atom;
  if (!is_identifier(atom.predicate))
    throw SemanticError("binding predicate is not an identifier: " + text);
  for (std::size_t i = 1; i < expr.children.size(); ++i) {
    if (!expr.children[i].is_atom)
      throw SemanticError("binding atom must be ground: " + text);
    const std::string& arg = expr.children[i].atom;
    if (!problem.has_object(arg))
      throw SemanticError("binding uses undeclared object '" + arg + "'");
    atom.args.push_back(arg);
  }
  return atom;
}

GoalNode to_state_formula(const LtlPtr& f,
                          const std::map<std::string, GroundAtom>& bindings) {
  switch (f->kind) {
    case LtlKind::Atom: {
      auto it = bindings.find(f->prop);
      if (it == bindings.end())
        throw UnboundProposition("proposition '" + f->prop +
                                 "' has no binding");
      return GoalNode::literal(it->second);
    }
    case LtlKind::Not: {
      if (f->left->kind == LtlKind::Atom) {
        auto it = bindings.find(f->left->prop);
        if (it == bindings.end())
          throw UnboundProposition("proposition '" + f->left->prop +
                                   "' has no binding");
        return GoalNode::literal(it->second, false);
      }
      return GoalNode::negation(to_state_formula(f->left, bindings));
    }
    case LtlKind::And:
      return GoalNode::conj({to_state_formula(f->left, bindings),
                             to_state_formula(f->right, bindings)});
    case LtlKind::Or:
      return GoalNode::disj({to_state_formula(f->left, bindings),
                             to_state_formula(f->right, bindings)});
    case LtlKind::Implies:
      return GoalNode::disj(
          {GoalNode::negation(to_state_formula(f->left, bindings)),
           to_state_formula(f->right, bindings)});
    default:
      throw SemanticError(
          "state constraint formula may not use constants or temporal "
          "operators: " +
          to_string(f));
  }
}

}  // namespace

std::vector<TranslatedConstraint> parse_translation_reply(
    const std::string& reply, const std::vector<std::string>& sentences,
    const PlanningProblem& problem) {
  std::vector<std::string> formulas;
  std::vector<std::map<std::string, GroundAtom>> bindings;

  std::istringstream stream(reply);
  std::string line;
  enum class Section { None, Formula, Bindings } section = Section::None;
  while (std::getline(stream, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string trimmed = line;
    while (!trimmed.empty() && trimmed.front() == ' ') trimmed.erase(0, 1);
    while (!trimmed.empty() && trimmed.back() == ' ') trimmed.pop_back();
    if (trimmed == kFormulaBegin) {
      formulas.emplace_back();
      section = Section::Formula;
      continue;
    }
    if (trimmed == kFormulaEnd || trimmed == kBindingsEnd) {
      section = Section::None;
      continue;
    }
    if (trimmed == kBindingsBegin) {
      bindings.resize(formulas.size());
      section = Section::Bindings;
      continue;
    }
    if (section == Section::Formula && !trimmed.empty()) {
      if (!formulas.back().empty()) formulas.back() += ' ';
      formulas.back() += trimmed;
    } else if (section == Section::Bindings && !trimmed.empty()) {
      std::size_t eq = trimmed.find('=');
      if (eq == std::string::npos)
        throw SemanticError("binding line must be 'prop = (atom)': " +
                            trimmed);
      std::string prop = trimmed.substr(0, eq);
      while (!prop.empty() && prop.back() == ' ') prop.pop_back();
      std::string atom_text = trimmed.substr(eq + 1);
      if (!is_identifier(prop))
        throw SemanticError("binding proposition is not an identifier: " +
                            prop);
      bindings.back()[prop] = parse_bound_atom(atom_text, problem);
    }
  }

  if (formulas.size() != sentences.size())
    throw SemanticError("expected " + std::to_string(sentences.size()) +
                        " formula blocks, found " +
                        std::to_string(formulas.size()));
  bindings.resize(formulas.size());

  std::vector<TranslatedConstraint> out;
  for (std::size_t i = 0; i < formulas.size(); ++i) {
    TranslatedConstraint constraint;
    constraint.text = sentences[i];
    LtlPtr formula = parse_ltl(formulas[i]);
    constraint.bindings = bindings[i];
    for (const std::string& prop : propositions(formula))
      if (!constraint.bindings.count(prop))
        throw UnboundProposition("proposition '" + prop +
                                 "' has no binding for constraint: " +
                                 sentences[i]);
    if (has_temporal_operator(formula)) {
      constraint.temporal = true;
      constraint.formula = formula;
    } else {
      constraint.temporal = false;
      constraint.state_formula = to_state_formula(formula, constraint.bindings);
    }
    out.push_back(std::move(constraint));
  }
  return out;
}

namespace {

ConstraintSet assemble(const std::vector<TranslatedConstraint>& translated) {
  ConstraintSet out;
  for (const TranslatedConstraint& c : translated) {
    if (c.temporal) {
      TemporalConstraint constraint;
      constraint.text = c.text;
      constraint.formula = c.formula;
      constraint.bindings = c.bindings;
      out.temporal_constraints.push_back(std::move(constraint));
    } else {
      out.state_constraints.push_back({c.text, c.state_formula});
    }
  }
  return out;
}

std::vector<std::string> constraint_sentences(const PlanningProblem& problem) {
  std::vector<std::string> sentences;
  for (const StateConstraint& c : problem.constraints.state_constraints)
    sentences.push_back(c.text);
  for (const TemporalConstraint& c : problem.constraints.temporal_constraints)
    sentences.push_back(c.text);
  return sentences;
}

}  // namespace

ConstraintSet translate_constraints(const PlanningProblem& problem,
                                    PlannerBackend& backend,
                                    const PromptTemplates& templates,
                                    const DomainPrompts& domain,
                                    ApprovalMode mode, int retry_limit,
                                    std::istream* input, std::ostream* output) {
  std::vector<std::string> sentences = constraint_sentences(problem);
  std::string prompt = build_translation_prompt(templates, domain, sentences);
  std::istream& in = input ? *input : std::cin;
  std::ostream& out = output ? *output : std::cout;

  std::string last_error;
  for (int attempt = 1; attempt <= retry_limit; ++attempt) {
    GenerationResult reply = backend.generate(prompt);
    std::vector<TranslatedConstraint> translated;
    try {
      translated = parse_translation_reply(reply.text, sentences, problem);
    } catch (const std::exception& e) {
      last_error = e.what();
      continue;
    }

    if (mode == ApprovalMode::RejectAll) {
      last_error = "formula rejected by reviewer";
      continue;
    }
    if (mode == ApprovalMode::Interactive) {
      bool approved = true;
      for (const TranslatedConstraint& c : translated) {
        out << "Constraint: " << c.text << "\n";
        out << "Formula:    "
            << (c.temporal ? to_string(c.formula) : c.state_formula.to_string())
            << "\n";
        for (const auto& [prop, atom] : c.bindings)
          out << "  " << prop << " = " << atom.to_string() << "\n";
        out << "Approve? [y/n] " << std::flush;
        std::string answer;
        std::getline(in, answer);
        if (answer.empty() || (answer[0] != 'y' && answer[0] != 'Y')) {
          approved = false;
          break;
        }
      }
      if (!approved) {
        last_error = "formula rejected by reviewer";
        continue;
      }
    }
    return assemble(translated);
  }
  throw TranslationRetryExhausted(
      "translation not approved after " + std::to_string(retry_limit) +
      " attempts: " + last_error);
}

ConstraintSet parse_constraint_sidecar(const std::string& json_text,
                                       const PlanningProblem& problem) {
  nlohmann::json doc = nlohmann::json::parse(json_text);
  if (!doc.contains("constraints") || !doc["constraints"].is_array())
    throw SemanticError("sidecar must contain a 'constraints' array");

  std::vector<std::string> sentences = constraint_sentences(problem);
  const nlohmann::json& entries = doc["constraints"];
  if (entries.size() != sentences.size())
    throw SemanticError("sidecar has " + std::to_string(entries.size()) +
                        " entries for " + std::to_string(sentences.size()) +
                        " problem constraints");

  std::vector<TranslatedConstraint> translated;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const nlohmann::json& entry = entries[i];
    TranslatedConstraint c;
    c.text = entry.value("text", sentences[i]);
    if (c.text != sentences[i])
      throw SemanticError("sidecar entry " + std::to_string(i + 1) +
                          " does not match the problem constraint: " + c.text);
    std::string formula_text = entry.at("formula").get<std::string>();
    std::string kind = entry.value("kind", "temporal");
    if (kind == "temporal") {
      c.temporal = true;
      c.formula = parse_ltl(formula_text);
      if (entry.contains("bindings"))
        for (const auto& [prop, atom_text] : entry["bindings"].items())
          c.bindings[prop] =
              parse_bound_atom(atom_text.get<std::string>(), problem);
      for (const std::string& prop : propositions(c.formula))
        if (!c.bindings.count(prop))
          throw UnboundProposition("proposition '" + prop +
                                   "' has no binding in sidecar entry " +
                                   std::to_string(i + 1));
    } else if (kind == "state") {
      // State entries carry the ground formula directly.
      c.temporal = false;
      c.state_formula = parse_goal_text(formula_text, problem);
    } else {
      throw SemanticError("sidecar entry kind must be temporal or state");
    }
    translated.push_back(std::move(c));
  }
  return assemble(translated);
}

std::string constraint_sidecar_json(const ConstraintSet& constraints) {
  nlohmann::json entries = nlohmann::json::array();
  for (const StateConstraint& c : constraints.state_constraints) {
    entries.push_back({{"text", c.text},
                       {"kind", "state"},
                       {"formula", c.formula.to_string()}});
  }
  for (const TemporalConstraint& c : constraints.temporal_constraints) {
    nlohmann::json bindings = nlohmann::json::object();
    for (const auto& [prop, atom] : c.bindings)
      bindings[prop] = atom.to_string();
    entries.push_back({{"text", c.text},
                       {"kind", "temporal"},
                       {"formula", c.translated() ? to_string(c.formula) : ""},
                       {"bindings", bindings}});
  }
  nlohmann::json doc = {{"constraints", entries}};
  return doc.dump(2) + "\n";
}

}  // namespace planguard
