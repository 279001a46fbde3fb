#include "planguard/problem.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace planguard {

bool is_identifier(std::string_view token) {
  if (token.empty() || !std::isalpha(static_cast<unsigned char>(token[0])))
    return false;
  return std::all_of(token.begin() + 1, token.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
  });
}

std::string GroundAtom::to_string() const {
  std::string out = "(" + predicate;
  for (const auto& a : args) out += " " + a;
  out += ")";
  return out;
}

WorldState::WorldState(std::initializer_list<GroundAtom> atoms)
    : WorldState(std::vector<GroundAtom>(atoms)) {}

WorldState::WorldState(std::vector<GroundAtom> atoms)
    : atoms_(std::move(atoms)) {
  std::sort(atoms_.begin(), atoms_.end());
  atoms_.erase(std::unique(atoms_.begin(), atoms_.end()), atoms_.end());
}

bool WorldState::contains(const GroundAtom& atom) const {
  return std::binary_search(atoms_.begin(), atoms_.end(), atom);
}

void WorldState::add(GroundAtom atom) {
  auto it = std::lower_bound(atoms_.begin(), atoms_.end(), atom);
  if (it == atoms_.end() || *it != atom) atoms_.insert(it, std::move(atom));
}

void WorldState::remove(const GroundAtom& atom) {
  auto it = std::lower_bound(atoms_.begin(), atoms_.end(), atom);
  if (it != atoms_.end() && *it == atom) atoms_.erase(it);
}

std::string WorldState::canonical() const {
  std::string out;
  for (const auto& atom : atoms_) {
    if (!out.empty()) out += ' ';
    out += atom.to_string();
  }
  return out;
}

std::string Literal::to_string() const {
  std::string inner = "(" + predicate;
  for (const auto& a : args) inner += " " + a;
  inner += ")";
  return positive ? inner : "(not " + inner + ")";
}

std::string PrecondClause::to_string() const {
  if (any_of.size() == 1) return any_of.front().to_string();
  std::string out = "(or";
  for (const auto& lit : any_of) out += " " + lit.to_string();
  out += ")";
  return out;
}

std::string GroundAction::to_string() const {
  std::string out = schema;
  for (const auto& a : args) out += " " + a;
  return out;
}

GoalNode GoalNode::literal(GroundAtom atom, bool positive) {
  GoalNode node;
  node.kind = Kind::Literal;
  node.atom = std::move(atom);
  node.positive = positive;
  return node;
}

GoalNode GoalNode::conj(std::vector<GoalNode> children) {
  GoalNode node;
  node.kind = Kind::And;
  node.children = std::move(children);
  return node;
}

GoalNode GoalNode::disj(std::vector<GoalNode> children) {
  GoalNode node;
  node.kind = Kind::Or;
  node.children = std::move(children);
  return node;
}

GoalNode GoalNode::negation(GoalNode child) {
  GoalNode node;
  node.kind = Kind::Not;
  node.children.push_back(std::move(child));
  return node;
}

std::string GoalNode::to_string() const {
  switch (kind) {
    case Kind::Literal:
      return positive ? atom.to_string() : "(not " + atom.to_string() + ")";
    case Kind::Not:
      return "(not " + children.front().to_string() + ")";
    case Kind::And:
    case Kind::Or: {
      std::string out = kind == Kind::And ? "(and" : "(or";
      for (const auto& child : children) out += " " + child.to_string();
      out += ")";
      return out;
    }
  }
  return {};
}

bool TemporalConstraint::operator==(const TemporalConstraint& other) const {
  if (text != other.text || bindings != other.bindings) return false;
  if ((formula == nullptr) != (other.formula == nullptr)) return false;
  return formula == nullptr || equal(formula, other.formula);
}

bool PlanningProblem::has_object(std::string_view name) const {
  return std::find(objects.begin(), objects.end(), name) != objects.end();
}

const ActionSchema* PlanningProblem::find_schema(std::string_view name) const {
  for (const auto& schema : schemas)
    if (schema.name == name) return &schema;
  return nullptr;
}

const ActionSchema* PlanningProblem::unique_binary_schema() const {
  const ActionSchema* found = nullptr;
  for (const auto& schema : schemas) {
    if (schema.arity() != 2) continue;
    if (found) return nullptr;
    found = &schema;
  }
  return found;
}

std::string PlanningProblem::to_text() const {
  std::ostringstream out;
  out << "(define (problem " << name << ")\n";
  if (!domain_name.empty()) out << "(:domain " << domain_name << ")\n";
  out << (objects_keyword_cities ? "(:cities" : "(:objects");
  for (const auto& obj : objects) out << " " << obj;
  out << ")\n";
  std::vector<std::string> sentences;
  for (const auto& c : constraints.state_constraints)
    sentences.push_back(c.text);
  for (const auto& c : constraints.temporal_constraints)
    sentences.push_back(c.text);
  if (!sentences.empty()) {
    out << "(:constraints\n";
    for (const auto& text : sentences) out << "(" << text << ")\n";
    out << ")\n";
  }
  out << "(:init\n";
  for (const auto& atom : init.atoms()) out << atom.to_string() << "\n";
  out << ")\n";
  out << "(:goal\n" << goal.to_string() << "\n))\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// Problem parsing

namespace {

[[noreturn]] void fail_at(const SExpr& node, const std::string& message) {
  throw SyntaxError(message, node.line, node.column);
}

const std::string& require_identifier(const SExpr& node,
                                      const std::string& what) {
  if (!node.is_atom || !is_identifier(node.atom))
    fail_at(node, "expected " + what + " identifier");
  return node.atom;
}

// Tracks first-use-fixed predicate arities.
class ArityTable {
 public:
  void check(const std::string& predicate, std::size_t arity,
             const SExpr& at) {
    auto [it, inserted] = arities_.emplace(predicate, arity);
    if (!inserted && it->second != arity)
      throw SemanticError("predicate '" + predicate + "' used with arity " +
                          std::to_string(arity) + " but previously " +
                          std::to_string(it->second));
    (void)at;
  }

 private:
  std::map<std::string, std::size_t> arities_;
};

GroundAtom parse_atom(const SExpr& node, const PlanningProblem& problem,
                      ArityTable& arities) {
  if (node.is_atom || node.children.empty())
    fail_at(node, "expected (predicate object...)");
  GroundAtom atom;
  atom.predicate = require_identifier(node.children.front(), "predicate");
  for (std::size_t i = 1; i < node.children.size(); ++i) {
    const std::string& arg =
        require_identifier(node.children[i], "object");
    if (!problem.has_object(arg))
      throw SemanticError("undeclared object '" + arg + "' in " +
                          atom.predicate);
    atom.args.push_back(arg);
  }
  arities.check(atom.predicate, atom.args.size(), node);
  return atom;
}

GoalNode parse_goal(const SExpr& node, const PlanningProblem& problem,
                    ArityTable& arities) {
  if (node.is_atom || node.children.empty())
    fail_at(node, "expected goal expression");
  const SExpr& head = node.children.front();
  if (head.is_atom && (head.atom == "and" || head.atom == "or")) {
    if (node.children.size() < 2)
      fail_at(node, "'" + head.atom + "' needs at least one operand");
    std::vector<GoalNode> children;
    for (std::size_t i = 1; i < node.children.size(); ++i)
      children.push_back(parse_goal(node.children[i], problem, arities));
    return head.atom == "and" ? GoalNode::conj(std::move(children))
                              : GoalNode::disj(std::move(children));
  }
  if (head.is_atom && head.atom == "not") {
    if (node.children.size() != 2)
      fail_at(node, "'not' takes exactly one operand");
    GoalNode child = parse_goal(node.children[1], problem, arities);
    if (child.kind == GoalNode::Kind::Literal && child.positive) {
      child.positive = false;
      return child;
    }
    return GoalNode::negation(std::move(child));
  }
  return GoalNode::literal(parse_atom(node, problem, arities));
}

}  // namespace

PlanningProblem parse_problem(std::string_view text) {
  SExpr root = parse_sexpr(text);
  if (!root.tagged("define") || root.children.size() < 2)
    fail_at(root, "expected (define (problem ...) ...)");
  const SExpr& header = root.children[1];
  if (!header.tagged("problem") || header.children.size() != 2)
    fail_at(header, "expected (problem NAME)");

  PlanningProblem problem;
  problem.name = require_identifier(header.children[1], "problem name");

  ArityTable arities;
  const SExpr* init_section = nullptr;
  const SExpr* goal_section = nullptr;

  for (std::size_t i = 2; i < root.children.size(); ++i) {
    const SExpr& section = root.children[i];
    if (section.is_atom || section.children.empty() ||
        !section.children.front().is_atom)
      fail_at(section, "expected (:section ...)");
    const std::string& tag = section.children.front().atom;

    if (tag == ":domain") {
      if (section.children.size() != 2)
        fail_at(section, "expected (:domain NAME)");
      problem.domain_name =
          require_identifier(section.children[1], "domain name");
    } else if (tag == ":objects" || tag == ":cities") {
      problem.objects_keyword_cities = tag == ":cities";
      for (std::size_t j = 1; j < section.children.size(); ++j) {
        const std::string& obj =
            require_identifier(section.children[j], "object");
        if (!problem.has_object(obj)) problem.objects.push_back(obj);
      }
      if (problem.objects.empty())
        fail_at(section, "object list must not be empty");
    } else if (tag == ":constraints") {
      for (std::size_t j = 1; j < section.children.size(); ++j) {
        const SExpr& sentence = section.children[j];
        if (sentence.is_atom)
          fail_at(sentence, "each constraint must be parenthesized");
        TemporalConstraint constraint;
        constraint.text = raw_interior(text, sentence);
        if (constraint.text.empty())
          fail_at(sentence, "empty constraint sentence");
        problem.constraints.temporal_constraints.push_back(
            std::move(constraint));
      }
    } else if (tag == ":init") {
      init_section = &section;
    } else if (tag == ":goal") {
      if (section.children.size() != 2)
        fail_at(section, "expected (:goal EXPR)");
      goal_section = &section.children[1];
    } else {
      fail_at(section, "unknown section '" + tag + "'");
    }
  }

  if (problem.objects.empty())
    throw SemanticError("problem '" + problem.name +
                        "' declares no (:objects ...) section");
  if (!init_section)
    throw SemanticError("problem '" + problem.name + "' has no (:init ...)");
  if (!goal_section)
    throw SemanticError("problem '" + problem.name + "' has no (:goal ...)");

  std::vector<GroundAtom> init_atoms;
  for (std::size_t j = 1; j < init_section->children.size(); ++j)
    init_atoms.push_back(
        parse_atom(init_section->children[j], problem, arities));
  problem.init = WorldState(std::move(init_atoms));
  problem.goal = parse_goal(*goal_section, problem, arities);
  return problem;
}

// ---------------------------------------------------------------------------
// Domain parsing

namespace {

Literal parse_literal(const SExpr& node, const std::vector<std::string>& params,
                      ArityTable& arities) {
  const SExpr* body = &node;
  bool positive = true;
  if (node.tagged("not")) {
    if (node.children.size() != 2)
      fail_at(node, "'not' takes exactly one literal");
    body = &node.children[1];
    positive = false;
  }
  if (body->is_atom || body->children.empty())
    fail_at(*body, "expected (predicate term...)");
  Literal lit;
  lit.positive = positive;
  lit.predicate = require_identifier(body->children.front(), "predicate");
  for (std::size_t i = 1; i < body->children.size(); ++i) {
    const SExpr& term = body->children[i];
    if (!term.is_atom) fail_at(term, "expected variable or object");
    if (term.atom.starts_with("?")) {
      if (std::find(params.begin(), params.end(), term.atom) == params.end())
        throw SemanticError("variable '" + term.atom +
                            "' is not a parameter of the action");
      lit.args.push_back(term.atom);
    } else {
      lit.args.push_back(require_identifier(term, "object"));
    }
  }
  arities.check(lit.predicate, lit.args.size(), *body);
  return lit;
}

ActionSchema parse_action(const SExpr& node, ArityTable& arities) {
  ActionSchema schema;
  if (node.children.size() < 2 || !node.children[1].is_atom)
    fail_at(node, "expected (:action NAME ...)");
  schema.name = require_identifier(node.children[1], "action name");

  const SExpr* params_node = nullptr;
  const SExpr* precond_node = nullptr;
  const SExpr* effect_node = nullptr;
  for (std::size_t i = 2; i + 1 < node.children.size(); i += 2) {
    const SExpr& key = node.children[i];
    const SExpr& value = node.children[i + 1];
    if (!key.is_atom) fail_at(key, "expected action keyword");
    if (key.atom == ":parameters")
      params_node = &value;
    else if (key.atom == ":precondition")
      precond_node = &value;
    else if (key.atom == ":effect")
      effect_node = &value;
    else
      fail_at(key, "unknown action keyword '" + key.atom + "'");
  }
  if (!params_node)
    throw SemanticError("action '" + schema.name + "' has no :parameters");
  if (!effect_node)
    throw SemanticError("action '" + schema.name + "' has no :effect");

  // Typed parameters "?x - type" are accepted; types are ignored.
  bool expecting_type = false;
  for (const SExpr& entry : params_node->children) {
    if (!entry.is_atom) fail_at(entry, "expected parameter");
    if (expecting_type) {
      expecting_type = false;
      continue;
    }
    if (entry.atom == "-") {
      expecting_type = true;
      continue;
    }
    if (!entry.atom.starts_with("?"))
      fail_at(entry, "parameters must start with '?'");
    schema.params.push_back(entry.atom);
  }

  if (precond_node) {
    std::vector<const SExpr*> clauses;
    if (precond_node->tagged("and")) {
      for (std::size_t i = 1; i < precond_node->children.size(); ++i)
        clauses.push_back(&precond_node->children[i]);
    } else {
      clauses.push_back(precond_node);
    }
    for (const SExpr* clause : clauses) {
      PrecondClause parsed;
      if (clause->tagged("or")) {
        for (std::size_t i = 1; i < clause->children.size(); ++i)
          parsed.any_of.push_back(
              parse_literal(clause->children[i], schema.params, arities));
        if (parsed.any_of.empty())
          fail_at(*clause, "'or' needs at least one literal");
      } else {
        parsed.any_of.push_back(
            parse_literal(*clause, schema.params, arities));
      }
      schema.preconditions.push_back(std::move(parsed));
    }
  }

  std::vector<const SExpr*> effects;
  if (effect_node->tagged("and")) {
    for (std::size_t i = 1; i < effect_node->children.size(); ++i)
      effects.push_back(&effect_node->children[i]);
  } else {
    effects.push_back(effect_node);
  }
  for (const SExpr* effect : effects) {
    Literal lit = parse_literal(*effect, schema.params, arities);
    bool was_positive = lit.positive;
    lit.positive = true;
    (was_positive ? schema.add_effects : schema.del_effects)
        .push_back(std::move(lit));
  }

  for (const Literal& added : schema.add_effects)
    for (const Literal& deleted : schema.del_effects)
      if (added == deleted)
        throw SemanticError("action '" + schema.name + "' both adds and deletes " +
                            added.to_string());
  return schema;
}

}  // namespace

Domain parse_domain(std::string_view text) {
  SExpr root = parse_sexpr(text);
  if (!root.tagged("define") || root.children.size() < 2)
    fail_at(root, "expected (define (domain ...) ...)");
  const SExpr& header = root.children[1];
  if (!header.tagged("domain") || header.children.size() != 2)
    fail_at(header, "expected (domain NAME)");

  Domain domain;
  domain.name = require_identifier(header.children[1], "domain name");

  ArityTable arities;
  for (std::size_t i = 2; i < root.children.size(); ++i) {
    const SExpr& section = root.children[i];
    if (section.tagged(":action")) {
      ActionSchema schema = parse_action(section, arities);
      for (const auto& existing : domain.schemas)
        if (existing.name == schema.name)
          throw SemanticError("duplicate action '" + schema.name + "'");
      domain.schemas.push_back(std::move(schema));
    } else if (section.tagged(":requirements") ||
               section.tagged(":predicates") || section.tagged(":types")) {
      continue;  // tolerated, unused
    } else {
      fail_at(section, "unknown domain section");
    }
  }
  if (domain.schemas.empty())
    throw SemanticError("domain '" + domain.name + "' defines no actions");
  return domain;
}

namespace {

void seed_goal_arities(const GoalNode& goal, ArityTable& arities) {
  if (goal.kind == GoalNode::Kind::Literal) {
    arities.check(goal.atom.predicate, goal.atom.args.size(), SExpr{});
    return;
  }
  for (const GoalNode& child : goal.children)
    seed_goal_arities(child, arities);
}

}  // namespace

void attach_domain(PlanningProblem& problem, const Domain& domain) {
  ArityTable arities;
  for (const auto& atom : problem.init.atoms())
    arities.check(atom.predicate, atom.args.size(), SExpr{});
  seed_goal_arities(problem.goal, arities);
  for (const auto& schema : domain.schemas) {
    for (const auto& clause : schema.preconditions)
      for (const auto& lit : clause.any_of)
        arities.check(lit.predicate, lit.args.size(), SExpr{});
    for (const auto& lit : schema.add_effects)
      arities.check(lit.predicate, lit.args.size(), SExpr{});
    for (const auto& lit : schema.del_effects)
      arities.check(lit.predicate, lit.args.size(), SExpr{});
  }
  problem.schemas = domain.schemas;
  if (problem.domain_name.empty()) problem.domain_name = domain.name;
}

// ---------------------------------------------------------------------------
// Plan text parsing

namespace {

std::string replace_all(std::string text, std::string_view from,
                        std::string_view to) {
  std::size_t pos = 0;
  while ((pos = text.find(from, pos)) != std::string::npos) {
    text.replace(pos, from.size(), to);
    pos += to.size();
  }
  return text;
}

std::vector<std::string> tokenize_line(std::string_view line) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() &&
           std::isspace(static_cast<unsigned char>(line[i])))
      ++i;
    std::size_t start = i;
    while (i < line.size() &&
           !std::isspace(static_cast<unsigned char>(line[i])))
      ++i;
    if (i > start) tokens.emplace_back(line.substr(start, i - start));
  }
  return tokens;
}

// "N." / "N)" / "N:" prefix; returns the remainder or nullopt.
std::optional<std::string> strip_step_number(const std::string& line) {
  std::size_t i = 0;
  while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i])))
    ++i;
  std::size_t digits = i;
  while (digits < line.size() &&
         std::isdigit(static_cast<unsigned char>(line[digits])))
    ++digits;
  if (digits == i) return std::nullopt;
  if (digits >= line.size()) return std::nullopt;
  char sep = line[digits];
  if (sep != '.' && sep != ')' && sep != ':') return std::nullopt;
  return line.substr(digits + 1);
}

struct StepLine {
  bool arrow = false;
  std::string from, to;              // arrow form
  std::vector<std::string> tokens;   // named form
};

// Accepts numbered "N. action args" lines, numbered arrows, and bare arrow
// lines (the reply style of single-movement-schema domains). Bare prose never
// counts as a step.
std::optional<StepLine> match_step_line(const std::string& raw) {
  std::string line = raw;
  bool numbered = false;
  if (auto rest = strip_step_number(line)) {
    line = *rest;
    numbered = true;
  }
  std::vector<std::string> tokens = tokenize_line(line);
  if (tokens.empty()) return std::nullopt;
  if (tokens.size() == 3 && tokens[1] == "->") {
    if (!is_identifier(tokens[0]) || !is_identifier(tokens[2]))
      return std::nullopt;
    StepLine step;
    step.arrow = true;
    step.from = tokens[0];
    step.to = tokens[2];
    return step;
  }
  if (!numbered || !is_identifier(tokens[0])) return std::nullopt;
  StepLine step;
  step.tokens = std::move(tokens);
  return step;
}

}  // namespace

Plan parse_plan_text(std::string_view text, const PlanningProblem& problem,
                     std::size_t cap) {
  std::string normalized = replace_all(std::string(text), "→", "->");
  normalized = replace_all(std::move(normalized), "\r", "");

  std::vector<std::string> lines;
  std::istringstream stream(normalized);
  for (std::string line; std::getline(stream, line);) lines.push_back(line);

  std::size_t begin = 0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].find("START-PLAN") != std::string::npos) {
      begin = i + 1;
      break;
    }
  }

  std::vector<StepLine> steps;
  bool collecting = false;
  for (std::size_t i = begin; i < lines.size(); ++i) {
    std::optional<StepLine> step = match_step_line(lines[i]);
    if (step) {
      steps.push_back(std::move(*step));
      collecting = true;
    } else if (collecting) {
      break;  // first contiguous run only
    }
  }

  if (steps.empty())
    throw PlanTextError(PlanTextErrorKind::NoPlanFound,
                        "no plan steps found in reply");
  if (steps.size() > cap)
    throw PlanTextError(PlanTextErrorKind::PlanTooLong,
                        "plan exceeds the step cap of " + std::to_string(cap));

  Plan plan;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const StepLine& step = steps[i];
    const std::size_t number = i + 1;
    if (step.arrow) {
      const ActionSchema* schema = problem.unique_binary_schema();
      if (!schema)
        throw PlanTextError(
            PlanTextErrorKind::UnknownAction,
            "step " + std::to_string(number) +
                ": arrow syntax needs exactly one two-parameter action",
            number, step.from + " -> " + step.to);
      plan.steps.push_back({schema->name, {step.from, step.to}});
      continue;
    }
    const std::string& name = step.tokens.front();
    const ActionSchema* schema = problem.find_schema(name);
    if (!schema)
      throw PlanTextError(PlanTextErrorKind::UnknownAction,
                          "step " + std::to_string(number) +
                              ": unknown action '" + name + "'",
                          number, name);
    std::vector<std::string> args(step.tokens.begin() + 1, step.tokens.end());
    if (args.size() != schema->arity())
      throw PlanTextError(PlanTextErrorKind::ArityMismatch,
                          "step " + std::to_string(number) + ": action '" +
                              name + "' takes " +
                              std::to_string(schema->arity()) + " arguments",
                          number, name);
    plan.steps.push_back({name, std::move(args)});
  }
  return plan;
}

// ---------------------------------------------------------------------------
// Goals

GoalNode parse_goal_text(std::string_view text,
                         const PlanningProblem& problem) {
  SExpr expr = parse_sexpr(text);
  ArityTable arities;
  for (const GroundAtom& atom : problem.init.atoms())
    arities.check(atom.predicate, atom.args.size(), expr);
  return parse_goal(expr, problem, arities);
}

bool goal_holds(const WorldState& state, const GoalNode& goal) {
  switch (goal.kind) {
    case GoalNode::Kind::Literal:
      return state.contains(goal.atom) == goal.positive;
    case GoalNode::Kind::Not:
      return !goal_holds(state, goal.children.front());
    case GoalNode::Kind::And:
      return std::all_of(
          goal.children.begin(), goal.children.end(),
          [&](const GoalNode& child) { return goal_holds(state, child); });
    case GoalNode::Kind::Or:
      return std::any_of(
          goal.children.begin(), goal.children.end(),
          [&](const GoalNode& child) { return goal_holds(state, child); });
  }
  return false;
}

std::vector<GoalNode> get_subgoals(const GoalNode& goal) {
  if (goal.kind == GoalNode::Kind::And) return goal.children;
  return {goal};
}

bool uses_arrow_format(const Plan& plan, const PlanningProblem& problem) {
  const ActionSchema* binary = problem.unique_binary_schema();
  if (!binary || plan.empty()) return false;
  return std::all_of(plan.steps.begin(), plan.steps.end(),
                     [&](const GroundAction& step) {
                       return step.schema == binary->name &&
                              step.args.size() == 2;
                     });
}

std::string format_plan(const Plan& plan, const PlanningProblem& problem) {
  std::string out;
  const bool arrows = uses_arrow_format(plan, problem);
  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    if (i) out += '\n';
    const GroundAction& step = plan.steps[i];
    if (arrows)
      out += step.args[0] + " -> " + step.args[1];
    else
      out += std::to_string(i + 1) + ". " + step.to_string();
  }
  return out;
}

}  // namespace planguard
