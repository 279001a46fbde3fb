#include "planguard/ltl.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <map>
#include <set>
#include <unordered_map>

namespace planguard {

namespace {

LtlPtr make(LtlKind kind, std::string prop, LtlPtr left, LtlPtr right) {
  auto node = std::make_shared<Ltl>();
  node->kind = kind;
  node->prop = std::move(prop);
  node->left = std::move(left);
  node->right = std::move(right);
  return node;
}

const LtlPtr& shared_true() {
  static const LtlPtr t = make(LtlKind::True, {}, nullptr, nullptr);
  return t;
}

const LtlPtr& shared_false() {
  static const LtlPtr f = make(LtlKind::False, {}, nullptr, nullptr);
  return f;
}

}  // namespace

LtlPtr Ltl::truth() { return shared_true(); }
LtlPtr Ltl::falsity() { return shared_false(); }
LtlPtr Ltl::atom(std::string name) {
  return make(LtlKind::Atom, std::move(name), nullptr, nullptr);
}
LtlPtr Ltl::negate(LtlPtr f) {
  return make(LtlKind::Not, {}, std::move(f), nullptr);
}
LtlPtr Ltl::conj(LtlPtr f, LtlPtr g) {
  return make(LtlKind::And, {}, std::move(f), std::move(g));
}
LtlPtr Ltl::disj(LtlPtr f, LtlPtr g) {
  return make(LtlKind::Or, {}, std::move(f), std::move(g));
}
LtlPtr Ltl::implies(LtlPtr f, LtlPtr g) {
  return make(LtlKind::Implies, {}, std::move(f), std::move(g));
}
LtlPtr Ltl::next(LtlPtr f) {
  return make(LtlKind::Next, {}, std::move(f), nullptr);
}
LtlPtr Ltl::globally(LtlPtr f) {
  return make(LtlKind::Globally, {}, std::move(f), nullptr);
}
LtlPtr Ltl::finally(LtlPtr f) {
  return make(LtlKind::Finally, {}, std::move(f), nullptr);
}
LtlPtr Ltl::until(LtlPtr f, LtlPtr g) {
  return make(LtlKind::Until, {}, std::move(f), std::move(g));
}

Valuation::Valuation(std::initializer_list<std::string> props)
    : Valuation(std::vector<std::string>(props)) {}

Valuation::Valuation(std::vector<std::string> props)
    : true_props(std::move(props)) {
  std::sort(true_props.begin(), true_props.end());
  true_props.erase(std::unique(true_props.begin(), true_props.end()),
                   true_props.end());
}

bool Valuation::contains(std::string_view prop) const {
  return std::binary_search(true_props.begin(), true_props.end(), prop);
}

std::string Valuation::to_string() const {
  std::string out = "{";
  for (std::size_t i = 0; i < true_props.size(); ++i) {
    if (i) out += ' ';
    out += true_props[i];
  }
  out += '}';
  return out;
}

std::string to_string(const Ltl& f) {
  switch (f.kind) {
    case LtlKind::True:
      return "true";
    case LtlKind::False:
      return "false";
    case LtlKind::Atom:
      return f.prop;
    case LtlKind::Not: {
      const Ltl& c = *f.left;
      if (c.kind == LtlKind::Atom || c.kind == LtlKind::True ||
          c.kind == LtlKind::False)
        return "!" + to_string(c);
      return "!(" + to_string(c) + ")";
    }
    case LtlKind::Next:
      return "X(" + to_string(*f.left) + ")";
    case LtlKind::Globally:
      return "G(" + to_string(*f.left) + ")";
    case LtlKind::Finally:
      return "F(" + to_string(*f.left) + ")";
    case LtlKind::And:
      return "(" + to_string(*f.left) + " & " + to_string(*f.right) + ")";
    case LtlKind::Or:
      return "(" + to_string(*f.left) + " | " + to_string(*f.right) + ")";
    case LtlKind::Implies:
      return "(" + to_string(*f.left) + " -> " + to_string(*f.right) + ")";
    case LtlKind::Until:
      return "(" + to_string(*f.left) + " U " + to_string(*f.right) + ")";
  }
  return {};
}

int compare(const Ltl& a, const Ltl& b) {
  if (a.kind != b.kind)
    return static_cast<int>(a.kind) < static_cast<int>(b.kind) ? -1 : 1;
  if (a.kind == LtlKind::Atom) return a.prop.compare(b.prop);
  if (a.left) {
    if (int c = compare(*a.left, *b.left)) return c;
  }
  if (a.right) {
    if (int c = compare(*a.right, *b.right)) return c;
  }
  return 0;
}

bool equal(const LtlPtr& a, const LtlPtr& b) {
  if (a == b) return true;
  return compare(*a, *b) == 0;
}

namespace {

void collect_props(const Ltl& f, std::set<std::string>& out) {
  if (f.kind == LtlKind::Atom) out.insert(f.prop);
  if (f.left) collect_props(*f.left, out);
  if (f.right) collect_props(*f.right, out);
}

}  // namespace

std::vector<std::string> propositions(const LtlPtr& f) {
  std::set<std::string> props;
  collect_props(*f, props);
  return {props.begin(), props.end()};
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

struct LtlToken {
  enum class Kind { LParen, RParen, Not, And, Or, Implies, Ident, End };
  Kind kind;
  std::string text;
  std::size_t column;  // 1-based
};

class LtlLexer {
 public:
  explicit LtlLexer(std::string_view text) : text_(text) { advance(); }

  const LtlToken& peek() const { return current_; }

  LtlToken take() {
    LtlToken t = current_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
    current_.column = pos_ + 1;
    if (pos_ >= text_.size()) {
      current_ = {LtlToken::Kind::End, "", pos_ + 1};
      return;
    }
    auto starts_with = [&](std::string_view s) {
      return text_.substr(pos_).starts_with(s);
    };
    struct Sym {
      std::string_view spelling;
      LtlToken::Kind kind;
    };
    static constexpr Sym symbols[] = {
        {"(", LtlToken::Kind::LParen},   {")", LtlToken::Kind::RParen},
        {"->", LtlToken::Kind::Implies}, {"→", LtlToken::Kind::Implies},
        {"!", LtlToken::Kind::Not},      {"¬", LtlToken::Kind::Not},
        {"&", LtlToken::Kind::And},      {"∧", LtlToken::Kind::And},
        {"|", LtlToken::Kind::Or},       {"∨", LtlToken::Kind::Or},
    };
    for (const Sym& s : symbols) {
      if (starts_with(s.spelling)) {
        current_ = {s.kind, std::string(s.spelling), pos_ + 1};
        pos_ += s.spelling.size();
        return;
      }
    }
    char c = text_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < text_.size()) {
        char a = text_[pos_];
        if (std::isalnum(static_cast<unsigned char>(a)) || a == '_' ||
            a == '-') {
          // '-' only joins identifiers when not starting "->".
          if (a == '-' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '>')
            break;
          ++pos_;
        } else {
          break;
        }
      }
      current_ = {LtlToken::Kind::Ident,
                  std::string(text_.substr(start, pos_ - start)), start + 1};
      return;
    }
    throw SyntaxError("unexpected character in formula", 1, pos_ + 1);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  LtlToken current_{LtlToken::Kind::End, "", 1};
};

class LtlParser {
 public:
  explicit LtlParser(std::string_view text) : lex_(text) {}

  LtlPtr parse() {
    LtlPtr f = parse_implies();
    const LtlToken& t = lex_.peek();
    if (t.kind != LtlToken::Kind::End)
      throw SyntaxError("unexpected token '" + t.text + "'", 1, t.column);
    return f;
  }

 private:
  LtlPtr parse_implies() {
    LtlPtr lhs = parse_or();
    if (lex_.peek().kind == LtlToken::Kind::Implies) {
      lex_.take();
      return Ltl::implies(std::move(lhs), parse_implies());
    }
    return lhs;
  }

  LtlPtr parse_or() {
    LtlPtr lhs = parse_and();
    while (lex_.peek().kind == LtlToken::Kind::Or) {
      lex_.take();
      lhs = Ltl::disj(std::move(lhs), parse_and());
    }
    return lhs;
  }

  LtlPtr parse_and() {
    LtlPtr lhs = parse_until();
    while (lex_.peek().kind == LtlToken::Kind::And) {
      lex_.take();
      lhs = Ltl::conj(std::move(lhs), parse_until());
    }
    return lhs;
  }

  LtlPtr parse_until() {
    LtlPtr lhs = parse_unary();
    if (lex_.peek().kind == LtlToken::Kind::Ident && lex_.peek().text == "U") {
      lex_.take();
      return Ltl::until(std::move(lhs), parse_until());
    }
    return lhs;
  }

  LtlPtr parse_unary() {
    const LtlToken& t = lex_.peek();
    if (t.kind == LtlToken::Kind::Not) {
      lex_.take();
      return Ltl::negate(parse_unary());
    }
    if (t.kind == LtlToken::Kind::Ident &&
        (t.text == "G" || t.text == "F" || t.text == "X")) {
      std::string op = lex_.take().text;
      LtlPtr sub = parse_unary();
      if (op == "G") return Ltl::globally(std::move(sub));
      if (op == "F") return Ltl::finally(std::move(sub));
      return Ltl::next(std::move(sub));
    }
    return parse_primary();
  }

  LtlPtr parse_primary() {
    LtlToken t = lex_.take();
    switch (t.kind) {
      case LtlToken::Kind::LParen: {
        LtlPtr inner = parse_implies();
        LtlToken close = lex_.take();
        if (close.kind != LtlToken::Kind::RParen)
          throw SyntaxError("expected ')'", 1, close.column);
        return inner;
      }
      case LtlToken::Kind::Ident:
        if (t.text == "true") return Ltl::truth();
        if (t.text == "false") return Ltl::falsity();
        if (t.text == "U")
          throw SyntaxError("'U' needs a left operand", 1, t.column);
        return Ltl::atom(t.text);
      case LtlToken::Kind::End:
        throw SyntaxError("unexpected end of input", 1, t.column);
      default:
        throw SyntaxError("unexpected token '" + t.text + "'", 1, t.column);
    }
  }

  LtlLexer lex_;
};

}  // namespace

LtlPtr parse_ltl(std::string_view text) { return LtlParser(text).parse(); }

// ---------------------------------------------------------------------------
// Canonicalization

namespace {

struct LtlPtrLess {
  bool operator()(const LtlPtr& a, const LtlPtr& b) const {
    return compare(*a, *b) < 0;
  }
};

void flatten(LtlKind kind, const LtlPtr& f, std::vector<LtlPtr>& out) {
  if (f->kind == kind) {
    flatten(kind, f->left, out);
    flatten(kind, f->right, out);
  } else {
    out.push_back(f);
  }
}

// Rebuilds a right-nested chain from sorted, deduplicated operands.
LtlPtr fold(LtlKind kind, std::vector<LtlPtr> parts) {
  LtlPtr acc = parts.back();
  for (std::size_t i = parts.size() - 1; i-- > 0;) {
    acc = kind == LtlKind::And ? Ltl::conj(parts[i], std::move(acc))
                               : Ltl::disj(parts[i], std::move(acc));
  }
  return acc;
}

LtlPtr canonical_nary(LtlKind kind, const LtlPtr& left, const LtlPtr& right) {
  const LtlPtr unit = kind == LtlKind::And ? Ltl::truth() : Ltl::falsity();
  const LtlPtr zero = kind == LtlKind::And ? Ltl::falsity() : Ltl::truth();

  std::vector<LtlPtr> parts;
  flatten(kind, left, parts);
  flatten(kind, right, parts);

  std::vector<LtlPtr> kept;
  for (const LtlPtr& p : parts) {
    if (p->kind == zero->kind) return zero;
    if (p->kind == unit->kind) continue;
    kept.push_back(p);
  }
  if (kept.empty()) return unit;
  std::sort(kept.begin(), kept.end(), LtlPtrLess{});
  kept.erase(std::unique(kept.begin(), kept.end(),
                         [](const LtlPtr& a, const LtlPtr& b) {
                           return compare(*a, *b) == 0;
                         }),
             kept.end());
  if (kept.size() == 1) return kept.front();
  return fold(kind, std::move(kept));
}

}  // namespace

LtlPtr canonical(const LtlPtr& f) {
  switch (f->kind) {
    case LtlKind::True:
    case LtlKind::False:
    case LtlKind::Atom:
      return f;
    case LtlKind::Not: {
      LtlPtr c = canonical(f->left);
      if (c->kind == LtlKind::True) return Ltl::falsity();
      if (c->kind == LtlKind::False) return Ltl::truth();
      if (c->kind == LtlKind::Not) return c->left;
      return Ltl::negate(std::move(c));
    }
    case LtlKind::And:
      return canonical_nary(LtlKind::And, canonical(f->left),
                            canonical(f->right));
    case LtlKind::Or:
      return canonical_nary(LtlKind::Or, canonical(f->left),
                            canonical(f->right));
    case LtlKind::Implies:
      return canonical(Ltl::disj(Ltl::negate(f->left), f->right));
    case LtlKind::Next: {
      LtlPtr c = canonical(f->left);
      // X false can never be met, even mid-trace.
      if (c->kind == LtlKind::False) return Ltl::falsity();
      return Ltl::next(std::move(c));
    }
    case LtlKind::Globally: {
      LtlPtr c = canonical(f->left);
      if (c->kind == LtlKind::True) return Ltl::truth();
      if (c->kind == LtlKind::False) return Ltl::falsity();
      if (c->kind == LtlKind::Globally) return c;
      return Ltl::globally(std::move(c));
    }
    case LtlKind::Finally: {
      LtlPtr c = canonical(f->left);
      if (c->kind == LtlKind::True) return Ltl::truth();
      if (c->kind == LtlKind::False) return Ltl::falsity();
      if (c->kind == LtlKind::Finally) return c;
      return Ltl::finally(std::move(c));
    }
    case LtlKind::Until: {
      LtlPtr cl = canonical(f->left);
      LtlPtr cr = canonical(f->right);
      if (cr->kind == LtlKind::True) return Ltl::truth();
      if (cr->kind == LtlKind::False) return Ltl::falsity();
      if (cl->kind == LtlKind::False) return cr;
      if (compare(*cl, *cr) == 0) return cr;
      if (cl->kind == LtlKind::True) return canonical(Ltl::finally(cr));
      return Ltl::until(std::move(cl), std::move(cr));
    }
  }
  return f;
}

// ---------------------------------------------------------------------------
// Finite-trace evaluation

namespace {

// Memoized per (node, position); handles shared subterms.
class TraceEvaluator {
 public:
  explicit TraceEvaluator(std::span<const Valuation> steps) : steps_(steps) {}

  bool eval(const Ltl* f, std::size_t i) {
    auto& slots = memo_[f];
    if (slots.empty()) slots.assign(steps_.size(), -1);
    if (slots[i] >= 0) return slots[i] != 0;
    bool value = false;
    const std::size_t n = steps_.size();
    switch (f->kind) {
      case LtlKind::True:
        value = true;
        break;
      case LtlKind::False:
        value = false;
        break;
      case LtlKind::Atom:
        value = steps_[i].contains(f->prop);
        break;
      case LtlKind::Not:
        value = !eval(f->left.get(), i);
        break;
      case LtlKind::And:
        value = eval(f->left.get(), i) && eval(f->right.get(), i);
        break;
      case LtlKind::Or:
        value = eval(f->left.get(), i) || eval(f->right.get(), i);
        break;
      case LtlKind::Implies:
        value = !eval(f->left.get(), i) || eval(f->right.get(), i);
        break;
      case LtlKind::Next:
        value = i + 1 < n && eval(f->left.get(), i + 1);
        break;
      case LtlKind::Globally:
        value = eval(f->left.get(), i) && (i + 1 >= n || eval(f, i + 1));
        break;
      case LtlKind::Finally:
        value = eval(f->left.get(), i) || (i + 1 < n && eval(f, i + 1));
        break;
      case LtlKind::Until:
        value = eval(f->right.get(), i) ||
                (eval(f->left.get(), i) && i + 1 < n && eval(f, i + 1));
        break;
    }
    slots[i] = value ? 1 : 0;
    return value;
  }

 private:
  std::span<const Valuation> steps_;
  std::unordered_map<const Ltl*, std::vector<signed char>> memo_;
};

}  // namespace

bool evaluate_trace(const LtlPtr& f, std::span<const Valuation> steps) {
  if (steps.empty())
    throw std::invalid_argument("trace must contain at least one valuation");
  TraceEvaluator ev(steps);
  return ev.eval(f.get(), 0);
}

bool evaluate_trace(const LtlPtr& f, const Trace& t) {
  return evaluate_trace(f, std::span<const Valuation>(t.steps));
}

// ---------------------------------------------------------------------------
// Progression

namespace {

LtlPtr progress_raw(const LtlPtr& f, const Valuation& v) {
  switch (f->kind) {
    case LtlKind::True:
    case LtlKind::False:
      return f;
    case LtlKind::Atom:
      return v.contains(f->prop) ? Ltl::truth() : Ltl::falsity();
    case LtlKind::Not:
      return Ltl::negate(progress_raw(f->left, v));
    case LtlKind::And:
      return Ltl::conj(progress_raw(f->left, v), progress_raw(f->right, v));
    case LtlKind::Or:
      return Ltl::disj(progress_raw(f->left, v), progress_raw(f->right, v));
    case LtlKind::Implies:
      return Ltl::implies(progress_raw(f->left, v), progress_raw(f->right, v));
    case LtlKind::Next:
      return f->left;
    case LtlKind::Globally:
      return Ltl::conj(progress_raw(f->left, v), f);
    case LtlKind::Finally:
      return Ltl::disj(progress_raw(f->left, v), f);
    case LtlKind::Until:
      return Ltl::disj(progress_raw(f->right, v),
                       Ltl::conj(progress_raw(f->left, v), f));
  }
  return f;
}

}  // namespace

LtlPtr progress(const LtlPtr& f, const Valuation& v) {
  return canonical(progress_raw(f, v));
}

bool final_position_eval(const LtlPtr& f, const Valuation& v) {
  switch (f->kind) {
    case LtlKind::True:
      return true;
    case LtlKind::False:
      return false;
    case LtlKind::Atom:
      return v.contains(f->prop);
    case LtlKind::Not:
      return !final_position_eval(f->left, v);
    case LtlKind::And:
      return final_position_eval(f->left, v) &&
             final_position_eval(f->right, v);
    case LtlKind::Or:
      return final_position_eval(f->left, v) ||
             final_position_eval(f->right, v);
    case LtlKind::Implies:
      return !final_position_eval(f->left, v) ||
             final_position_eval(f->right, v);
    case LtlKind::Next:
      return false;
    case LtlKind::Globally:
    case LtlKind::Finally:
      return final_position_eval(f->left, v);
    case LtlKind::Until:
      return final_position_eval(f->right, v);
  }
  return false;
}

bool empty_trace_eval(const LtlPtr& f) {
  switch (f->kind) {
    case LtlKind::True:
      return true;
    case LtlKind::False:
    case LtlKind::Atom:
    case LtlKind::Next:
    case LtlKind::Finally:
    case LtlKind::Until:
      return false;
    case LtlKind::Not:
      return !empty_trace_eval(f->left);
    case LtlKind::And:
      return empty_trace_eval(f->left) && empty_trace_eval(f->right);
    case LtlKind::Or:
      return empty_trace_eval(f->left) || empty_trace_eval(f->right);
    case LtlKind::Implies:
      return !empty_trace_eval(f->left) || empty_trace_eval(f->right);
    case LtlKind::Globally:
      return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Automaton compilation

std::size_t LtlAutomaton::valuation_mask(const Valuation& v) const {
  std::size_t mask = 0;
  for (std::size_t i = 0; i < props.size(); ++i)
    if (v.contains(props[i])) mask |= std::size_t{1} << i;
  return mask;
}

std::size_t LtlAutomaton::next_state(std::size_t state,
                                     const Valuation& v) const {
  return transitions[state][valuation_mask(v)];
}

bool LtlAutomaton::rejecting_sink(std::size_t state) const {
  const State& s = states[state];
  return s.formula->kind == LtlKind::False && !s.accepting;
}

std::string LtlAutomaton::to_table() const {
  std::string out;
  out += "props:";
  for (const auto& p : props) out += " " + p;
  out += "\ninitial: q" + std::to_string(initial) + "\naccepting:";
  for (std::size_t i = 0; i < states.size(); ++i)
    if (states[i].accepting) out += " q" + std::to_string(i);
  out += "\n";
  for (std::size_t i = 0; i < states.size(); ++i)
    out += "state q" + std::to_string(i) + ": " + states[i].label + "\n";
  const std::size_t alphabet = std::size_t{1} << props.size();
  for (std::size_t i = 0; i < states.size(); ++i) {
    for (std::size_t mask = 0; mask < alphabet; ++mask) {
      out += "q" + std::to_string(i) + " {";
      bool first = true;
      for (std::size_t b = 0; b < props.size(); ++b) {
        if (mask & (std::size_t{1} << b)) {
          if (!first) out += ' ';
          out += props[b];
          first = false;
        }
      }
      out += "} -> q" + std::to_string(transitions[i][mask]) + "\n";
    }
  }
  return out;
}

LtlAutomaton compile_automaton(const LtlPtr& f, std::size_t max_states) {
  LtlAutomaton a;
  a.props = propositions(f);
  const std::size_t alphabet = std::size_t{1} << a.props.size();

  std::vector<Valuation> letters(alphabet);
  for (std::size_t mask = 0; mask < alphabet; ++mask) {
    std::vector<std::string> props;
    for (std::size_t b = 0; b < a.props.size(); ++b)
      if (mask & (std::size_t{1} << b)) props.push_back(a.props[b]);
    letters[mask] = Valuation(std::move(props));
  }

  std::map<std::pair<std::string, bool>, std::size_t> index;
  auto intern = [&](LtlPtr formula, bool accepting) {
    std::string label = to_string(formula);
    auto key = std::make_pair(label, accepting);
    auto it = index.find(key);
    if (it != index.end()) return it->second;
    if (a.states.size() >= max_states)
      throw StateExplosion("automaton exceeds " + std::to_string(max_states) +
                           " states for " + to_string(f));
    std::size_t id = a.states.size();
    a.states.push_back({std::move(formula), std::move(label), accepting});
    index.emplace(std::move(key), id);
    return id;
  };

  LtlPtr root = canonical(f);
  a.initial = intern(root, empty_trace_eval(root));

  std::deque<std::size_t> todo{a.initial};
  while (!todo.empty()) {
    std::size_t id = todo.front();
    todo.pop_front();
    if (a.transitions.size() <= id) a.transitions.resize(a.states.size());
    if (!a.transitions[id].empty()) continue;
    a.transitions[id].resize(alphabet);
    for (std::size_t mask = 0; mask < alphabet; ++mask) {
      LtlPtr src = a.states[id].formula;
      LtlPtr residual = progress(src, letters[mask]);
      bool accepting = final_position_eval(src, letters[mask]);
      std::size_t succ = intern(std::move(residual), accepting);
      if (a.transitions.size() <= succ) a.transitions.resize(a.states.size());
      a.transitions[id][mask] = static_cast<std::uint32_t>(succ);
      if (a.transitions[succ].empty()) todo.push_back(succ);
    }
  }
  return a;
}

AutomatonRun run_automaton(const LtlAutomaton& a,
                           std::span<const Valuation> steps) {
  if (steps.empty())
    throw std::invalid_argument("trace must contain at least one valuation");
  AutomatonRun run;
  std::size_t state = a.initial;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    state = a.next_state(state, steps[i]);
    if (!run.rejected_at && a.rejecting_sink(state)) run.rejected_at = i;
  }
  run.accepted = a.states[state].accepting;
  return run;
}

bool accepts(const LtlAutomaton& a, const Trace& t) {
  return run_automaton(a, t.steps).accepted;
}

}  // namespace planguard
