#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "planguard/sexpr.hpp"  // SyntaxError

namespace planguard {

enum class LtlKind {
  True,
  False,
  Atom,
  Not,
  And,
  Or,
  Implies,
  Next,
  Globally,
  Finally,
  Until,
};

struct Ltl;
using LtlPtr = std::shared_ptr<const Ltl>;

// Immutable formula node. Binary nodes use (left, right); unary use left.
struct Ltl {
  LtlKind kind;
  std::string prop;  // Atom only
  LtlPtr left;
  LtlPtr right;

  static LtlPtr truth();
  static LtlPtr falsity();
  static LtlPtr atom(std::string name);
  static LtlPtr negate(LtlPtr f);
  static LtlPtr conj(LtlPtr f, LtlPtr g);
  static LtlPtr disj(LtlPtr f, LtlPtr g);
  static LtlPtr implies(LtlPtr f, LtlPtr g);
  static LtlPtr next(LtlPtr f);
  static LtlPtr globally(LtlPtr f);
  static LtlPtr finally(LtlPtr f);
  static LtlPtr until(LtlPtr f, LtlPtr g);
};

// Truth assignment for one trace position. Extra propositions beyond a
// formula's universe are ignored everywhere.
struct Valuation {
  std::vector<std::string> true_props;  // sorted, unique

  Valuation() = default;
  Valuation(std::initializer_list<std::string> props);
  explicit Valuation(std::vector<std::string> props);
  bool contains(std::string_view prop) const;
  bool operator==(const Valuation&) const = default;
  std::string to_string() const;  // "{a b}"
};

// Finite, non-empty sequence of valuations.
struct Trace {
  std::vector<Valuation> steps;
};

std::string to_string(const Ltl& f);
inline std::string to_string(const LtlPtr& f) { return to_string(*f); }

// Total structural order; drives canonical argument sorting.
int compare(const Ltl& a, const Ltl& b);
bool equal(const LtlPtr& a, const LtlPtr& b);

// Sorted, unique atomic propositions of f.
std::vector<std::string> propositions(const LtlPtr& f);

// Syntax: unary (! G F X) > U (right-assoc) > & > | > -> (right-assoc).
// ASCII aliases ! & | -> and the Unicode forms are both accepted.
LtlPtr parse_ltl(std::string_view text);

// Boolean simplification: constant folding, double negation, idempotence,
// flattening and commutative argument sorting for & and |, and the Until
// identities (f U true = true, false U g = g, true U g = F g, f U f = f).
LtlPtr canonical(const LtlPtr& f);

// Finite-trace semantics with strong Next. Throws std::invalid_argument on
// an empty trace.
bool evaluate_trace(const LtlPtr& f, const Trace& t);
bool evaluate_trace(const LtlPtr& f, std::span<const Valuation> steps);

// Canonical residual f' with evaluate(f, v.t) == evaluate(f', t) for every
// non-empty continuation t.
LtlPtr progress(const LtlPtr& f, const Valuation& v);

// Single-position evaluation: X f is false, G f = f, F f = f, f U g = g.
bool final_position_eval(const LtlPtr& f, const Valuation& v);

// Zero-position evaluation: atoms, X, F and U are false, G is vacuously true.
bool empty_trace_eval(const LtlPtr& f);

class StateExplosion : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kDefaultAutomatonStateBound = 10000;

// Deterministic, total finite-trace acceptor built by iterated progression.
// Each state pairs a canonical residual formula with the end-of-trace verdict
// computed while entering it; acceptance after consuming a whole trace is
// that stored verdict.
struct LtlAutomaton {
  struct State {
    LtlPtr formula;
    std::string label;  // canonical print of formula
    bool accepting;
  };

  std::vector<std::string> props;  // ordered proposition universe
  std::vector<State> states;
  std::size_t initial = 0;
  // transitions[state][valuation mask over props] -> state
  std::vector<std::vector<std::uint32_t>> transitions;

  std::size_t valuation_mask(const Valuation& v) const;
  std::size_t next_state(std::size_t state, const Valuation& v) const;
  // Definitive rejection: no extension of the consumed prefix is accepted.
  bool rejecting_sink(std::size_t state) const;
  std::string to_table() const;
};

LtlAutomaton compile_automaton(
    const LtlPtr& f, std::size_t max_states = kDefaultAutomatonStateBound);

bool accepts(const LtlAutomaton& a, const Trace& t);

struct AutomatonRun {
  bool accepted = false;
  // Index (0-based, into the trace) of the valuation whose consumption first
  // entered a rejecting sink, if any.
  std::optional<std::size_t> rejected_at;
};

AutomatonRun run_automaton(const LtlAutomaton& a, std::span<const Valuation> steps);

}  // namespace planguard
