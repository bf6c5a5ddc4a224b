#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rpn/state_space.hpp"

namespace rpn {

/// One entry of a `reachable` pattern: `count` tokens on the place with the
/// given id (id form), or on places carrying `label` (label form).
struct PatternEntry {
  std::string label;
  std::optional<PlaceId> place;
  TokenCount count = 1;

  friend bool operator==(const PatternEntry&, const PatternEntry&) = default;
};

struct Atom {
  enum class Kind { t_enabled, enabled, reachable };
  Kind kind = Kind::enabled;
  std::vector<PatternEntry> pattern;  // reachable only

  friend bool operator==(const Atom&, const Atom&) = default;
};

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
  enum class Op { atom, truth, falsity, negation, conjunction, disjunction, implication, next, until, release,
                  always, eventually };
  Op op;
  Atom atom;  // Op::atom
  FormulaPtr left;
  FormulaPtr right;

  static FormulaPtr make_atom(Atom a);
  static FormulaPtr constant(bool value);
  static FormulaPtr unary(Op op, FormulaPtr operand);
  static FormulaPtr binary(Op op, FormulaPtr lhs, FormulaPtr rhs);
};

struct FormulaError : Error {
  FormulaError(const std::string& what, std::size_t position);
  std::size_t position;
};

/// Surface syntax: `[]`, `<>`, `~`, `X`, `U`, `R`, `/\`, `\/`, `->`,
/// parentheses, `true`, `false`, `enabled`, `t-enabled`,
/// `reachable(A@3 ; A@4)`, `reachable(A ; A)`, `reachable(p("A" | 3 | 2147483647))`.
/// Binding strength: unary > U, R > /\ > \/ > ->; U, R and -> associate to the right.
FormulaPtr parse_formula(std::string_view text);

std::string to_string(const Formula& f);
std::string to_string(const Atom& a);

/// Nesting depth of operators (atoms and constants have depth 0).
std::size_t depth(const Formula& f);

/// Distinct atoms in first-occurrence order.
std::vector<Atom> collect_atoms(const Formula& f);

/// Rejects `reachable` labels that occur neither in the net nor in any rule.
void check_atom_labels(const Formula& f, const Configuration& initial);

bool eval_atom(const Configuration& config, const Atom& atom, const Semantics& sem = {});

/// Explicit Kripke structure handed to the automaton-based checker: every
/// state must have at least one successor.
struct KripkeStructure {
  std::size_t initial = 0;
  std::vector<std::vector<std::size_t>> successors;
  /// labels[state][atom index]
  std::vector<std::vector<bool>> labels;
};

/// A step of an index-level lasso: the state and the index of the edge taken
/// in KripkeStructure::successors[state].
struct PathStep {
  std::size_t state;
  std::size_t edge;
};

struct IndexLasso {
  std::vector<PathStep> prefix;
  std::vector<PathStep> cycle;
};

/// Searches the product of `k` with the Büchi automaton of ~f for an
/// accepting lasso. `atom_index` maps each atom of `f` to a label column.
std::optional<IndexLasso> find_violation(const KripkeStructure& k, const Formula& f,
                                         const std::function<std::size_t(const Atom&)>& atom_index);

struct LassoStep {
  Configuration config;
  ActionLabel action;
};

struct Lasso {
  std::vector<LassoStep> prefix;
  /// Non-empty; the last action leads back to cycle.front().
  std::vector<LassoStep> cycle;
  bool deadlock_tail = false;
};

struct Verdict {
  bool holds = true;
  std::optional<Lasso> counterexample;
  std::size_t states = 0;
  std::size_t edges = 0;
};

struct StateSpaceExceeded : Error {
  explicit StateSpaceExceeded(std::size_t explored);
  std::size_t explored;
};

/// Checks `f` on every infinite path from `initial`; deadlocks loop on
/// themselves. Refuses truncated state spaces.
Verdict model_check(const Configuration& initial, const Formula& f, const ExploreOptions& options = {});

/// Same, over an already explored graph.
Verdict model_check(const StateGraph& graph, const Formula& f, const Semantics& sem = {});

/// Replays the lasso's actions from `initial` and checks that every listed
/// state is reproduced (by canonical key) and that the cycle closes.
bool replay_lasso(const Configuration& initial, const Lasso& lasso, const ExploreOptions& options = {});

}  // namespace rpn
