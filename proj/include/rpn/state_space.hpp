#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "rpn/firing.hpp"
#include "rpn/rules.hpp"

namespace rpn {

/// Label of a Kripke edge: a firing step, a rule application, or the
/// implicit self-loop that totalizes a deadlock.
struct ActionLabel {
  enum class Kind { fire, rule, deadlock };
  Kind kind = Kind::fire;
  TransitionId transition{};  // fire
  std::string rule;           // rule
  std::string match;          // rule: Match::digest()

  static ActionLabel fire(TransitionId t) { return {Kind::fire, t, {}, {}}; }
  static ActionLabel apply(const Match& m);
  static ActionLabel deadlock_loop() { return {Kind::deadlock, {}, {}, {}}; }

  std::string to_string() const;

  friend bool operator==(const ActionLabel&, const ActionLabel&) = default;
};

struct Successor {
  ActionLabel action;
  Configuration config;
};

/// One successor per activated transition (ascending id), then one per
/// applicable match of each rule (rule-name order, then match order).
std::vector<Successor> successors(const Configuration& config, const Semantics& sem = {});

enum class StateIdentity {
  /// Full term identity: net, rules, max id, step size, both pools.
  term,
  /// Net and rules only, after canonical relabeling of ids.
  semantic,
};

std::string canonical_key(const Configuration& config, StateIdentity identity = StateIdentity::term);

/// Copy of `net` with ids renumbered 1..n (places, then transitions) so that
/// isomorphic nets come out equal. Ids are ordered by iterated refinement of
/// label/capacity/token/arc colours; remaining ties are broken by trying each
/// candidate and keeping the smallest encoding, within a fixed search budget.
PetriNet canonical_relabel(const PetriNet& net);

/// 64-bit FNV-1a of a key, rendered as 16 hex digits.
std::string key_digest(const std::string& key);

struct ExploreOptions {
  std::size_t max_states = 1'000'000;
  std::optional<std::size_t> max_depth;
  Semantics semantics;
  StateIdentity identity = StateIdentity::term;
  /// Threads used to expand a BFS layer; the graph does not depend on it.
  unsigned workers = 1;
};

struct Edge {
  ActionLabel action;
  std::size_t target;
};

/// Explicit Kripke structure over Configurations. State 0 is the initial one.
struct StateGraph {
  std::vector<Configuration> states;
  std::vector<std::string> keys;
  std::vector<std::vector<Edge>> edges;
  std::vector<std::size_t> depth;
  std::vector<bool> deadlock;
  std::unordered_map<std::string, std::size_t> index;
  StateIdentity identity = StateIdentity::term;
  /// A state or depth limit cut exploration short.
  bool truncated = false;

  std::size_t size() const { return states.size(); }
  std::size_t edge_count() const;
  std::size_t deadlock_count() const;
  std::optional<std::size_t> find(const Configuration& c) const;
};

/// Breadth-first construction from `initial`. Deadlock states keep an empty
/// edge list; consumers add the implicit self-loop.
StateGraph explore(const Configuration& initial, const ExploreOptions& options = {});

/// Line-oriented dump: header, one `state` line per state, one `edge` line per edge.
void write_text(std::ostream& os, const StateGraph& graph);
void write_dot(std::ostream& os, const StateGraph& graph);

/// Compact marking summary such as "A@3 A@4" (ascending place id).
std::string marking_summary(const PetriNet& net);

}  // namespace rpn
