#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "rpn/net.hpp"

namespace rpn {

/// A DPO rule (L <- K -> R). K is implicit: an element whose rule-local id
/// occurs in both `lhs` and `rhs` is preserved, lhs-only ids are deleted and
/// rhs-only ids are created.
struct Rule {
  std::string name;
  PetriNet lhs;
  PetriNet rhs;

  std::vector<PlaceId> deleted_places() const;
  std::vector<PlaceId> created_places() const;
  std::vector<TransitionId> deleted_transitions() const;
  std::vector<TransitionId> created_transitions() const;

  friend bool operator==(const Rule&, const Rule&) = default;
};

/// Reasons a rule's preserved/deleted/created split is contradictory. Empty
/// means the rule is well formed.
std::vector<std::string> identification_problems(const Rule& rule);

/// True iff no element is required to be both deleted and created.
inline bool identification_ok(const Rule& rule) { return identification_problems(rule).empty(); }

/// Injective, label/capacity/arc/marking preserving embedding of rule.lhs.
struct Match {
  const Rule* rule = nullptr;
  std::map<PlaceId, PlaceId> place_map;
  std::map<TransitionId, TransitionId> transition_map;

  /// Stable textual form, e.g. "17->3,20->2;24->7".
  std::string digest() const;

  friend bool operator==(const Match& a, const Match& b) {
    return a.rule == b.rule && a.place_map == b.place_map && a.transition_map == b.transition_map;
  }
};

/// All embeddings of rule.lhs into `net`, ordered lexicographically by the
/// host ids of (transitions, places) in ascending rule-id order. Gluing is
/// not checked here.
std::vector<Match> find_matches(const PetriNet& net, const Rule& rule);

/// Every deleted place's image has arcs only to images of deleted transitions.
bool dangling_ok(const PetriNet& net, const Match& match);

/// Every deleted place holds exactly the tokens the rule's lhs puts there.
bool deleted_marking_ok(const PetriNet& net, const Match& match);

/// Ordered list of recyclable ids for one element kind.
class IdPool {
 public:
  enum class Kind { place, transition };

  explicit IdPool(Kind kind = Kind::place, std::vector<IdValue> ids = {});

  Kind kind() const { return kind_; }
  const std::vector<IdValue>& available() const { return ids_; }
  bool empty() const { return ids_.empty(); }
  bool contains(IdValue id) const;

  friend bool operator==(const IdPool&, const IdPool&) = default;

 private:
  Kind kind_;
  std::vector<IdValue> ids_;
};

struct PoolAcquisition {
  IdValue id;
  IdPool pool;
  IdValue max_id;
};

/// First pooled id; an empty pool is refilled with max_id+1 .. max_id+step_size.
PoolAcquisition pool_acquire(const IdPool& pool, IdValue max_id, IdValue step_size);

/// Puts `id` in front of the pool. Throws if it is already pooled.
IdPool pool_release(const IdPool& pool, IdValue id);

/// Rules sorted by name, shared read-only by every Configuration of a run.
class RuleSet {
 public:
  RuleSet() = default;
  explicit RuleSet(std::vector<Rule> rules);

  const std::vector<Rule>& rules() const { return rules_; }
  bool empty() const { return rules_.empty(); }
  /// Canonical encoding of the whole set, part of every state key.
  const std::string& fingerprint() const { return fingerprint_; }

 private:
  std::vector<Rule> rules_;
  std::string fingerprint_;
};

/// One Kripke state: net, rules, id bookkeeping.
struct Configuration {
  PetriNet net;
  std::shared_ptr<const RuleSet> rules = std::make_shared<RuleSet>();
  IdValue max_id = 0;
  IdValue step_size = 10;
  IdPool place_pool{IdPool::Kind::place};
  IdPool transition_pool{IdPool::Kind::transition};

  /// max_id starts at the net's largest id; both pools start empty.
  static Configuration initial(PetriNet net, std::vector<Rule> rules, IdValue step_size = 10);
};

struct GluingError : Error {
  enum class Condition { identification, dangling, deleted_marking, capacity };
  GluingError(Condition c, const std::string& rule);
  Condition condition;
};

std::string to_string(GluingError::Condition c);

/// Applies `match` (found in config.net). Deleted ids return to their pool
/// before created elements draw fresh ids.
Configuration apply_rule(const Configuration& config, const Match& match);

/// Matches of `rule` that apply_rule accepts, in find_matches order.
std::vector<Match> applicable_matches(const PetriNet& net, const Rule& rule);

}  // namespace rpn
