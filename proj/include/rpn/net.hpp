#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace rpn {

using IdValue = std::uint32_t;
using TokenCount = std::uint32_t;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Marking subtraction whose subtrahend is not contained in the minuend.
struct UnderflowError : Error {
  using Error::Error;
};

template <class Tag>
struct Id {
  IdValue value = 0;

  constexpr Id() = default;
  constexpr explicit Id(IdValue v) : value(v) {}

  friend constexpr auto operator<=>(Id, Id) = default;
};

using PlaceId = Id<struct PlaceTag>;
using TransitionId = Id<struct TransitionTag>;

/// Place capacity: a positive bound or the unbounded sentinel.
class Capacity {
 public:
  /// Wire value of the unbounded capacity in Maude output.
  static constexpr std::int64_t omega_rendering = 2147483647;

  static constexpr Capacity omega() { return Capacity{}; }
  static Capacity bounded(TokenCount bound);

  constexpr bool is_omega() const { return bound_ == 0; }
  TokenCount bound() const;
  bool admits(std::uint64_t tokens) const { return is_omega() || tokens <= bound_; }
  std::int64_t rendered() const { return is_omega() ? omega_rendering : bound_; }

  friend constexpr bool operator==(Capacity, Capacity) = default;

 private:
  constexpr Capacity() = default;
  TokenCount bound_ = 0;  // 0 encodes omega
};

struct Place {
  std::string label;
  PlaceId id;
  Capacity capacity = Capacity::omega();

  friend bool operator==(const Place&, const Place&) = default;
};

struct Transition {
  std::string label;
  TransitionId id;

  friend bool operator==(const Transition&, const Transition&) = default;
};

/// Multiset of places. Zero counts are never stored.
class Marking {
 public:
  using Map = std::map<PlaceId, TokenCount>;
  using const_iterator = Map::const_iterator;

  Marking() = default;
  Marking(std::initializer_list<std::pair<const PlaceId, TokenCount>> init);

  TokenCount count(PlaceId p) const;
  void add(PlaceId p, TokenCount n = 1);
  /// Throws UnderflowError when fewer than `n` tokens are present.
  void remove(PlaceId p, TokenCount n = 1);
  void erase(PlaceId p) { counts_.erase(p); }

  bool empty() const { return counts_.empty(); }
  std::size_t support_size() const { return counts_.size(); }
  std::uint64_t total() const;

  const_iterator begin() const { return counts_.begin(); }
  const_iterator end() const { return counts_.end(); }

  friend bool operator==(const Marking&, const Marking&) = default;

 private:
  Map counts_;
};

/// a(p) <= b(p) for every place p.
bool marking_leq(const Marking& a, const Marking& b);
Marking marking_add(const Marking& a, const Marking& b);
/// Pointwise difference; throws UnderflowError unless marking_leq(b, a).
Marking marking_sub(const Marking& a, const Marking& b);

/// A marked place/transition net with capacities, N = (P, T, pre, post, M, cap).
class PetriNet {
 public:
  using PlaceMap = std::map<PlaceId, Place>;
  using TransitionMap = std::map<TransitionId, Transition>;
  using ArcMap = std::map<TransitionId, Marking>;

  void add_place(Place p);
  /// Adds a transition with empty pre and post sets.
  void add_transition(Transition t);
  void remove_place(PlaceId p);
  /// Removes the transition together with its pre/post entries.
  void remove_transition(TransitionId t);

  void set_pre(TransitionId t, Marking m);
  void set_post(TransitionId t, Marking m);
  void add_pre_arc(TransitionId t, PlaceId p, TokenCount weight = 1);
  void add_post_arc(TransitionId t, PlaceId p, TokenCount weight = 1);
  void set_marking(Marking m) { marking_ = std::move(m); }
  Marking& marking() { return marking_; }

  const PlaceMap& places() const { return places_; }
  const TransitionMap& transitions() const { return transitions_; }
  const ArcMap& pre_sets() const { return pre_; }
  const ArcMap& post_sets() const { return post_; }
  const Marking& marking() const { return marking_; }

  bool has_place(PlaceId p) const { return places_.contains(p); }
  bool has_transition(TransitionId t) const { return transitions_.contains(t); }
  const Place& place(PlaceId p) const;
  const Transition& transition(TransitionId t) const;
  const Marking& pre(TransitionId t) const;
  const Marking& post(TransitionId t) const;

  /// Largest place or transition id, 0 for the empty net.
  IdValue max_id() const;

  friend bool operator==(const PetriNet&, const PetriNet&) = default;

 private:
  PlaceMap places_;
  TransitionMap transitions_;
  ArcMap pre_;
  ArcMap post_;
  Marking marking_;
};

/// capacity check of `base + added` over the places occurring in `added`.
bool capacity_ok(const Marking& base, const Marking& added, const PetriNet::PlaceMap& places);

struct Violation {
  enum class Kind { unknown_place, id_clash, capacity_exceeded, missing_arc_entry };
  Kind kind;
  std::string message;
};

/// Structural audit: dangling references, id clashes between places and
/// transitions, initial marking above capacity.
std::vector<Violation> validate_net(const PetriNet& net);

std::string to_string(Violation::Kind kind);

/// Appends an unambiguous, order-normalized encoding of `net` to `out`.
void append_canonical(std::string& out, const PetriNet& net);

}  // namespace rpn

template <class Tag>
struct std::hash<rpn::Id<Tag>> {
  std::size_t operator()(rpn::Id<Tag> id) const noexcept { return std::hash<rpn::IdValue>{}(id.value); }
};
