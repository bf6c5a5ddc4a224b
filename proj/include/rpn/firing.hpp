#pragma once

#include <optional>
#include <vector>

#include "rpn/net.hpp"

namespace rpn {

/// Knobs of the token game shared by every consumer of firing.
struct Semantics {
  /// Check capacity against m + post(t) instead of the post-fire marking
  /// (m - pre(t)) + post(t).
  bool strict_capacity = false;
};

struct NotActivatedError : Error {
  enum class Reason { token_shortfall, capacity };
  NotActivatedError(TransitionId t, Reason r);
  TransitionId transition;
  Reason reason;
};

bool is_activated(const PetriNet& net, TransitionId t, const Semantics& sem = {});

/// Returns a copy of `net` with marking (m - pre(t)) + post(t).
PetriNet fire(const PetriNet& net, TransitionId t, const Semantics& sem = {});

/// Activated transitions in ascending id order.
std::vector<TransitionId> enabled_transitions(const PetriNet& net, const Semantics& sem = {});

}  // namespace rpn
