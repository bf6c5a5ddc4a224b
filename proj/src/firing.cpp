#include "rpn/firing.hpp"

namespace rpn {

namespace {

std::string describe(TransitionId t, NotActivatedError::Reason r) {
  return "transition " + std::to_string(t.value) + " is not activated: " +
         (r == NotActivatedError::Reason::token_shortfall ? "token shortfall" : "capacity exceeded");
}

// nullopt when activated
std::optional<NotActivatedError::Reason> activation_failure(const PetriNet& net, TransitionId t,
                                                            const Semantics& sem) {
  const Marking& pre = net.pre(t);
  const Marking& post = net.post(t);
  if (!marking_leq(pre, net.marking())) return NotActivatedError::Reason::token_shortfall;
  const bool fits = sem.strict_capacity ? capacity_ok(net.marking(), post, net.places())
                                        : capacity_ok(marking_sub(net.marking(), pre), post, net.places());
  if (!fits) return NotActivatedError::Reason::capacity;
  return std::nullopt;
}

}  // namespace

NotActivatedError::NotActivatedError(TransitionId t, Reason r) : Error(describe(t, r)), transition(t), reason(r) {}

bool is_activated(const PetriNet& net, TransitionId t, const Semantics& sem) {
  if (!net.has_transition(t)) throw Error("unknown transition id " + std::to_string(t.value));
  return !activation_failure(net, t, sem).has_value();
}

PetriNet fire(const PetriNet& net, TransitionId t, const Semantics& sem) {
  if (!net.has_transition(t)) throw Error("unknown transition id " + std::to_string(t.value));
  if (auto failure = activation_failure(net, t, sem)) throw NotActivatedError(t, *failure);
  PetriNet out = net;
  out.set_marking(marking_add(marking_sub(net.marking(), net.pre(t)), net.post(t)));
  return out;
}

std::vector<TransitionId> enabled_transitions(const PetriNet& net, const Semantics& sem) {
  std::vector<TransitionId> out;
  for (const auto& [id, t] : net.transitions()) {
    if (!activation_failure(net, id, sem)) out.push_back(id);
  }
  return out;
}

}  // namespace rpn
