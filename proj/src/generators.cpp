#include "rpn/generators.hpp"

namespace rpn {

PetriNet circle_net(std::size_t n, const std::string& place_label, const std::string& transition_label) {
  if (n == 0) throw Error("a circle needs at least one place");
  PetriNet net;
  const auto size = static_cast<IdValue>(n);
  for (IdValue i = 1; i <= size; ++i) net.add_place(Place{place_label, PlaceId{i}, Capacity::omega()});
  for (IdValue i = 1; i <= size; ++i) {
    const TransitionId t{size + i};
    net.add_transition(Transition{transition_label, t});
    net.add_pre_arc(t, PlaceId{i});
    net.add_post_arc(t, PlaceId{i % size + 1});
  }
  net.set_marking(Marking{{PlaceId{1}, 1}});
  return net;
}

}  // namespace rpn
