#pragma once

#include <filesystem>
#include <string>

#include "rpn/rules.hpp"

namespace rpn::test {

inline std::filesystem::path data_path(const std::string& name) { return std::filesystem::path(RPN_TEST_DATA) / name; }

inline Place place_a(IdValue id) { return Place{"A", PlaceId{id}, Capacity::omega()}; }
inline Transition trans_t(IdValue id) { return Transition{"T", TransitionId{id}}; }

/// The three-place example net: T5 moves A4 -> A3, T6 moves A2 -> A4,
/// T7 moves A3 -> A2. `formal` selects marking A2+A4 instead of A3+A4.
inline PetriNet make_n1(bool formal = false) {
  PetriNet n;
  for (IdValue id : {2u, 3u, 4u}) n.add_place(place_a(id));
  for (IdValue id : {5u, 6u, 7u}) n.add_transition(trans_t(id));
  n.add_pre_arc(TransitionId{5}, PlaceId{4});
  n.add_post_arc(TransitionId{5}, PlaceId{3});
  n.add_pre_arc(TransitionId{6}, PlaceId{2});
  n.add_post_arc(TransitionId{6}, PlaceId{4});
  n.add_pre_arc(TransitionId{7}, PlaceId{3});
  n.add_post_arc(TransitionId{7}, PlaceId{2});
  n.set_marking(formal ? Marking{{PlaceId{2}, 1}, {PlaceId{4}, 1}} : Marking{{PlaceId{3}, 1}, {PlaceId{4}, 1}});
  return n;
}

/// Arc reversal: A17 -> T24 -> A20 becomes A20 -> T26 -> A17. `token_on`
/// picks the marked place (17 for r1, 20 for r2).
inline Rule make_reversal(const std::string& name, IdValue token_on) {
  Rule r;
  r.name = name;
  for (PetriNet* side : {&r.lhs, &r.rhs}) {
    side->add_place(place_a(17));
    side->add_place(place_a(20));
    side->set_marking(Marking{{PlaceId{token_on}, 1}});
  }
  r.lhs.add_transition(trans_t(24));
  r.lhs.add_pre_arc(TransitionId{24}, PlaceId{17});
  r.lhs.add_post_arc(TransitionId{24}, PlaceId{20});
  r.rhs.add_transition(trans_t(26));
  r.rhs.add_pre_arc(TransitionId{26}, PlaceId{20});
  r.rhs.add_post_arc(TransitionId{26}, PlaceId{17});
  return r;
}

inline Rule make_r1() { return make_reversal("r1", 17); }
inline Rule make_r2() { return make_reversal("r2", 20); }

/// Deletes T12 and its output place A13, keeps the marked A11 and adds a
/// transition that only consumes from it.
inline Rule make_r3() {
  Rule r;
  r.name = "r3";
  r.lhs.add_place(place_a(11));
  r.lhs.add_place(place_a(13));
  r.lhs.add_transition(trans_t(12));
  r.lhs.add_pre_arc(TransitionId{12}, PlaceId{11});
  r.lhs.add_post_arc(TransitionId{12}, PlaceId{13});
  r.lhs.set_marking(Marking{{PlaceId{11}, 1}});
  r.rhs.add_place(place_a(11));
  r.rhs.add_transition(trans_t(14));
  r.rhs.add_pre_arc(TransitionId{14}, PlaceId{11});
  r.rhs.set_marking(Marking{{PlaceId{11}, 1}});
  return r;
}

/// Two marked branches: A1 -> T2 -> A3, and A4 -> T5 -> A6 -> T7.
inline PetriNet make_n2() {
  PetriNet n;
  for (IdValue id : {1u, 3u, 4u, 6u}) n.add_place(place_a(id));
  for (IdValue id : {2u, 5u, 7u}) n.add_transition(trans_t(id));
  n.add_pre_arc(TransitionId{2}, PlaceId{1});
  n.add_post_arc(TransitionId{2}, PlaceId{3});
  n.add_pre_arc(TransitionId{5}, PlaceId{4});
  n.add_post_arc(TransitionId{5}, PlaceId{6});
  n.add_pre_arc(TransitionId{7}, PlaceId{6});
  n.set_marking(Marking{{PlaceId{1}, 1}, {PlaceId{4}, 1}});
  return n;
}

}  // namespace rpn::test
