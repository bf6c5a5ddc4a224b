#pragma once

#include <cstddef>
#include <string>

#include "rpn/net.hpp"

namespace rpn {

/// Ring P_1 -> T -> P_2 -> ... -> P_n -> T -> P_1 with one token on P_1.
/// Places get ids 1..n, transitions n+1..2n; all capacities are unbounded.
PetriNet circle_net(std::size_t n, const std::string& place_label = "P", const std::string& transition_label = "T");

}  // namespace rpn
