#include "rpn/net.hpp"

#include <algorithm>

namespace rpn {

Capacity Capacity::bounded(TokenCount bound) {
  if (bound == 0) throw Error("place capacity must be positive");
  Capacity c;
  c.bound_ = bound;
  return c;
}

TokenCount Capacity::bound() const {
  if (is_omega()) throw Error("unbounded capacity has no numeric bound");
  return bound_;
}

Marking::Marking(std::initializer_list<std::pair<const PlaceId, TokenCount>> init) {
  for (const auto& [p, n] : init) add(p, n);
}

TokenCount Marking::count(PlaceId p) const {
  auto it = counts_.find(p);
  return it == counts_.end() ? 0 : it->second;
}

void Marking::add(PlaceId p, TokenCount n) {
  if (n == 0) return;
  counts_[p] += n;
}

void Marking::remove(PlaceId p, TokenCount n) {
  if (n == 0) return;
  auto it = counts_.find(p);
  if (it == counts_.end() || it->second < n) {
    throw UnderflowError("marking underflow on place " + std::to_string(p.value));
  }
  it->second -= n;
  if (it->second == 0) counts_.erase(it);
}

std::uint64_t Marking::total() const {
  std::uint64_t sum = 0;
  for (const auto& [p, n] : counts_) sum += n;
  return sum;
}

bool marking_leq(const Marking& a, const Marking& b) {
  return std::all_of(a.begin(), a.end(), [&](const auto& e) { return e.second <= b.count(e.first); });
}

Marking marking_add(const Marking& a, const Marking& b) {
  Marking out = a;
  for (const auto& [p, n] : b) out.add(p, n);
  return out;
}

Marking marking_sub(const Marking& a, const Marking& b) {
  if (!marking_leq(b, a)) throw UnderflowError("marking subtraction underflow");
  Marking out = a;
  for (const auto& [p, n] : b) out.remove(p, n);
  return out;
}

bool capacity_ok(const Marking& base, const Marking& added, const PetriNet::PlaceMap& places) {
  for (const auto& [p, n] : added) {
    auto it = places.find(p);
    if (it == places.end()) throw Error("capacity check on unknown place " + std::to_string(p.value));
    if (!it->second.capacity.admits(std::uint64_t{base.count(p)} + n)) return false;
  }
  return true;
}

void PetriNet::add_place(Place p) {
  auto id = p.id;
  if (!places_.emplace(id, std::move(p)).second) {
    throw Error("duplicate place id " + std::to_string(id.value));
  }
}

void PetriNet::add_transition(Transition t) {
  auto id = t.id;
  if (!transitions_.emplace(id, std::move(t)).second) {
    throw Error("duplicate transition id " + std::to_string(id.value));
  }
  pre_[id];
  post_[id];
}

void PetriNet::remove_place(PlaceId p) {
  places_.erase(p);
  marking_.erase(p);
}

void PetriNet::remove_transition(TransitionId t) {
  transitions_.erase(t);
  pre_.erase(t);
  post_.erase(t);
}

void PetriNet::set_pre(TransitionId t, Marking m) {
  if (!has_transition(t)) throw Error("pre set for unknown transition " + std::to_string(t.value));
  pre_[t] = std::move(m);
}

void PetriNet::set_post(TransitionId t, Marking m) {
  if (!has_transition(t)) throw Error("post set for unknown transition " + std::to_string(t.value));
  post_[t] = std::move(m);
}

void PetriNet::add_pre_arc(TransitionId t, PlaceId p, TokenCount weight) {
  if (!has_transition(t)) throw Error("arc from unknown transition " + std::to_string(t.value));
  pre_[t].add(p, weight);
}

void PetriNet::add_post_arc(TransitionId t, PlaceId p, TokenCount weight) {
  if (!has_transition(t)) throw Error("arc to unknown transition " + std::to_string(t.value));
  post_[t].add(p, weight);
}

const Place& PetriNet::place(PlaceId p) const {
  auto it = places_.find(p);
  if (it == places_.end()) throw Error("unknown place id " + std::to_string(p.value));
  return it->second;
}

const Transition& PetriNet::transition(TransitionId t) const {
  auto it = transitions_.find(t);
  if (it == transitions_.end()) throw Error("unknown transition id " + std::to_string(t.value));
  return it->second;
}

const Marking& PetriNet::pre(TransitionId t) const {
  auto it = pre_.find(t);
  if (it == pre_.end()) throw Error("unknown transition id " + std::to_string(t.value));
  return it->second;
}

const Marking& PetriNet::post(TransitionId t) const {
  auto it = post_.find(t);
  if (it == post_.end()) throw Error("unknown transition id " + std::to_string(t.value));
  return it->second;
}

IdValue PetriNet::max_id() const {
  IdValue m = 0;
  if (!places_.empty()) m = std::max(m, places_.rbegin()->first.value);
  if (!transitions_.empty()) m = std::max(m, transitions_.rbegin()->first.value);
  return m;
}

std::string to_string(Violation::Kind kind) {
  switch (kind) {
    case Violation::Kind::unknown_place: return "unknown-place";
    case Violation::Kind::id_clash: return "id-clash";
    case Violation::Kind::capacity_exceeded: return "capacity-exceeded";
    case Violation::Kind::missing_arc_entry: return "missing-arc-entry";
  }
  return "?";
}

std::vector<Violation> validate_net(const PetriNet& net) {
  std::vector<Violation> out;
  auto report = [&](Violation::Kind k, std::string msg) { out.push_back({k, std::move(msg)}); };

  for (const auto& [tid, t] : net.transitions()) {
    if (net.has_place(PlaceId{tid.value})) {
      report(Violation::Kind::id_clash, "id " + std::to_string(tid.value) + " used by a place and a transition");
    }
  }
  auto check_arcs = [&](const PetriNet::ArcMap& arcs, const char* which) {
    for (const auto& [tid, m] : arcs) {
      if (!net.has_transition(tid)) {
        report(Violation::Kind::missing_arc_entry,
               std::string(which) + " entry for unknown transition " + std::to_string(tid.value));
      }
      for (const auto& [p, n] : m) {
        if (!net.has_place(p)) {
          report(Violation::Kind::unknown_place, std::string(which) + "(" + std::to_string(tid.value) +
                                                     ") references unknown place " + std::to_string(p.value));
        }
      }
    }
    for (const auto& [tid, t] : net.transitions()) {
      if (!arcs.contains(tid)) {
        report(Violation::Kind::missing_arc_entry,
               std::string("transition ") + std::to_string(tid.value) + " has no " + which + " entry");
      }
    }
  };
  check_arcs(net.pre_sets(), "pre");
  check_arcs(net.post_sets(), "post");

  for (const auto& [p, n] : net.marking()) {
    auto it = net.places().find(p);
    if (it == net.places().end()) {
      report(Violation::Kind::unknown_place, "marking references unknown place " + std::to_string(p.value));
    } else if (!it->second.capacity.admits(n)) {
      report(Violation::Kind::capacity_exceeded, "place " + std::to_string(p.value) + " holds " + std::to_string(n) +
                                                     " tokens, capacity " +
                                                     std::to_string(it->second.capacity.rendered()));
    }
  }
  return out;
}

namespace {

void append_marking(std::string& out, const Marking& m) {
  out += '[';
  for (const auto& [p, n] : m) {
    out += std::to_string(p.value);
    out += '*';
    out += std::to_string(n);
    out += ',';
  }
  out += ']';
}

void append_label(std::string& out, const std::string& label) {
  out += std::to_string(label.size());
  out += ':';
  out += label;
}

}  // namespace

void append_canonical(std::string& out, const PetriNet& net) {
  out += "P{";
  for (const auto& [id, p] : net.places()) {
    out += std::to_string(id.value);
    out += '=';
    append_label(out, p.label);
    out += '/';
    out += std::to_string(p.capacity.rendered());
    out += ';';
  }
  out += "}T{";
  for (const auto& [id, t] : net.transitions()) {
    out += std::to_string(id.value);
    out += '=';
    append_label(out, t.label);
    out += '<';
    append_marking(out, net.pre(id));
    out += '>';
    append_marking(out, net.post(id));
    out += ';';
  }
  out += "}M";
  append_marking(out, net.marking());
}

}  // namespace rpn
