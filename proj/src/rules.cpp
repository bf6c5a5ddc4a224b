#include "rpn/rules.hpp"

#include <algorithm>
#include <set>

namespace rpn {

namespace {

template <class Map, class Key = typename Map::key_type>
std::vector<Key> keys_missing_from(const Map& from, const Map& other) {
  std::vector<Key> out;
  for (const auto& [k, v] : from) {
    if (!other.contains(k)) out.push_back(k);
  }
  return out;
}

}  // namespace

std::vector<PlaceId> Rule::deleted_places() const { return keys_missing_from(lhs.places(), rhs.places()); }
std::vector<PlaceId> Rule::created_places() const { return keys_missing_from(rhs.places(), lhs.places()); }
std::vector<TransitionId> Rule::deleted_transitions() const {
  return keys_missing_from(lhs.transitions(), rhs.transitions());
}
std::vector<TransitionId> Rule::created_transitions() const {
  return keys_missing_from(rhs.transitions(), lhs.transitions());
}

std::vector<std::string> identification_problems(const Rule& rule) {
  std::vector<std::string> out;
  for (const auto& [id, lp] : rule.lhs.places()) {
    auto it = rule.rhs.places().find(id);
    if (it == rule.rhs.places().end()) continue;
    if (it->second.label != lp.label || !(it->second.capacity == lp.capacity)) {
      out.push_back("place " + std::to_string(id.value) + " is deleted as '" + lp.label + "' and created as '" +
                    it->second.label + "'");
    }
  }
  for (const auto& [id, lt] : rule.lhs.transitions()) {
    auto it = rule.rhs.transitions().find(id);
    if (it == rule.rhs.transitions().end()) continue;
    if (it->second.label != lt.label) {
      out.push_back("transition " + std::to_string(id.value) + " is deleted as '" + lt.label + "' and created as '" +
                    it->second.label + "'");
    } else if (rule.lhs.pre(id) != rule.rhs.pre(id) || rule.lhs.post(id) != rule.rhs.post(id)) {
      out.push_back("preserved transition " + std::to_string(id.value) + " changes its arcs");
    }
  }
  // A preserved transition may not touch a deleted or created place.
  for (const auto& [id, lt] : rule.lhs.transitions()) {
    if (!rule.rhs.has_transition(id)) continue;
    for (const Marking* arcs : {&rule.lhs.pre(id), &rule.lhs.post(id)}) {
      for (const auto& [p, n] : *arcs) {
        if (!rule.rhs.has_place(p)) {
          out.push_back("preserved transition " + std::to_string(id.value) + " is attached to deleted place " +
                        std::to_string(p.value));
        }
      }
    }
  }
  return out;
}

std::string Match::digest() const {
  std::string out;
  bool first = true;
  for (const auto& [r, h] : place_map) {
    if (!first) out += ',';
    first = false;
    out += std::to_string(r.value) + "->" + std::to_string(h.value);
  }
  out += ';';
  first = true;
  for (const auto& [r, h] : transition_map) {
    if (!first) out += ',';
    first = false;
    out += std::to_string(r.value) + "->" + std::to_string(h.value);
  }
  return out;
}

namespace {

/// Backtracking embedding search. Transitions are bound first so that place
/// candidates can be drawn from the environment of already bound transitions.
class MatchSearch {
 public:
  MatchSearch(const PetriNet& host, const Rule& rule) : host_(host), rule_(rule) {
    for (const auto& [id, t] : rule.lhs.transitions()) rule_transitions_.push_back(id);
    for (const auto& [id, p] : rule.lhs.places()) rule_places_.push_back(id);
  }

  std::vector<Match> run() {
    if (rule_.lhs.transitions().size() > host_.transitions().size() ||
        rule_.lhs.places().size() > host_.places().size()) {
      return {};
    }
    current_.rule = &rule_;
    bind_transition(0);
    return std::move(results_);
  }

 private:
  void bind_transition(std::size_t i) {
    if (i == rule_transitions_.size()) {
      bind_place(0);
      return;
    }
    const TransitionId rt = rule_transitions_[i];
    const Transition& rule_t = rule_.lhs.transition(rt);
    const Marking& rpre = rule_.lhs.pre(rt);
    const Marking& rpost = rule_.lhs.post(rt);
    for (const auto& [ht, host_t] : host_.transitions()) {
      if (used_transitions_.contains(ht) || host_t.label != rule_t.label) continue;
      // cheap arity pruning; exact arc equality is checked per place
      if (host_.pre(ht).support_size() < rpre.support_size() ||
          host_.post(ht).support_size() < rpost.support_size()) {
        continue;
      }
      current_.transition_map[rt] = ht;
      used_transitions_.insert(ht);
      bind_transition(i + 1);
      used_transitions_.erase(ht);
      current_.transition_map.erase(rt);
    }
  }

  std::vector<PlaceId> place_candidates(PlaceId rp) const {
    // If rp touches a bound rule transition, its image must touch the image.
    for (const auto& [rt, ht] : current_.transition_map) {
      if (rule_.lhs.pre(rt).count(rp) > 0 || rule_.lhs.post(rt).count(rp) > 0) {
        std::set<PlaceId> env;
        for (const auto& [p, n] : host_.pre(ht)) env.insert(p);
        for (const auto& [p, n] : host_.post(ht)) env.insert(p);
        return {env.begin(), env.end()};
      }
    }
    std::vector<PlaceId> all;
    for (const auto& [p, place] : host_.places()) all.push_back(p);
    return all;
  }

  bool place_fits(PlaceId rp, PlaceId hp) const {
    const Place& rule_p = rule_.lhs.place(rp);
    const Place& host_p = host_.place(hp);
    if (rule_p.label != host_p.label || !(rule_p.capacity == host_p.capacity)) return false;
    if (rule_.lhs.marking().count(rp) > host_.marking().count(hp)) return false;
    for (const auto& [rt, ht] : current_.transition_map) {
      if (rule_.lhs.pre(rt).count(rp) != host_.pre(ht).count(hp)) return false;
      if (rule_.lhs.post(rt).count(rp) != host_.post(ht).count(hp)) return false;
    }
    return true;
  }

  void bind_place(std::size_t i) {
    if (i == rule_places_.size()) {
      results_.push_back(current_);
      return;
    }
    const PlaceId rp = rule_places_[i];
    for (PlaceId hp : place_candidates(rp)) {
      if (used_places_.contains(hp) || !place_fits(rp, hp)) continue;
      current_.place_map[rp] = hp;
      used_places_.insert(hp);
      bind_place(i + 1);
      used_places_.erase(hp);
      current_.place_map.erase(rp);
    }
  }

  const PetriNet& host_;
  const Rule& rule_;
  std::vector<TransitionId> rule_transitions_;
  std::vector<PlaceId> rule_places_;
  std::set<TransitionId> used_transitions_;
  std::set<PlaceId> used_places_;
  Match current_;
  std::vector<Match> results_;
};

}  // namespace

std::vector<Match> find_matches(const PetriNet& net, const Rule& rule) { return MatchSearch(net, rule).run(); }

bool dangling_ok(const PetriNet& net, const Match& match) {
  const Rule& rule = *match.rule;
  std::set<TransitionId> deleted_images;
  for (TransitionId rt : rule.deleted_transitions()) deleted_images.insert(match.transition_map.at(rt));
  for (PlaceId rp : rule.deleted_places()) {
    const PlaceId hp = match.place_map.at(rp);
    for (const auto& [ht, t] : net.transitions()) {
      const bool touches = net.pre(ht).count(hp) > 0 || net.post(ht).count(hp) > 0;
      if (touches && !deleted_images.contains(ht)) return false;
    }
  }
  return true;
}

bool deleted_marking_ok(const PetriNet& net, const Match& match) {
  const Rule& rule = *match.rule;
  for (PlaceId rp : rule.deleted_places()) {
    if (net.marking().count(match.place_map.at(rp)) != rule.lhs.marking().count(rp)) return false;
  }
  return true;
}

IdPool::IdPool(Kind kind, std::vector<IdValue> ids) : kind_(kind), ids_(std::move(ids)) {
  std::vector<IdValue> sorted = ids_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) throw Error("id pool contains duplicates");
}

bool IdPool::contains(IdValue id) const { return std::find(ids_.begin(), ids_.end(), id) != ids_.end(); }

PoolAcquisition pool_acquire(const IdPool& pool, IdValue max_id, IdValue step_size) {
  if (step_size == 0) throw Error("id pool step size must be at least 1");
  if (!pool.empty()) {
    std::vector<IdValue> rest(pool.available().begin() + 1, pool.available().end());
    return {pool.available().front(), IdPool(pool.kind(), std::move(rest)), max_id};
  }
  if (max_id > std::numeric_limits<IdValue>::max() - step_size) throw Error("id space exhausted");
  std::vector<IdValue> fresh;
  for (IdValue k = 2; k <= step_size; ++k) fresh.push_back(max_id + k);
  return {max_id + 1, IdPool(pool.kind(), std::move(fresh)), max_id + step_size};
}

IdPool pool_release(const IdPool& pool, IdValue id) {
  if (pool.contains(id)) throw Error("id " + std::to_string(id) + " released twice");
  std::vector<IdValue> ids;
  ids.reserve(pool.available().size() + 1);
  ids.push_back(id);
  ids.insert(ids.end(), pool.available().begin(), pool.available().end());
  return IdPool(pool.kind(), std::move(ids));
}

RuleSet::RuleSet(std::vector<Rule> rules) : rules_(std::move(rules)) {
  std::stable_sort(rules_.begin(), rules_.end(), [](const Rule& a, const Rule& b) { return a.name < b.name; });
  for (std::size_t i = 1; i < rules_.size(); ++i) {
    if (rules_[i].name == rules_[i - 1].name) throw Error("duplicate rule name '" + rules_[i].name + "'");
  }
  for (const Rule& r : rules_) {
    fingerprint_ += "R" + std::to_string(r.name.size()) + ":" + r.name + "(L";
    append_canonical(fingerprint_, r.lhs);
    fingerprint_ += "R";
    append_canonical(fingerprint_, r.rhs);
    fingerprint_ += ")";
  }
}

Configuration Configuration::initial(PetriNet net, std::vector<Rule> rules, IdValue step_size) {
  if (step_size == 0) throw Error("id pool step size must be at least 1");
  Configuration c;
  c.max_id = net.max_id();
  c.net = std::move(net);
  c.rules = std::make_shared<RuleSet>(std::move(rules));
  c.step_size = step_size;
  return c;
}

std::string to_string(GluingError::Condition c) {
  switch (c) {
    case GluingError::Condition::identification: return "identification";
    case GluingError::Condition::dangling: return "dangling";
    case GluingError::Condition::deleted_marking: return "deleted-marking";
    case GluingError::Condition::capacity: return "capacity";
  }
  return "?";
}

GluingError::GluingError(Condition c, const std::string& rule)
    : Error("rule '" + rule + "' violates the " + to_string(c) + " condition"), condition(c) {}

namespace {

Marking map_marking(const Marking& m, const std::map<PlaceId, PlaceId>& place_map) {
  Marking out;
  for (const auto& [p, n] : m) out.add(place_map.at(p), n);
  return out;
}

}  // namespace

Configuration apply_rule(const Configuration& config, const Match& match) {
  const Rule& rule = *match.rule;
  if (!identification_ok(rule)) throw GluingError(GluingError::Condition::identification, rule.name);
  if (!dangling_ok(config.net, match)) throw GluingError(GluingError::Condition::dangling, rule.name);
  if (!deleted_marking_ok(config.net, match)) throw GluingError(GluingError::Condition::deleted_marking, rule.name);

  Configuration out = config;
  PetriNet& net = out.net;
  Marking marking = marking_sub(net.marking(), map_marking(rule.lhs.marking(), match.place_map));

  for (TransitionId rt : rule.deleted_transitions()) {
    const TransitionId ht = match.transition_map.at(rt);
    net.remove_transition(ht);
    out.transition_pool = pool_release(out.transition_pool, ht.value);
  }
  for (PlaceId rp : rule.deleted_places()) {
    const PlaceId hp = match.place_map.at(rp);
    net.remove_place(hp);
    marking.erase(hp);
    out.place_pool = pool_release(out.place_pool, hp.value);
  }

  std::map<PlaceId, PlaceId> rhs_places;
  for (const auto& [rp, hp] : match.place_map) {
    if (rule.rhs.has_place(rp)) rhs_places.emplace(rp, hp);
  }
  for (PlaceId rp : rule.created_places()) {
    auto got = pool_acquire(out.place_pool, out.max_id, out.step_size);
    out.place_pool = std::move(got.pool);
    out.max_id = got.max_id;
    const Place& proto = rule.rhs.place(rp);
    net.add_place(Place{proto.label, PlaceId{got.id}, proto.capacity});
    rhs_places.emplace(rp, PlaceId{got.id});
  }
  for (TransitionId rt : rule.created_transitions()) {
    auto got = pool_acquire(out.transition_pool, out.max_id, out.step_size);
    out.transition_pool = std::move(got.pool);
    out.max_id = got.max_id;
    const TransitionId ht{got.id};
    net.add_transition(Transition{rule.rhs.transition(rt).label, ht});
    net.set_pre(ht, map_marking(rule.rhs.pre(rt), rhs_places));
    net.set_post(ht, map_marking(rule.rhs.post(rt), rhs_places));
  }

  const Marking added = map_marking(rule.rhs.marking(), rhs_places);
  if (!capacity_ok(marking, added, net.places())) throw GluingError(GluingError::Condition::capacity, rule.name);
  net.set_marking(marking_add(marking, added));
  return out;
}

std::vector<Match> applicable_matches(const PetriNet& net, const Rule& rule) {
  std::vector<Match> out;
  if (!identification_ok(rule)) return out;
  for (Match& m : find_matches(net, rule)) {
    if (!dangling_ok(net, m) || !deleted_marking_ok(net, m)) continue;
    // capacity of the rewritten marking over the preserved and created places
    Marking base = marking_sub(net.marking(), map_marking(rule.lhs.marking(), m.place_map));
    bool fits = true;
    for (const auto& [rp, n] : rule.rhs.marking()) {
      auto it = m.place_map.find(rp);
      if (it == m.place_map.end()) {
        fits = fits && rule.rhs.place(rp).capacity.admits(n);
      } else {
        fits = fits && net.place(it->second).capacity.admits(std::uint64_t{base.count(it->second)} + n);
      }
    }
    if (fits) out.push_back(std::move(m));
  }
  return out;
}

}  // namespace rpn
