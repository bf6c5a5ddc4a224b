#include "rpn/state_space.hpp"

#include <algorithm>
#include <deque>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

namespace rpn {

ActionLabel ActionLabel::apply(const Match& m) { return {Kind::rule, {}, m.rule->name, m.digest()}; }

std::string ActionLabel::to_string() const {
  switch (kind) {
    case Kind::fire: return "fire(" + std::to_string(transition.value) + ")";
    case Kind::rule: return "rule(" + rule + "|" + match + ")";
    case Kind::deadlock: return "deadlock";
  }
  return "?";
}

std::vector<Successor> successors(const Configuration& config, const Semantics& sem) {
  std::vector<Successor> out;
  for (TransitionId t : enabled_transitions(config.net, sem)) {
    Configuration next = config;
    next.net = fire(config.net, t, sem);
    out.push_back({ActionLabel::fire(t), std::move(next)});
  }
  for (const Rule& rule : config.rules->rules()) {
    for (const Match& m : applicable_matches(config.net, rule)) {
      out.push_back({ActionLabel::apply(m), apply_rule(config, m)});
    }
  }
  return out;
}

namespace {

/// Places and transitions of a net as one bipartite graph over dense indices
/// (places first), with colours that are refined until stable.
class Canonizer {
 public:
  explicit Canonizer(const PetriNet& net) : net_(net) {
    for (const auto& [p, place] : net.places()) places_.push_back(p);
    for (const auto& [t, tr] : net.transitions()) transitions_.push_back(t);
    std::map<PlaceId, std::size_t> index;
    for (std::size_t i = 0; i < places_.size(); ++i) index[places_[i]] = i;
    adjacency_.resize(size());
    for (std::size_t j = 0; j < transitions_.size(); ++j) {
      const std::size_t t = places_.size() + j;
      for (const auto& [p, n] : net.pre(transitions_[j])) link(index.at(p), t, 'o', n);
      for (const auto& [p, n] : net.post(transitions_[j])) link(index.at(p), t, 'i', n);
    }
  }

  PetriNet run() {
    std::vector<std::string> initial(size());
    for (std::size_t i = 0; i < places_.size(); ++i) {
      const Place& p = net_.place(places_[i]);
      initial[i] = "p" + std::to_string(p.label.size()) + ":" + p.label + "/" + std::to_string(p.capacity.rendered()) +
                   "/" + std::to_string(net_.marking().count(places_[i]));
    }
    for (std::size_t j = 0; j < transitions_.size(); ++j) {
      const std::string& label = net_.transition(transitions_[j]).label;
      initial[places_.size() + j] = "t" + std::to_string(label.size()) + ":" + label;
    }
    search(refine(rank(initial)));
    return best_net_;
  }

 private:
  struct Arc {
    std::size_t other;
    char kind;  // 'o' place->transition, 'i' transition->place, upper case seen from the transition
    TokenCount weight;
  };

  std::size_t size() const { return places_.size() + transitions_.size(); }

  void link(std::size_t place, std::size_t transition, char kind, TokenCount n) {
    adjacency_[place].push_back({transition, kind, n});
    adjacency_[transition].push_back({place, static_cast<char>(kind - 'a' + 'A'), n});
  }

  /// Dense colours ordered by signature, so they do not depend on ids.
  static std::vector<std::size_t> rank(const std::vector<std::string>& sig) {
    std::vector<std::string> sorted = sig;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    std::vector<std::size_t> colour(sig.size());
    for (std::size_t i = 0; i < sig.size(); ++i) {
      colour[i] = static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), sig[i]) - sorted.begin());
    }
    return colour;
  }

  static std::size_t count_colours(const std::vector<std::size_t>& c) {
    return std::set<std::size_t>(c.begin(), c.end()).size();
  }

  std::vector<std::size_t> refine(std::vector<std::size_t> colour) const {
    std::size_t classes = count_colours(colour);
    while (true) {
      std::vector<std::string> sig(size());
      for (std::size_t i = 0; i < size(); ++i) {
        std::vector<std::string> env;
        for (const Arc& a : adjacency_[i]) {
          env.push_back(std::string(1, a.kind) + std::to_string(a.weight) + "#" + std::to_string(colour[a.other]));
        }
        std::sort(env.begin(), env.end());
        std::ostringstream os;
        os << std::setw(8) << std::setfill('0') << colour[i];
        for (const auto& e : env) os << "," << e;
        sig[i] = os.str();
      }
      std::vector<std::size_t> next = rank(sig);
      const std::size_t next_classes = count_colours(next);
      if (next_classes == classes) return colour;
      colour = std::move(next);
      classes = next_classes;
    }
  }

  /// Individualizes members of the first non-trivial cell in turn and keeps
  /// the smallest encoding. The leaf budget bounds symmetric cases; a cut
  /// search still yields a relabeling of the same net, only not a minimal one.
  void search(const std::vector<std::size_t>& colour) {
    if (leaves_ >= kLeafBudget) return;
    std::map<std::size_t, std::vector<std::size_t>> cells;
    for (std::size_t i = 0; i < size(); ++i) cells[colour[i]].push_back(i);
    const std::vector<std::size_t>* target = nullptr;
    for (const auto& [c, members] : cells) {
      if (members.size() > 1) {
        target = &members;
        break;
      }
    }
    if (!target) {
      ++leaves_;
      leaf(colour);
      return;
    }
    for (std::size_t chosen : *target) {
      std::vector<std::string> sig(size());
      for (std::size_t i = 0; i < size(); ++i) {
        std::ostringstream os;
        os << std::setw(8) << std::setfill('0') << colour[i] << (i == chosen ? "a" : "b");
        sig[i] = os.str();
      }
      search(refine(rank(sig)));
      if (leaves_ >= kLeafBudget) return;
    }
  }

  void leaf(const std::vector<std::size_t>& colour) {
    std::vector<std::size_t> order(size());
    for (std::size_t i = 0; i < size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return colour[a] < colour[b]; });
    std::map<PlaceId, PlaceId> pmap;
    std::map<TransitionId, TransitionId> tmap;
    IdValue next_id = 1;
    for (std::size_t i : order) {
      if (i < places_.size()) pmap[places_[i]] = PlaceId{next_id++};
    }
    for (std::size_t i : order) {
      if (i >= places_.size()) tmap[transitions_[i - places_.size()]] = TransitionId{next_id++};
    }
    PetriNet out;
    for (const auto& [p, place] : net_.places()) out.add_place(Place{place.label, pmap.at(p), place.capacity});
    auto remap = [&](const Marking& m) {
      Marking r;
      for (const auto& [p, n] : m) r.add(pmap.at(p), n);
      return r;
    };
    for (const auto& [t, tr] : net_.transitions()) {
      out.add_transition(Transition{tr.label, tmap.at(t)});
      out.set_pre(tmap.at(t), remap(net_.pre(t)));
      out.set_post(tmap.at(t), remap(net_.post(t)));
    }
    out.set_marking(remap(net_.marking()));
    std::string key;
    append_canonical(key, out);
    if (best_key_.empty() || key < best_key_) {
      best_key_ = std::move(key);
      best_net_ = std::move(out);
    }
  }

  static constexpr std::size_t kLeafBudget = 256;

  const PetriNet& net_;
  std::vector<PlaceId> places_;
  std::vector<TransitionId> transitions_;
  std::vector<std::vector<Arc>> adjacency_;
  std::size_t leaves_ = 0;
  std::string best_key_;
  PetriNet best_net_;
};

}  // namespace

PetriNet canonical_relabel(const PetriNet& net) { return Canonizer(net).run(); }

std::string canonical_key(const Configuration& config, StateIdentity identity) {
  std::string key;
  if (identity == StateIdentity::semantic) {
    append_canonical(key, canonical_relabel(config.net));
    key += "|";
    key += config.rules->fingerprint();
    return key;
  }
  append_canonical(key, config.net);
  key += "|";
  key += config.rules->fingerprint();
  key += "|max=" + std::to_string(config.max_id) + "|step=" + std::to_string(config.step_size) + "|ap[";
  for (IdValue id : config.place_pool.available()) key += std::to_string(id) + ",";
  key += "]at[";
  for (IdValue id : config.transition_pool.available()) key += std::to_string(id) + ",";
  key += "]";
  return key;
}

std::string key_digest(const std::string& key) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : key) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

std::size_t StateGraph::edge_count() const {
  std::size_t n = 0;
  for (const auto& e : edges) n += e.size();
  return n;
}

std::size_t StateGraph::deadlock_count() const { return static_cast<std::size_t>(std::count(deadlock.begin(), deadlock.end(), true)); }

std::optional<std::size_t> StateGraph::find(const Configuration& c) const {
  auto it = index.find(canonical_key(c, identity));
  if (it == index.end()) return std::nullopt;
  return it->second;
}

namespace {

struct Expansion {
  std::vector<Successor> next;
  std::vector<std::string> keys;
};

Expansion expand(const Configuration& c, const ExploreOptions& options) {
  Expansion e;
  e.next = successors(c, options.semantics);
  e.keys.reserve(e.next.size());
  for (const auto& s : e.next) e.keys.push_back(canonical_key(s.config, options.identity));
  return e;
}

std::vector<Expansion> expand_layer(const StateGraph& g, const std::vector<std::size_t>& layer,
                                    const ExploreOptions& options) {
  std::vector<Expansion> out(layer.size());
  const unsigned workers = std::max(1u, std::min<unsigned>(options.workers, static_cast<unsigned>(layer.size())));
  if (workers <= 1) {
    for (std::size_t i = 0; i < layer.size(); ++i) out[i] = expand(g.states[layer[i]], options);
    return out;
  }
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < layer.size(); i += workers) out[i] = expand(g.states[layer[i]], options);
      });
    }
  }
  return out;
}

}  // namespace

StateGraph explore(const Configuration& initial, const ExploreOptions& options) {
  if (options.max_states == 0) throw Error("max_states must be positive");
  StateGraph g;
  g.identity = options.identity;

  auto add_state = [&](Configuration c, std::string key, std::size_t depth) {
    const std::size_t id = g.states.size();
    g.index.emplace(key, id);
    g.states.push_back(std::move(c));
    g.keys.push_back(std::move(key));
    g.edges.emplace_back();
    g.depth.push_back(depth);
    g.deadlock.push_back(false);
    return id;
  };

  add_state(initial, canonical_key(initial, options.identity), 0);
  std::vector<std::size_t> layer{0};
  std::size_t depth = 0;
  while (!layer.empty()) {
    std::vector<Expansion> expanded = expand_layer(g, layer, options);
    const bool at_depth_limit = options.max_depth && depth >= *options.max_depth;
    std::vector<std::size_t> next_layer;
    for (std::size_t i = 0; i < layer.size(); ++i) {
      const std::size_t src = layer[i];
      Expansion& e = expanded[i];
      if (e.next.empty()) {
        g.deadlock[src] = true;
        continue;
      }
      if (at_depth_limit) {
        g.truncated = true;
        continue;
      }
      for (std::size_t k = 0; k < e.next.size(); ++k) {
        auto it = g.index.find(e.keys[k]);
        std::size_t target;
        if (it != g.index.end()) {
          target = it->second;
        } else if (g.states.size() >= options.max_states) {
          g.truncated = true;
          continue;
        } else {
          target = add_state(std::move(e.next[k].config), std::move(e.keys[k]), depth + 1);
          next_layer.push_back(target);
        }
        g.edges[src].push_back({std::move(e.next[k].action), target});
      }
    }
    layer = std::move(next_layer);
    ++depth;
  }
  return g;
}

std::string marking_summary(const PetriNet& net) {
  std::string out;
  for (const auto& [p, n] : net.marking()) {
    for (TokenCount k = 0; k < n; ++k) {
      if (!out.empty()) out += ' ';
      out += net.place(p).label + "@" + std::to_string(p.value);
    }
  }
  return out.empty() ? "-" : out;
}

void write_text(std::ostream& os, const StateGraph& g) {
  os << "stategraph states " << g.size() << " edges " << g.edge_count() << " deadlocks " << g.deadlock_count()
     << " truncated " << (g.truncated ? 1 : 0) << "\n";
  for (std::size_t s = 0; s < g.size(); ++s) {
    os << "state " << s << " " << key_digest(g.keys[s]) << " depth " << g.depth[s] << " marking "
       << marking_summary(g.states[s].net) << (g.deadlock[s] ? " deadlock" : "") << "\n";
  }
  for (std::size_t s = 0; s < g.size(); ++s) {
    for (const Edge& e : g.edges[s]) os << "edge " << s << " " << e.target << " " << e.action.to_string() << "\n";
  }
}

namespace {

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

void write_dot(std::ostream& os, const StateGraph& g) {
  os << "digraph stategraph {\n  node [shape=box, fontname=monospace];\n";
  for (std::size_t s = 0; s < g.size(); ++s) {
    os << "  s" << s << " [label=\"" << key_digest(g.keys[s]).substr(0, 8) << "\\n"
       << dot_escape(marking_summary(g.states[s].net)) << "\"";
    if (s == 0) os << ", penwidth=2";
    if (g.deadlock[s]) os << ", color=red";
    os << "];\n";
  }
  for (std::size_t s = 0; s < g.size(); ++s) {
    for (const Edge& e : g.edges[s]) {
      os << "  s" << s << " -> s" << e.target << " [label=\"" << dot_escape(e.action.to_string()) << "\"];\n";
    }
    if (g.deadlock[s]) os << "  s" << s << " -> s" << s << " [label=\"deadlock\", style=dashed];\n";
  }
  os << "}\n";
}

}  // namespace rpn
