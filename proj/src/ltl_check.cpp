#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <tuple>
#include <unordered_map>

#include "rpn/ltl.hpp"

namespace rpn {

StateSpaceExceeded::StateSpaceExceeded(std::size_t n)
    : Error("state space exceeds the configured limits after " + std::to_string(n) + " states"), explored(n) {}

namespace {

// Negation normal form, interned so that structurally equal subformulas share an index.
enum class NOp { truth, falsity, literal, conj, disj, next, until, release };

struct NNode {
  NOp op;
  int left = -1;
  int right = -1;
  std::size_t atom = 0;
  bool positive = true;

  auto tie() const { return std::tuple(op, left, right, atom, positive); }
};

class NnfTable {
 public:
  explicit NnfTable(const std::function<std::size_t(const Atom&)>& atom_index) : atom_index_(atom_index) {}

  int convert(const Formula& f, bool negated) {
    using Op = Formula::Op;
    switch (f.op) {
      case Op::atom: return intern({NOp::literal, -1, -1, atom_index_(f.atom), !negated});
      case Op::truth: return intern({negated ? NOp::falsity : NOp::truth});
      case Op::falsity: return intern({negated ? NOp::truth : NOp::falsity});
      case Op::negation: return convert(*f.left, !negated);
      case Op::conjunction:
        return intern({negated ? NOp::disj : NOp::conj, convert(*f.left, negated), convert(*f.right, negated)});
      case Op::disjunction:
        return intern({negated ? NOp::conj : NOp::disj, convert(*f.left, negated), convert(*f.right, negated)});
      case Op::implication:
        return intern({negated ? NOp::conj : NOp::disj, convert(*f.left, !negated), convert(*f.right, negated)});
      case Op::next: return intern({NOp::next, convert(*f.left, negated)});
      case Op::until:
        return intern({negated ? NOp::release : NOp::until, convert(*f.left, negated), convert(*f.right, negated)});
      case Op::release:
        return intern({negated ? NOp::until : NOp::release, convert(*f.left, negated), convert(*f.right, negated)});
      case Op::always:
        if (negated) return intern({NOp::until, intern({NOp::truth}), convert(*f.left, true)});
        return intern({NOp::release, intern({NOp::falsity}), convert(*f.left, false)});
      case Op::eventually:
        if (negated) return intern({NOp::release, intern({NOp::falsity}), convert(*f.left, true)});
        return intern({NOp::until, intern({NOp::truth}), convert(*f.left, false)});
    }
    throw Error("unknown formula operator");
  }

  const NNode& operator[](int i) const { return nodes_[static_cast<std::size_t>(i)]; }
  std::size_t size() const { return nodes_.size(); }

 private:
  int intern(const NNode& n) {
    auto key = n.tie();
    auto it = ids_.find(key);
    if (it != ids_.end()) return it->second;
    nodes_.push_back(n);
    const int id = static_cast<int>(nodes_.size() - 1);
    ids_.emplace(key, id);
    return id;
  }

  const std::function<std::size_t(const Atom&)>& atom_index_;
  std::vector<NNode> nodes_;
  std::map<decltype(NNode{}.tie()), int> ids_;
};

constexpr int initial_marker = -1;

struct TableauNode {
  std::set<int> incoming;
  std::set<int> fresh;
  std::set<int> old;
  std::set<int> next;
};

struct Automaton {
  std::vector<std::set<int>> incoming;  // may contain initial_marker
  std::vector<std::vector<std::pair<std::size_t, bool>>> literals;
  std::vector<std::vector<bool>> accepting;  // [set][state]
  std::vector<std::vector<std::size_t>> successors;
  std::vector<std::size_t> initial;
};

// Tableau construction of a generalized Büchi automaton (one acceptance set per until).
class Tableau {
 public:
  explicit Tableau(const NnfTable& table) : table_(table) {}

  Automaton build(int root) {
    TableauNode start;
    start.incoming.insert(initial_marker);
    start.fresh.insert(root);
    expand(std::move(start));

    Automaton a;
    const std::size_t n = done_.size();
    a.incoming.resize(n);
    a.literals.resize(n);
    a.successors.resize(n);
    for (std::size_t q = 0; q < n; ++q) {
      a.incoming[q] = done_[q].incoming;
      for (int f : done_[q].old) {
        if (table_[f].op == NOp::literal) a.literals[q].push_back({table_[f].atom, table_[f].positive});
      }
      for (int src : done_[q].incoming) {
        if (src == initial_marker) {
          a.initial.push_back(q);
        } else {
          a.successors[static_cast<std::size_t>(src)].push_back(q);
        }
      }
    }
    for (std::size_t i = 0; i < table_.size(); ++i) {
      const NNode& u = table_[static_cast<int>(i)];
      if (u.op != NOp::until) continue;
      std::vector<bool> set(n);
      for (std::size_t q = 0; q < n; ++q) {
        set[q] = !done_[q].old.contains(static_cast<int>(i)) || done_[q].old.contains(u.right);
      }
      a.accepting.push_back(std::move(set));
    }
    return a;
  }

 private:
  bool contradicts(const TableauNode& node, const NNode& lit) const {
    for (int f : node.old) {
      const NNode& g = table_[f];
      if (g.op == NOp::literal && g.atom == lit.atom && g.positive != lit.positive) return true;
    }
    return false;
  }

  void expand(TableauNode node) {
    if (node.fresh.empty()) {
      for (TableauNode& d : done_) {
        if (d.old == node.old && d.next == node.next) {
          d.incoming.insert(node.incoming.begin(), node.incoming.end());
          return;
        }
      }
      done_.push_back(node);
      TableauNode succ;
      succ.incoming.insert(static_cast<int>(done_.size() - 1));
      succ.fresh = node.next;
      expand(std::move(succ));
      return;
    }
    const int eta = *node.fresh.begin();
    node.fresh.erase(node.fresh.begin());
    if (node.old.contains(eta)) {
      expand(std::move(node));
      return;
    }
    const NNode& f = table_[eta];
    auto add_fresh = [&](TableauNode& n, int g) {
      if (!n.old.contains(g)) n.fresh.insert(g);
    };
    switch (f.op) {
      case NOp::falsity: return;
      case NOp::truth:
        node.old.insert(eta);
        expand(std::move(node));
        return;
      case NOp::literal:
        if (contradicts(node, f)) return;
        node.old.insert(eta);
        expand(std::move(node));
        return;
      case NOp::conj:
        node.old.insert(eta);
        add_fresh(node, f.left);
        add_fresh(node, f.right);
        expand(std::move(node));
        return;
      case NOp::next:
        node.old.insert(eta);
        node.next.insert(f.left);
        expand(std::move(node));
        return;
      case NOp::disj:
      case NOp::until:
      case NOp::release: {
        TableauNode first = node;
        TableauNode second = std::move(node);
        first.old.insert(eta);
        second.old.insert(eta);
        if (f.op == NOp::disj) {
          add_fresh(first, f.left);
          add_fresh(second, f.right);
        } else if (f.op == NOp::until) {
          add_fresh(first, f.left);
          first.next.insert(eta);
          add_fresh(second, f.right);
        } else {
          add_fresh(first, f.right);
          first.next.insert(eta);
          add_fresh(second, f.left);
          add_fresh(second, f.right);
        }
        expand(std::move(first));
        expand(std::move(second));
        return;
      }
    }
  }

  const NnfTable& table_;
  std::vector<TableauNode> done_;
};

// Product of the Kripke structure with the degeneralized automaton, generated on the fly.
class Product {
 public:
  struct State {
    std::size_t kripke;
    std::size_t automaton;
    std::size_t counter;
  };
  struct Step {
    std::size_t target;
    std::size_t kripke_edge;
  };

  Product(const KripkeStructure& k, const Automaton& a) : k_(k), a_(a), sets_(std::max<std::size_t>(1, a.accepting.size())) {}

  std::vector<std::size_t> initial_states() {
    std::vector<std::size_t> out;
    for (std::size_t q : a_.initial) {
      if (consistent(k_.initial, q)) out.push_back(intern({k_.initial, q, 0}));
    }
    return out;
  }

  const std::vector<Step>& post(std::size_t id) {
    if (expanded_[id]) return post_[id];
    expanded_[id] = true;
    const State s = states_[id];
    const std::size_t counter = in_set(s.counter, s.automaton) ? (s.counter + 1) % sets_ : s.counter;
    std::vector<Step> out;
    const auto& ksucc = k_.successors[s.kripke];
    for (std::size_t e = 0; e < ksucc.size(); ++e) {
      for (std::size_t q : a_.successors[s.automaton]) {
        if (consistent(ksucc[e], q)) out.push_back({intern({ksucc[e], q, counter}), e});
      }
    }
    post_[id] = std::move(out);
    return post_[id];
  }

  bool accepting(std::size_t id) const { return states_[id].counter == 0 && in_set(0, states_[id].automaton); }
  const State& state(std::size_t id) const { return states_[id]; }
  std::size_t size() const { return states_.size(); }

 private:
  bool in_set(std::size_t set, std::size_t q) const {
    return a_.accepting.empty() ? true : static_cast<bool>(a_.accepting[set][q]);
  }

  bool consistent(std::size_t kripke, std::size_t q) const {
    for (const auto& [atom, positive] : a_.literals[q]) {
      if (k_.labels[kripke][atom] != positive) return false;
    }
    return true;
  }

  std::size_t intern(const State& s) {
    auto key = std::tuple(s.kripke, s.automaton, s.counter);
    auto it = ids_.find(key);
    if (it != ids_.end()) return it->second;
    states_.push_back(s);
    post_.emplace_back();
    expanded_.push_back(false);
    ids_.emplace(key, states_.size() - 1);
    return states_.size() - 1;
  }

  const KripkeStructure& k_;
  const Automaton& a_;
  std::size_t sets_;
  std::vector<State> states_;
  std::deque<std::vector<Step>> post_;
  std::vector<bool> expanded_;
  std::map<std::tuple<std::size_t, std::size_t, std::size_t>, std::size_t> ids_;
};

// Nested depth-first search with cyan/blue/red colouring, run iteratively.
class NestedSearch {
 public:
  explicit NestedSearch(Product& p) : p_(p) {}

  // Returns product states of the prefix and of the cycle, each paired with the
  // Kripke edge taken to leave it.
  std::optional<std::pair<std::vector<Product::Step>, std::vector<Product::Step>>> run() {
    for (std::size_t root : p_.initial_states()) {
      grow();
      if (color_[root] != Color::white) continue;
      if (auto found = blue(root)) return found;
    }
    return std::nullopt;
  }

 private:
  enum class Color { white, cyan, blue, red };
  struct Frame {
    std::size_t state;
    std::size_t next = 0;
  };
  using Result = std::pair<std::vector<Product::Step>, std::vector<Product::Step>>;

  void grow() {
    if (color_.size() < p_.size()) color_.resize(p_.size(), Color::white);
  }

  std::optional<Result> blue(std::size_t root) {
    std::vector<Frame> stack{{root}};
    color_[root] = Color::cyan;
    while (!stack.empty()) {
      Frame& top = stack.back();
      const auto& post = p_.post(top.state);
      grow();
      if (top.next < post.size()) {
        const Product::Step step = post[top.next++];
        const Color c = color_[step.target];
        if (c == Color::cyan && (p_.accepting(top.state) || p_.accepting(step.target))) {
          return close_cycle(stack, {}, step);
        }
        if (c == Color::white) {
          color_[step.target] = Color::cyan;
          stack.push_back({step.target});
        }
        continue;
      }
      const std::size_t s = top.state;
      if (p_.accepting(s)) {
        if (auto found = red(s, stack)) return found;
        color_[s] = Color::red;
      } else {
        color_[s] = Color::blue;
      }
      stack.pop_back();
    }
    return std::nullopt;
  }

  std::optional<Result> red(std::size_t seed, const std::vector<Frame>& blue_stack) {
    std::vector<Frame> stack{{seed}};
    while (!stack.empty()) {
      Frame& top = stack.back();
      const auto& post = p_.post(top.state);
      grow();
      if (top.next >= post.size()) {
        stack.pop_back();
        continue;
      }
      const Product::Step step = post[top.next++];
      if (color_[step.target] == Color::cyan) return close_cycle(blue_stack, stack, step);
      if (color_[step.target] == Color::blue) {
        color_[step.target] = Color::red;
        stack.push_back({step.target});
      }
    }
    return std::nullopt;
  }

  // The blue stack runs from an initial state to the seed; the red stack (if
  // any) continues from the seed; `closing` returns to a cyan state on the blue stack.
  Result close_cycle(const std::vector<Frame>& blue_stack, const std::vector<Frame>& red_stack,
                     const Product::Step& closing) {
    std::vector<Product::Step> path;
    auto edge_of = [&](const Frame& f) { return p_.post(f.state)[f.next - 1].kripke_edge; };
    for (const Frame& f : blue_stack) path.push_back({f.state, 0});
    // Every frame but the last left along its most recent successor.
    for (std::size_t i = 0; i + 1 < blue_stack.size(); ++i) path[i].kripke_edge = edge_of(blue_stack[i]);
    if (red_stack.empty()) {
      path.back().kripke_edge = closing.kripke_edge;
    } else {
      path.back().kripke_edge = edge_of(red_stack.front());
      for (std::size_t i = 1; i < red_stack.size(); ++i) path.push_back({red_stack[i].state, edge_of(red_stack[i])});
      path.back().kripke_edge = closing.kripke_edge;
    }
    std::size_t entry = 0;
    while (path[entry].target != closing.target) ++entry;
    Result r;
    r.first.assign(path.begin(), path.begin() + static_cast<std::ptrdiff_t>(entry));
    r.second.assign(path.begin() + static_cast<std::ptrdiff_t>(entry), path.end());
    return r;
  }

  Product& p_;
  std::vector<Color> color_;
};

// Looks for a violation whose cycle stays in one terminal Kripke state (a
// state whose only successor is itself), reached by a shortest product path.
std::optional<std::pair<std::vector<Product::Step>, std::vector<Product::Step>>> terminal_witness(
    Product& p, const KripkeStructure& k) {
  auto terminal = [&](std::size_t s) { return k.successors[s].size() == 1 && k.successors[s][0] == s; };
  // parent[v] = (u, kripke edge taken from u)
  std::unordered_map<std::size_t, std::pair<std::size_t, std::size_t>> parent;
  std::vector<std::size_t> queue;
  std::set<std::size_t> seen;
  for (std::size_t r : p.initial_states()) {
    if (seen.insert(r).second) queue.push_back(r);
  }

  // Within one Kripke state: path from `from` to `to` (exclusive of `to`) as steps.
  auto local_path = [&](std::size_t from, std::size_t to, bool nonempty) -> std::optional<std::vector<Product::Step>> {
    const std::size_t s = p.state(from).kripke;
    std::unordered_map<std::size_t, std::size_t> prev;
    std::vector<std::size_t> q{from};
    std::set<std::size_t> visited;
    if (!nonempty) {
      if (from == to) return std::vector<Product::Step>{};
      visited.insert(from);
    }
    for (std::size_t i = 0; i < q.size(); ++i) {
      const std::size_t u = q[i];
      for (const auto& step : p.post(u)) {
        if (p.state(step.target).kripke != s || visited.contains(step.target)) continue;
        visited.insert(step.target);
        prev[step.target] = u;
        if (step.target == to) {
          std::vector<Product::Step> path;
          std::size_t v = to;
          do {
            v = prev.at(v);
            path.push_back({v, 0});
          } while (v != from || path.size() == 0);
          std::reverse(path.begin(), path.end());
          return path;
        }
        q.push_back(step.target);
      }
    }
    return std::nullopt;
  };

  for (std::size_t i = 0; i < queue.size(); ++i) {
    const std::size_t u = queue[i];
    const std::size_t s = p.state(u).kripke;
    if (terminal(s)) {
      // Accepting states reachable from u inside s that lie on a cycle.
      std::vector<std::size_t> local{u};
      std::set<std::size_t> in_local{u};
      for (std::size_t j = 0; j < local.size(); ++j) {
        for (const auto& step : p.post(local[j])) {
          if (p.state(step.target).kripke == s && in_local.insert(step.target).second) local.push_back(step.target);
        }
      }
      for (std::size_t a : local) {
        if (!p.accepting(a)) continue;
        auto cycle = local_path(a, a, true);
        if (!cycle) continue;
        std::vector<Product::Step> prefix;
        for (std::size_t v = u; parent.contains(v);) {
          const auto [pu, edge] = parent.at(v);
          prefix.push_back({pu, edge});
          v = pu;
        }
        std::reverse(prefix.begin(), prefix.end());
        auto lead = local_path(u, a, false);
        prefix.insert(prefix.end(), lead->begin(), lead->end());
        return std::pair{std::move(prefix), std::move(*cycle)};
      }
    }
    for (const auto& step : p.post(u)) {
      if (!seen.insert(step.target).second) continue;
      parent[step.target] = {u, step.kripke_edge};
      queue.push_back(step.target);
    }
  }
  return std::nullopt;
}

std::vector<PathStep> project(const Product& p, const std::vector<Product::Step>& steps) {
  std::vector<PathStep> out;
  for (const auto& s : steps) out.push_back({p.state(s.target).kripke, s.kripke_edge});
  return out;
}

bool same_step(const PathStep& a, const PathStep& b) { return a.state == b.state && a.edge == b.edge; }

// Shrinks a cycle to its smallest period and folds matching prefix tails into it.
void compress(IndexLasso& lasso) {
  auto& cyc = lasso.cycle;
  const std::size_t n = cyc.size();
  for (std::size_t period = 1; period < n; ++period) {
    if (n % period) continue;
    bool periodic = true;
    for (std::size_t i = period; i < n && periodic; ++i) periodic = same_step(cyc[i], cyc[i - period]);
    if (periodic) {
      cyc.resize(period);
      break;
    }
  }
  while (!lasso.prefix.empty() && same_step(lasso.prefix.back(), cyc.back())) {
    std::rotate(cyc.rbegin(), cyc.rbegin() + 1, cyc.rend());
    lasso.prefix.pop_back();
  }
}

}  // namespace

std::optional<IndexLasso> find_violation(const KripkeStructure& k, const Formula& f,
                                         const std::function<std::size_t(const Atom&)>& atom_index) {
  if (k.successors.size() != k.labels.size() || k.initial >= k.successors.size()) {
    throw Error("malformed Kripke structure");
  }
  for (const auto& s : k.successors) {
    if (s.empty()) throw Error("Kripke structure has a state without successors");
  }
  NnfTable table(atom_index);
  const int root = table.convert(f, true);
  Automaton automaton = Tableau(table).build(root);
  Product product(k, automaton);
  auto found = NestedSearch(product).run();
  if (!found) return std::nullopt;
  if (auto terminal = terminal_witness(product, k)) found = std::move(terminal);
  IndexLasso lasso{project(product, found->first), project(product, found->second)};
  compress(lasso);
  return lasso;
}

Verdict model_check(const StateGraph& graph, const Formula& f, const Semantics& sem) {
  const std::vector<Atom> atoms = collect_atoms(f);
  if (graph.identity == StateIdentity::semantic) {
    for (const Atom& a : atoms) {
      for (const PatternEntry& e : a.pattern) {
        if (e.place) {
          throw FormulaError("id-addressed pattern " + to_string(a) + " is not invariant under semantic state identity", 0);
        }
      }
    }
  }
  KripkeStructure k;
  k.initial = 0;
  k.successors.resize(graph.size());
  k.labels.resize(graph.size());
  for (std::size_t s = 0; s < graph.size(); ++s) {
    for (const Edge& e : graph.edges[s]) k.successors[s].push_back(e.target);
    if (k.successors[s].empty()) k.successors[s].push_back(s);
    for (const Atom& a : atoms) k.labels[s].push_back(eval_atom(graph.states[s], a, sem));
  }
  auto index = [&](const Atom& a) {
    return static_cast<std::size_t>(std::find(atoms.begin(), atoms.end(), a) - atoms.begin());
  };

  Verdict v;
  v.states = graph.size();
  v.edges = graph.edge_count();
  auto found = find_violation(k, f, index);
  if (!found) return v;

  auto to_step = [&](const PathStep& p) {
    const auto& edges = graph.edges[p.state];
    ActionLabel action = edges.empty() ? ActionLabel::deadlock_loop() : edges[p.edge].action;
    return LassoStep{graph.states[p.state], std::move(action)};
  };
  Lasso lasso;
  for (const PathStep& p : found->prefix) lasso.prefix.push_back(to_step(p));
  for (const PathStep& p : found->cycle) lasso.cycle.push_back(to_step(p));
  lasso.deadlock_tail = lasso.cycle.size() == 1 && lasso.cycle.front().action.kind == ActionLabel::Kind::deadlock;
  v.holds = false;
  v.counterexample = std::move(lasso);
  return v;
}

Verdict model_check(const Configuration& initial, const Formula& f, const ExploreOptions& options) {
  check_atom_labels(f, initial);
  StateGraph graph = explore(initial, options);
  if (graph.truncated) throw StateSpaceExceeded(graph.size());
  return model_check(graph, f, options.semantics);
}

bool replay_lasso(const Configuration& initial, const Lasso& lasso, const ExploreOptions& options) {
  if (lasso.cycle.empty()) return false;
  std::vector<const LassoStep*> steps;
  for (const auto& s : lasso.prefix) steps.push_back(&s);
  for (const auto& s : lasso.cycle) steps.push_back(&s);
  if (canonical_key(steps.front()->config, options.identity) != canonical_key(initial, options.identity)) return false;

  for (std::size_t i = 0; i < steps.size(); ++i) {
    const LassoStep& step = *steps[i];
    const LassoStep& target = i + 1 < steps.size() ? *steps[i + 1] : lasso.cycle.front();
    const std::string want = canonical_key(target.config, options.identity);
    const std::vector<Successor> next = successors(step.config, options.semantics);
    if (step.action.kind == ActionLabel::Kind::deadlock) {
      if (!next.empty() || canonical_key(step.config, options.identity) != want) return false;
      continue;
    }
    auto it = std::find_if(next.begin(), next.end(), [&](const Successor& s) { return s.action == step.action; });
    if (it == next.end() || canonical_key(it->config, options.identity) != want) return false;
  }
  return true;
}

}  // namespace rpn
