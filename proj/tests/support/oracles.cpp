#include "oracles.hpp"

#include <algorithm>
#include <set>

namespace rpn::test {

DenseNet densify(const PetriNet& net) {
  DenseNet d;
  std::map<IdValue, std::size_t> index;
  for (const auto& [id, p] : net.places()) {
    index[id.value] = d.place_ids.size();
    d.place_ids.push_back(id.value);
    d.cap.push_back(p.capacity.is_omega() ? -1 : static_cast<std::int64_t>(p.capacity.bound()));
    d.tokens.push_back(net.marking().count(id));
  }
  for (const auto& [id, t] : net.transitions()) {
    d.transition_ids.push_back(id.value);
    std::vector<std::int64_t> pre(d.place_ids.size(), 0), post(d.place_ids.size(), 0);
    for (const auto& [p, n] : net.pre(id)) pre[index.at(p.value)] = n;
    for (const auto& [p, n] : net.post(id)) post[index.at(p.value)] = n;
    d.pre.push_back(pre);
    d.post.push_back(post);
  }
  return d;
}

bool oracle_activated(const DenseNet& d, std::size_t t, bool strict) {
  for (std::size_t p = 0; p < d.place_ids.size(); ++p) {
    if (d.tokens[p] < d.pre[t][p]) return false;
  }
  for (std::size_t p = 0; p < d.place_ids.size(); ++p) {
    if (d.post[t][p] == 0 || d.cap[p] < 0) continue;
    const std::int64_t base = strict ? d.tokens[p] : d.tokens[p] - d.pre[t][p];
    if (base + d.post[t][p] > d.cap[p]) return false;
  }
  return true;
}

std::vector<std::int64_t> oracle_fire(const DenseNet& d, std::size_t t) {
  std::vector<std::int64_t> m = d.tokens;
  for (std::size_t p = 0; p < m.size(); ++p) m[p] += d.post[t][p] - d.pre[t][p];
  return m;
}

namespace {

/// Calls `visit` with every injective sequence of length k over [0, n).
void injections(std::size_t k, std::size_t n, const std::function<void(const std::vector<std::size_t>&)>& visit) {
  std::vector<std::size_t> seq;
  std::vector<bool> used(n, false);
  std::function<void()> rec = [&] {
    if (seq.size() == k) {
      visit(seq);
      return;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (used[i]) continue;
      used[i] = true;
      seq.push_back(i);
      rec();
      seq.pop_back();
      used[i] = false;
    }
  };
  rec();
}

}  // namespace

std::vector<Match> brute_force_matches(const PetriNet& net, const Rule& rule) {
  std::vector<PlaceId> lp, hp;
  std::vector<TransitionId> lt, ht;
  for (const auto& [id, p] : rule.lhs.places()) lp.push_back(id);
  for (const auto& [id, p] : net.places()) hp.push_back(id);
  for (const auto& [id, t] : rule.lhs.transitions()) lt.push_back(id);
  for (const auto& [id, t] : net.transitions()) ht.push_back(id);

  std::vector<std::pair<std::vector<IdValue>, Match>> found;
  if (lp.size() > hp.size() || lt.size() > ht.size()) return {};
  injections(lt.size(), ht.size(), [&](const std::vector<std::size_t>& tsel) {
    injections(lp.size(), hp.size(), [&](const std::vector<std::size_t>& psel) {
      for (std::size_t i = 0; i < lt.size(); ++i) {
        if (rule.lhs.transition(lt[i]).label != net.transition(ht[tsel[i]]).label) return;
      }
      for (std::size_t j = 0; j < lp.size(); ++j) {
        const Place& a = rule.lhs.place(lp[j]);
        const Place& b = net.place(hp[psel[j]]);
        if (a.label != b.label || !(a.capacity == b.capacity)) return;
        if (rule.lhs.marking().count(lp[j]) > net.marking().count(hp[psel[j]])) return;
      }
      for (std::size_t i = 0; i < lt.size(); ++i) {
        for (std::size_t j = 0; j < lp.size(); ++j) {
          if (rule.lhs.pre(lt[i]).count(lp[j]) != net.pre(ht[tsel[i]]).count(hp[psel[j]])) return;
          if (rule.lhs.post(lt[i]).count(lp[j]) != net.post(ht[tsel[i]]).count(hp[psel[j]])) return;
        }
      }
      Match m;
      m.rule = &rule;
      std::vector<IdValue> key;
      for (std::size_t i = 0; i < lt.size(); ++i) {
        m.transition_map[lt[i]] = ht[tsel[i]];
        key.push_back(ht[tsel[i]].value);
      }
      for (std::size_t j = 0; j < lp.size(); ++j) {
        m.place_map[lp[j]] = hp[psel[j]];
        key.push_back(hp[psel[j]].value);
      }
      found.emplace_back(std::move(key), std::move(m));
    });
  });
  std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<Match> out;
  for (auto& [k, m] : found) out.push_back(std::move(m));
  return out;
}

bool oracle_dangling(const PetriNet& net, const Match& m) {
  std::vector<std::pair<IdValue, IdValue>> arcs;  // (transition, place)
  for (const auto& [t, pre] : net.pre_sets()) {
    for (const auto& [p, n] : pre) arcs.emplace_back(t.value, p.value);
  }
  for (const auto& [t, post] : net.post_sets()) {
    for (const auto& [p, n] : post) arcs.emplace_back(t.value, p.value);
  }
  std::set<IdValue> doomed_places, doomed_transitions;
  for (const auto& [rp, hp] : m.place_map) {
    if (!m.rule->rhs.has_place(rp)) doomed_places.insert(hp.value);
  }
  for (const auto& [rt, ht] : m.transition_map) {
    if (!m.rule->rhs.has_transition(rt)) doomed_transitions.insert(ht.value);
  }
  return std::all_of(arcs.begin(), arcs.end(), [&](const auto& a) {
    return !doomed_places.contains(a.second) || doomed_transitions.contains(a.first);
  });
}

bool oracle_deleted_marking(const PetriNet& net, const Match& m) {
  for (const auto& [rp, hp] : m.place_map) {
    if (m.rule->rhs.has_place(rp)) continue;
    if (m.rule->lhs.marking().count(rp) != net.marking().count(hp)) return false;
  }
  return true;
}

namespace {

std::vector<bool> evaluate(const Formula& f, const std::vector<std::vector<bool>>& labels, std::size_t loop,
                           const std::function<std::size_t(const Atom&)>& atom_index) {
  const std::size_t n = labels.size();
  auto succ = [&](std::size_t i) { return i + 1 < n ? i + 1 : loop; };
  auto sub = [&](const FormulaPtr& g) { return evaluate(*g, labels, loop, atom_index); };
  std::vector<bool> v(n);
  switch (f.op) {
    case Formula::Op::truth: v.assign(n, true); break;
    case Formula::Op::falsity: v.assign(n, false); break;
    case Formula::Op::atom:
      for (std::size_t i = 0; i < n; ++i) v[i] = labels[i][atom_index(f.atom)];
      break;
    case Formula::Op::negation: {
      auto a = sub(f.left);
      for (std::size_t i = 0; i < n; ++i) v[i] = !a[i];
      break;
    }
    case Formula::Op::conjunction:
    case Formula::Op::disjunction:
    case Formula::Op::implication: {
      auto a = sub(f.left), b = sub(f.right);
      for (std::size_t i = 0; i < n; ++i) {
        if (f.op == Formula::Op::conjunction) v[i] = a[i] && b[i];
        if (f.op == Formula::Op::disjunction) v[i] = a[i] || b[i];
        if (f.op == Formula::Op::implication) v[i] = !a[i] || b[i];
      }
      break;
    }
    case Formula::Op::next: {
      auto a = sub(f.left);
      for (std::size_t i = 0; i < n; ++i) v[i] = a[succ(i)];
      break;
    }
    case Formula::Op::until:
    case Formula::Op::release:
    case Formula::Op::always:
    case Formula::Op::eventually: {
      const bool unary = f.op == Formula::Op::always || f.op == Formula::Op::eventually;
      std::vector<bool> a(n), b;
      if (unary) {
        a.assign(n, f.op == Formula::Op::eventually);
        b = sub(f.left);
      } else {
        a = sub(f.left);
        b = sub(f.right);
      }
      const bool least = f.op == Formula::Op::until || f.op == Formula::Op::eventually;
      v.assign(n, !least);
      // n sweeps from the back reach the fixpoint on a lasso of n positions
      for (std::size_t sweep = 0; sweep <= n; ++sweep) {
        for (std::size_t k = n; k-- > 0;) {
          v[k] = least ? (b[k] || (a[k] && v[succ(k)])) : (b[k] && (a[k] || v[succ(k)]));
        }
      }
      break;
    }
  }
  return v;
}

}  // namespace

bool lasso_satisfies(const Formula& f, const std::vector<std::vector<bool>>& labels, std::size_t loop_start,
                     const std::function<std::size_t(const Atom&)>& atom_index) {
  return evaluate(f, labels, loop_start, atom_index).at(0);
}

NaiveResult naive_check(const KripkeStructure& k, const Formula& f,
                        const std::function<std::size_t(const Atom&)>& atom_index, std::size_t max_len,
                        std::size_t path_budget) {
  NaiveResult result;
  std::vector<std::size_t> path{k.initial};
  std::size_t paths = 0;
  std::function<bool()> dfs = [&]() -> bool {
    if (++paths > path_budget) {
      result.exhausted = false;
      return true;
    }
    const std::size_t last = path.back();
    for (std::size_t next : k.successors[last]) {
      for (std::size_t j = 0; j < path.size(); ++j) {
        if (path[j] != next) continue;
        std::vector<std::vector<bool>> word;
        for (std::size_t s : path) word.push_back(k.labels[s]);
        if (!lasso_satisfies(f, word, j, atom_index)) {
          result.violated = true;
          return true;
        }
      }
    }
    if (path.size() >= max_len) return false;
    for (std::size_t next : k.successors[last]) {
      path.push_back(next);
      if (dfs()) return true;
      path.pop_back();
    }
    return false;
  };
  dfs();
  return result;
}

KripkeStructure kripke_of(const StateGraph& g, const std::vector<Atom>& atoms) {
  KripkeStructure k;
  k.successors.resize(g.size());
  k.labels.resize(g.size());
  for (std::size_t s = 0; s < g.size(); ++s) {
    for (const Edge& e : g.edges[s]) k.successors[s].push_back(e.target);
    if (k.successors[s].empty()) k.successors[s].push_back(s);
    for (const Atom& a : atoms) k.labels[s].push_back(eval_atom(g.states[s], a));
  }
  return k;
}

bool lasso_violates(const Lasso& lasso, const Formula& f) {
  const std::vector<Atom> atoms = collect_atoms(f);
  auto index = [&](const Atom& a) {
    return static_cast<std::size_t>(std::find(atoms.begin(), atoms.end(), a) - atoms.begin());
  };
  std::vector<std::vector<bool>> word;
  auto push = [&](const LassoStep& s) {
    std::vector<bool> row;
    for (const Atom& a : atoms) row.push_back(eval_atom(s.config, a));
    word.push_back(row);
  };
  for (const auto& s : lasso.prefix) push(s);
  for (const auto& s : lasso.cycle) push(s);
  return !lasso_satisfies(f, word, lasso.prefix.size(), index);
}

namespace {

std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

bool coin(Rng& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

}  // namespace

PetriNet random_net(Rng& rng, const NetShape& shape) {
  PetriNet net;
  const std::size_t np = pick(rng, 1, shape.max_places);
  const std::size_t nt = pick(rng, 0, shape.max_transitions);
  for (std::size_t i = 1; i <= np; ++i) {
    Capacity cap = Capacity::omega();
    if (shape.finite_capacities && coin(rng, 0.7)) cap = Capacity::bounded(static_cast<TokenCount>(pick(rng, 1, 3)));
    net.add_place({shape.labels[pick(rng, 0, shape.labels.size() - 1)], PlaceId{static_cast<IdValue>(i)}, cap});
  }
  for (std::size_t j = 0; j < nt; ++j) {
    const TransitionId t{static_cast<IdValue>(np + 1 + j)};
    net.add_transition({coin(rng, 0.8) ? "T" : "U", t});
    for (std::size_t i = 1; i <= np; ++i) {
      const PlaceId p{static_cast<IdValue>(i)};
      if (coin(rng, 0.35)) net.add_pre_arc(t, p, static_cast<TokenCount>(pick(rng, 1, shape.max_weight)));
      if (coin(rng, 0.35)) net.add_post_arc(t, p, static_cast<TokenCount>(pick(rng, 1, shape.max_weight)));
    }
  }
  Marking m;
  for (const auto& [id, p] : net.places()) {
    TokenCount n = static_cast<TokenCount>(pick(rng, 0, shape.max_tokens));
    if (!p.capacity.is_omega()) n = std::min(n, p.capacity.bound());
    if (n) m.add(id, n);
  }
  net.set_marking(m);
  return net;
}

Rule random_rule(Rng& rng, const std::string& name, const std::vector<std::string>& labels) {
  Rule r;
  r.name = name;
  const std::size_t np = pick(rng, 1, 3);
  const std::size_t nt = pick(rng, 0, 2);
  std::set<IdValue> kept_places;
  for (std::size_t i = 1; i <= np; ++i) {
    const Place p{labels[pick(rng, 0, labels.size() - 1)], PlaceId{static_cast<IdValue>(i)}, Capacity::omega()};
    r.lhs.add_place(p);
    if (coin(rng)) {
      r.rhs.add_place(p);
      kept_places.insert(p.id.value);
    }
  }
  Marking lm;
  for (std::size_t i = 1; i <= np; ++i) {
    if (coin(rng, 0.4)) lm.add(PlaceId{static_cast<IdValue>(i)});
  }
  r.lhs.set_marking(lm);
  for (std::size_t j = 0; j < nt; ++j) {
    const TransitionId t{static_cast<IdValue>(np + 1 + j)};
    r.lhs.add_transition({"T", t});
    bool touches_deleted = false;
    for (std::size_t i = 1; i <= np; ++i) {
      const PlaceId p{static_cast<IdValue>(i)};
      const bool in = coin(rng, 0.4), out = coin(rng, 0.4);
      if (in) r.lhs.add_pre_arc(t, p);
      if (out) r.lhs.add_post_arc(t, p);
      if ((in || out) && !kept_places.contains(p.value)) touches_deleted = true;
    }
    if (!touches_deleted && coin(rng)) {
      r.rhs.add_transition({"T", t});
      r.rhs.set_pre(t, r.lhs.pre(t));
      r.rhs.set_post(t, r.lhs.post(t));
    }
  }
  IdValue next = static_cast<IdValue>(np + nt + 1);
  if (coin(rng)) r.rhs.add_place({labels[pick(rng, 0, labels.size() - 1)], PlaceId{next++}, Capacity::omega()});
  if (coin(rng)) {
    const TransitionId t{next++};
    r.rhs.add_transition({"T", t});
    for (const auto& [p, place] : r.rhs.places()) {
      if (coin(rng, 0.4)) r.rhs.add_pre_arc(t, p);
      if (coin(rng, 0.4)) r.rhs.add_post_arc(t, p);
    }
  }
  Marking rm;
  for (const auto& [p, place] : r.rhs.places()) {
    if (coin(rng, 0.4)) rm.add(p);
  }
  r.rhs.set_marking(rm);
  return r;
}

FormulaPtr random_formula(Rng& rng, std::size_t depth, const std::vector<Atom>& atoms) {
  if (depth == 0 || coin(rng, 0.2)) {
    if (coin(rng, 0.08)) return Formula::constant(coin(rng));
    return Formula::make_atom(atoms[pick(rng, 0, atoms.size() - 1)]);
  }
  using Op = Formula::Op;
  static const Op unary[] = {Op::negation, Op::next, Op::always, Op::eventually};
  static const Op binary[] = {Op::conjunction, Op::disjunction, Op::implication, Op::until, Op::release};
  if (coin(rng)) return Formula::unary(unary[pick(rng, 0, 3)], random_formula(rng, depth - 1, atoms));
  const Op op = binary[pick(rng, 0, 4)];
  auto lhs = random_formula(rng, depth - 1, atoms);
  auto rhs = random_formula(rng, depth - 1, atoms);
  return Formula::binary(op, lhs, rhs);
}

}  // namespace rpn::test
