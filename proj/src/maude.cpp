#include "rpn/maude.hpp"

#include <array>
#include <map>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace rpn {

namespace {

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
  return out;
}

// How the ids of a net are written: concrete numbers or rule variables.
using IdWriter = std::function<std::string(IdValue, bool is_place)>;

std::string concrete(IdValue id, bool) { return std::to_string(id); }

std::string place_term(const Place& p, const IdWriter& id) {
  return "p(" + quote(p.label) + " | " + id(p.id.value, true) + " | " + std::to_string(p.capacity.rendered()) + ")";
}

std::string transition_term(const Transition& t, const IdWriter& id) {
  return "t(" + quote(t.label) + " | " + id(t.id.value, false) + ")";
}

std::string marking_terms(const PetriNet& net, const Marking& m, const IdWriter& id) {
  std::vector<std::string> parts;
  for (const auto& [p, n] : m) {
    for (TokenCount k = 0; k < n; ++k) parts.push_back(place_term(net.place(p), id));
  }
  return join(parts, " ; ");
}

struct NetParts {
  std::vector<std::string> places;
  std::vector<std::string> transitions;
  std::vector<std::string> pre;
  std::vector<std::string> post;
  std::string marking;
};

NetParts net_parts(const PetriNet& net, const IdWriter& id) {
  NetParts parts;
  for (const auto& [pid, p] : net.places()) parts.places.push_back(place_term(p, id));
  for (const auto& [tid, t] : net.transitions()) {
    const std::string tt = transition_term(t, id);
    parts.transitions.push_back(tt);
    const std::string pre = marking_terms(net, net.pre(tid), id);
    const std::string post = marking_terms(net, net.post(tid), id);
    parts.pre.push_back("(" + tt + " --> " + (pre.empty() ? "emptyMarking" : pre) + ")");
    parts.post.push_back("(" + tt + " --> " + (post.empty() ? "emptyMarking" : post) + ")");
  }
  parts.marking = marking_terms(net, net.marking(), id);
  return parts;
}

// Joins the listed elements with `sep`, appending `rest` (a variable) when given.
std::string collection(const std::vector<std::string>& items, const std::string& sep, const std::string& empty,
                       const std::string& rest = "") {
  std::vector<std::string> all = items;
  if (!rest.empty()) all.push_back(rest);
  return all.empty() ? empty : join(all, sep);
}

std::string net_term(const PetriNet& net, const IdWriter& id, const std::array<std::string, 5>& rest = {}) {
  const NetParts parts = net_parts(net, id);
  std::vector<std::string> marking;
  if (!parts.marking.empty()) marking.push_back(parts.marking);
  return "net(places{" + collection(parts.places, " , ", "emptyPlace", rest[0]) + "} , transitions{" +
         collection(parts.transitions, " : ", "emptyTransition", rest[1]) + "} , pre{" +
         collection(parts.pre, " , ", "emptyMappingTuple", rest[2]) + "} , post{" +
         collection(parts.post, " , ", "emptyMappingTuple", rest[3]) + "} , marking{" +
         collection(marking, " ; ", "emptyMarking", rest[4]) + "})";
}

std::string padded(IdValue id) {
  std::string s = std::to_string(id);
  return s.size() < 3 ? std::string(3 - s.size(), '0') + s : s;
}

std::string rule_variable(int side, IdValue id) { return "Irule" + std::to_string(side) + padded(id); }

}  // namespace

std::string maude_place(const Place& p) { return place_term(p, concrete); }
std::string maude_transition(const Transition& t) { return transition_term(t, concrete); }
std::string maude_net(const PetriNet& net) { return net_term(net, concrete); }

std::string maude_rule(const Rule& rule) {
  return "rule(l(" + maude_net(rule.lhs) + ") , r(" + maude_net(rule.rhs) + "))";
}

std::string maude_rules(const RuleSet& rules) {
  std::vector<std::string> parts;
  for (const Rule& r : rules.rules()) parts.push_back(maude_rule(r));
  return collection(parts, " | ", "emptyRule");
}

std::string maude_id_set(const IdPool& pool) {
  const auto& ids = pool.available();
  if (ids.empty()) return "emptyIDSet";
  std::string out = std::to_string(ids.back());
  for (std::size_t i = ids.size() - 1; i-- > 0;) out = std::to_string(ids[i]) + ",(" + out + ")";
  return out;
}

std::string maude_configuration(const Configuration& c) {
  return maude_net(c.net) + "\n" + maude_rules(*c.rules) + "\n" + std::to_string(c.max_id) + "\n" +
         std::to_string(c.step_size) + "\naidPlace{" + maude_id_set(c.place_pool) + "}\naidTransition{" +
         maude_id_set(c.transition_pool) + "}";
}

namespace {

const char* const rpn_module = R"(mod RPN is
  protecting INT .
  protecting STRING .

  sorts Places Transitions MappingTuple Pre Post Markings Net .
  sorts Rule LeftHandSide RightHandSide .
  sorts IDSet IDPoolPlace IDPoolTransition Configuration .
  subsort Places < Markings .
  subsort Int < IDSet .

  op emptyPlace : -> Places [ctor] .
  op emptyTransition : -> Transitions [ctor] .
  op emptyMappingTuple : -> MappingTuple [ctor] .
  op emptyMarking : -> Markings [ctor] .
  op emptyIDSet : -> IDSet [ctor] .

  op _,_ : Places Places -> Places [ctor assoc comm id: emptyPlace] .
  op _:_ : Transitions Transitions -> Transitions [ctor assoc comm id: emptyTransition] .
  op _,_ : MappingTuple MappingTuple -> MappingTuple [ctor assoc comm id: emptyMappingTuple] .
  op _;_ : Markings Markings -> Markings [ctor assoc comm id: emptyMarking] .
  op _,_ : IDSet IDSet -> IDSet [ctor assoc id: emptyIDSet] .

  *** label | id | capacity (2147483647 = unbounded)
  op p(_|_|_) : String Int Int -> Places [ctor] .
  op t(_|_) : String Int -> Transitions [ctor] .
  op (_-->_) : Transitions Markings -> MappingTuple [ctor] .

  op places{_} : Places -> Places [ctor] .
  op transitions{_} : Transitions -> Transitions [ctor] .
  op pre{_} : MappingTuple -> Pre [ctor] .
  op post{_} : MappingTuple -> Post [ctor] .
  op marking{_} : Markings -> Markings [ctor] .
  op net : Places Transitions Pre Post Markings -> Net [ctor] .

  op emptyRule : -> Rule [ctor] .
  op _|_ : Rule Rule -> Rule [ctor assoc comm id: emptyRule] .
  op l : Net -> LeftHandSide [ctor] .
  op r : Net -> RightHandSide [ctor] .
  op rule : LeftHandSide RightHandSide -> Rule [ctor] .

  op aidPlace{_} : IDSet -> IDPoolPlace [ctor] .
  op aidTransition{_} : IDSet -> IDPoolTransition [ctor] .
  *** net, rules, max id, step size, place pool, transition pool
  op ______ : Net Rule Int Int IDPoolPlace IDPoolTransition -> Configuration [ctor] .

  vars S : String .
  vars I J C N MaxID StepSize : Int .
  vars P : Places .
  vars T TRest : Transitions .
  vars M MRest PreValue PostValue : Markings .
  vars MTupleRest1 MTupleRest2 : MappingTuple .
  vars IS : IDSet .
  var Rules : Rule .
  var AidP : IDPoolPlace .
  var AidT : IDPoolTransition .

  *** tokens on one place
  op count(_|_) : Markings Markings -> Int .
  eq count(p(S | I | C) | (p(S | I | C) ; M)) = 1 + count(p(S | I | C) | M) .
  eq count(p(S | I | C) | M) = 0 [owise] .

  *** every place of the second argument stays within its capacity in the first
  op withinCapacity(_|_) : Markings Markings -> Bool .
  eq withinCapacity(M | emptyMarking) = true .
  eq withinCapacity(M | (p(S | I | C) ; MRest))
   = count(p(S | I | C) | M) <= C and withinCapacity(M | MRest) .

  crl [fire] :
      net(places{P} , transitions{T : TRest} , pre{(T --> PreValue) , MTupleRest1} ,
          post{(T --> PostValue) , MTupleRest2} , marking{PreValue ; M})
      Rules MaxID StepSize AidP AidT
   => net(places{P} , transitions{T : TRest} , pre{(T --> PreValue) , MTupleRest1} ,
          post{(T --> PostValue) , MTupleRest2} , marking{M ; PostValue})
      Rules MaxID StepSize AidP AidT
   if withinCapacity(M ; PostValue | PostValue) .

  *** identifier pools
  op fill(_|_) : Int Int -> IDSet .
  eq fill(MaxID | 0) = emptyIDSet .
  ceq fill(MaxID | N) = fill(MaxID | N - 1) , (MaxID + N) if N > 0 .

  op getAid(_|_|_) : IDSet Int Int -> Int .
  eq getAid((I , IS) | MaxID | StepSize) = I .
  eq getAid(emptyIDSet | MaxID | StepSize) = MaxID + 1 .

  op removeFirstElement(_|_|_) : IDSet Int Int -> IDSet .
  eq removeFirstElement((I , IS) | MaxID | StepSize) = IS .
  eq removeFirstElement(emptyIDSet | MaxID | StepSize)
   = removeFirstElement(fill(MaxID | StepSize) | MaxID | StepSize) .

  op nextMaxID(_|_|_) : IDSet Int Int -> Int .
  eq nextMaxID(emptyIDSet | MaxID | StepSize) = MaxID + StepSize .
  eq nextMaxID(IS | MaxID | StepSize) = MaxID [owise] .

  op addOldID(_|_) : IDSet Int -> IDSet .
  eq addOldID(IS | I) = I , IS .

  *** gluing helpers
  op emptyNeighbourForPlace(_,_,_) : Places Pre Post -> Bool .
  eq emptyNeighbourForPlace(p(S | I | C) , pre{(T --> (p(S | I | C) ; M)) , MTupleRest1} , post{MTupleRest2}) = false .
  eq emptyNeighbourForPlace(p(S | I | C) , pre{MTupleRest1} , post{(T --> (p(S | I | C) ; M)) , MTupleRest2}) = false .
  eq emptyNeighbourForPlace(P , pre{MTupleRest1} , post{MTupleRest2}) = true [owise] .

  op noTokenOn(_|_) : Places Markings -> Bool .
  eq noTokenOn(P | M) = count(P | M) == 0 .
endm
)";

struct RuleVariables {
  std::set<std::string> ints;
  std::set<std::string> pools;
};

// Host-side id writer for a rule: preserved and deleted elements are bound by
// Irule1 variables, created ones by fresh pool variables.
IdWriter host_ids(const Rule& rule, const std::map<IdValue, std::string>& created) {
  return [&rule, &created](IdValue id, bool) {
    auto it = created.find(id);
    return it != created.end() ? it->second : rule_variable(1, id);
  };
}

std::string rewrite_rule(const Rule& rule, RuleVariables& vars) {
  const std::array<std::string, 5> rests{"PRest", "TRest", "MTupleRest1", "MTupleRest2", "MRest"};
  std::map<IdValue, std::string> created;
  for (std::size_t i = 0; i < rule.created_places().size(); ++i) {
    created[rule.created_places()[i].value] = "AidP" + std::to_string(i + 1);
  }
  for (std::size_t i = 0; i < rule.created_transitions().size(); ++i) {
    created[rule.created_transitions()[i].value] = "AidT" + std::to_string(i + 1);
  }
  const IdWriter host = host_ids(rule, created);
  for (const auto& [p, _] : rule.lhs.places()) vars.ints.insert(rule_variable(1, p.value));
  for (const auto& [t, _] : rule.lhs.transitions()) vars.ints.insert(rule_variable(1, t.value));
  for (const auto& [id, name] : created) vars.ints.insert(name);

  const IdWriter left = [](IdValue id, bool) { return rule_variable(2, id); };
  const IdWriter right = [](IdValue id, bool) { return rule_variable(3, id); };
  for (const auto& [p, _] : rule.lhs.places()) vars.ints.insert(rule_variable(2, p.value));
  for (const auto& [t, _] : rule.lhs.transitions()) vars.ints.insert(rule_variable(2, t.value));
  for (const auto& [p, _] : rule.rhs.places()) vars.ints.insert(rule_variable(3, p.value));
  for (const auto& [t, _] : rule.rhs.transitions()) vars.ints.insert(rule_variable(3, t.value));
  const std::string rule_term =
      "rule(l(" + net_term(rule.lhs, left) + ") ,\n          r(" + net_term(rule.rhs, right) + "))";

  std::vector<std::string> conditions;
  for (PlaceId p : rule.deleted_places()) {
    const std::string term = place_term(rule.lhs.place(p), host);
    conditions.push_back("emptyNeighbourForPlace(" + term + " , pre{MTupleRest1} , post{MTupleRest2})");
    conditions.push_back("noTokenOn(" + term + " | MRest)");
  }

  // Pool bookkeeping mirrors the engine: deleted transitions, then deleted
  // places return their ids; created places, then created transitions draw.
  std::string max_var = "MaxID";
  int max_step = 0;
  struct Chain {
    std::string prefix;
    std::string pool;
    int step = 0;
  };
  Chain pc{"P", "AidPRest"}, tc{"T", "AidTRest"};
  auto advance = [&](Chain& c) {
    std::string v = "Aid" + c.prefix + "Rest" + std::to_string(++c.step);
    vars.pools.insert(v);
    return v;
  };
  auto release = [&](Chain& c, IdValue id) {
    const std::string v = advance(c);
    conditions.push_back(v + " := addOldID(" + c.pool + " | " + rule_variable(1, id) + ")");
    c.pool = v;
  };
  auto acquire = [&](Chain& c, const std::string& fresh) {
    const std::string v = advance(c);
    const std::string m = "MaxID" + std::to_string(++max_step);
    vars.ints.insert(m);
    conditions.push_back(fresh + " := getAid(" + c.pool + " | " + max_var + " | StepSize)");
    conditions.push_back(m + " := nextMaxID(" + c.pool + " | " + max_var + " | StepSize)");
    conditions.push_back(v + " := removeFirstElement(" + c.pool + " | " + max_var + " | StepSize)");
    c.pool = v;
    max_var = m;
  };
  for (TransitionId t : rule.deleted_transitions()) release(tc, t.value);
  for (PlaceId p : rule.deleted_places()) release(pc, p.value);
  for (PlaceId p : rule.created_places()) acquire(pc, created.at(p.value));
  for (TransitionId t : rule.created_transitions()) acquire(tc, created.at(t.value));

  std::ostringstream os;
  os << "  crl [" << rule.name << "] :\n"
     << "      " << net_term(rule.lhs, host, rests) << "\n"
     << "      " << rule_term << "\n"
     << "      | RRest MaxID StepSize\n"
     << "      aidPlace{AidPRest} aidTransition{AidTRest}\n"
     << "   => " << net_term(rule.rhs, host, rests) << "\n"
     << "      " << rule_term << "\n"
     << "      | RRest " << max_var << " StepSize\n"
     << "      aidPlace{" << pc.pool << "} aidTransition{" << tc.pool << "}";
  if (conditions.empty()) conditions.push_back("true");
  os << "\n   if " << join(conditions, "\n   /\\ ") << " .\n";
  return os.str();
}

std::string rules_module(const RuleSet& rules) {
  RuleVariables vars;
  std::string body;
  for (const Rule& r : rules.rules()) body += "\n" + rewrite_rule(r, vars);
  std::ostringstream os;
  os << "mod RULES is\n  including RPN .\n\n"
     << "  var PRest : Places .\n  var TRest : Transitions .\n"
     << "  vars MTupleRest1 MTupleRest2 : MappingTuple .\n  var MRest : Markings .\n"
     << "  var RRest : Rule .\n  vars MaxID StepSize : Int .\n";
  vars.pools.insert("AidPRest");
  vars.pools.insert("AidTRest");
  os << "  vars";
  for (const auto& v : vars.pools) os << " " << v;
  os << " : IDSet .\n";
  if (!vars.ints.empty()) {
    os << "  vars";
    for (const auto& v : vars.ints) os << " " << v;
    os << " : Int .\n";
  }
  os << body << "endm\n";
  return os.str();
}

std::string prop_module(const RuleSet& rules) {
  std::ostringstream os;
  os << "mod PROP is\n  including RULES .\n  including SATISFACTION .\n\n"
     << "  subsort Configuration < State .\n\n"
     << "  op reachable : Markings -> Prop .\n  op t-enabled : -> Prop .\n  op enabled : -> Prop .\n\n"
     << "  var P : Places .\n  vars T T1 : Transitions .\n  var Pre : Pre .\n  var Post : Post .\n"
     << "  vars M MRest PreValue : Markings .\n  var MappingTuple : MappingTuple .\n"
     << "  var Rules : Rule .\n  vars MaxID StepSize : Int .\n"
     << "  var AidP : IDPoolPlace .\n  var AidT : IDPoolTransition .\n"
     << "  var C : Configuration .\n  var Prop : Prop .\n";
  std::set<std::string> ints;
  for (const Rule& r : rules.rules()) {
    for (const auto& [p, _] : r.lhs.places()) ints.insert(rule_variable(2, p.value));
    for (const auto& [t, _] : r.lhs.transitions()) ints.insert(rule_variable(2, t.value));
  }
  if (!rules.empty()) {
    os << "  var PRest : Places .\n  var TRest : Transitions .\n"
       << "  vars MTupleRest1 MTupleRest2 : MappingTuple .\n";
  }
  if (!ints.empty()) {
    os << "  vars";
    for (const auto& v : ints) os << " " << v;
    os << " : Int .\n";
  }
  os << "\n  eq net(P , T , Pre , Post , marking{M ; MRest}) Rules MaxID StepSize AidP AidT\n"
     << "   |= reachable(M) = true .\n\n"
     << "  eq net(P , T , pre{(T1 --> PreValue) , MappingTuple} , Post , marking{PreValue ; MRest})\n"
     << "     Rules MaxID StepSize AidP AidT\n   |= t-enabled = true .\n"
     << "  eq C |= t-enabled = false [owise] .\n\n"
     << "  eq net(P , T , pre{(T1 --> PreValue) , MappingTuple} , Post , marking{PreValue ; MRest})\n"
     << "     Rules MaxID StepSize AidP AidT\n   |= enabled = true .\n";
  const std::array<std::string, 5> rests{"PRest", "TRest", "MTupleRest1", "MTupleRest2", "MRest"};
  const IdWriter left = [](IdValue id, bool) { return rule_variable(2, id); };
  for (const Rule& r : rules.rules()) {
    os << "  *** " << r.name << "\n  eq " << net_term(r.lhs, left, rests)
       << "\n     Rules MaxID StepSize AidP AidT\n   |= enabled = true .\n";
  }
  os << "\n  eq C |= Prop = false [owise] .\nendm\n";
  return os.str();
}

std::string net_module(const Configuration& c) {
  return "mod NET is\n  including PROP .\n  including MODEL-CHECKER .\n\n  op initial : -> Configuration .\n"
         "  eq initial =\n" + maude_configuration(c) + " .\nendm\n";
}

void write_atomically(const std::filesystem::path& target, const std::string& text) {
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << text;
    out.flush();
    if (!out) throw Error("cannot write " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error("cannot replace " + target.string());
  }
}

std::string entry(const LassoStep& s) {
  const std::string label = s.action.kind == ActionLabel::Kind::deadlock ? "deadlock"
                            : s.action.kind == ActionLabel::Kind::fire  ? "'fire"
                                                                        : "'" + s.action.rule;
  return "*** " + s.action.to_string() + "\n{" + maude_configuration(s.config) + "," + label + "}";
}

}  // namespace

MaudeModules emit_maude(const Configuration& initial) {
  return {rpn_module, rules_module(*initial.rules), prop_module(*initial.rules), net_module(initial)};
}

void write_maude_files(const Configuration& initial, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (!std::filesystem::is_directory(dir)) throw Error("cannot create directory " + dir.string());
  const MaudeModules m = emit_maude(initial);
  write_atomically(dir / "rpn.maude", m.rpn);
  write_atomically(dir / "rules.maude", m.rules);
  write_atomically(dir / "prop.maude", m.prop);
  write_atomically(dir / "net.maude", m.net);
}

std::string render_counterexample(const Verdict& v) {
  if (v.holds || !v.counterexample) return "result Bool: true\n";
  const Lasso& l = *v.counterexample;
  std::vector<std::string> prefix, cycle;
  for (const auto& s : l.prefix) prefix.push_back(entry(s));
  for (const auto& s : l.cycle) cycle.push_back(entry(s));
  std::string out = "result ModelCheckResult: counterexample(\n*** prefix\n";
  out += prefix.empty() ? "nil" : join(prefix, "\n");
  out += ",\n*** cycle\n" + join(cycle, "\n") + ")\n";
  return out;
}

}  // namespace rpn
