#include "rpn/pnml.hpp"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <optional>
#include <ostream>
#include <set>

namespace rpn {

namespace pt = boost::property_tree;

ParseError::ParseError(const std::string& loc, const std::string& what)
    : Error(loc + ": " + what), location(loc) {}

namespace {

std::string trim(std::string s) {
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

pt::ptree read_document(std::istream& in, const std::string& source) {
  pt::ptree doc;
  try {
    pt::read_xml(in, doc, pt::xml_parser::trim_whitespace);
  } catch (const pt::xml_parser_error& e) {
    throw ParseError(source + ":" + std::to_string(e.line()), e.message());
  }
  if (doc.size() != 1 || doc.begin()->first != "pnml") throw ParseError(source, "root element must be <pnml>");
  return doc.begin()->second;
}

std::optional<std::string> attribute(const pt::ptree& node, const std::string& name) {
  if (auto v = node.get_optional<std::string>("<xmlattr>." + name)) return trim(*v);
  return std::nullopt;
}

std::optional<std::string> text_child(const pt::ptree& node, const std::string& name) {
  if (auto v = node.get_optional<std::string>(name + ".text")) return trim(*v);
  return std::nullopt;
}

std::uint64_t parse_count(const std::string& text, const std::string& where, const std::string& what) {
  if (text.empty() || !std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isdigit(c); })) {
    throw ParseError(where, what + " '" + text + "' is not a non-negative integer");
  }
  if (text.size() > 10) throw ParseError(where, what + " '" + text + "' is out of range");
  const std::uint64_t v = std::stoull(text);
  if (v > 0xffffffffull) throw ParseError(where, what + " '" + text + "' is out of range");
  return v;
}

enum class Kind { place, transition };

struct RawPlace {
  std::string xml_id;
  std::string label;
  Capacity capacity = Capacity::omega();
  TokenCount tokens = 0;
};

struct RawTransition {
  std::string xml_id;
  std::string label;
};

struct RawArc {
  std::string xml_id;
  std::string source;
  std::string target;
  TokenCount weight = 1;
};

// One <net> element before numeric ids are assigned.
struct RawNet {
  std::string xml_id;
  std::string location;
  std::vector<RawPlace> places;
  std::vector<RawTransition> transitions;
  std::vector<RawArc> arcs;
  std::map<std::string, Kind> kinds;
  std::map<std::string, IdValue> numeric;
};

void collect(const pt::ptree& node, RawNet& net) {
  for (const auto& [tag, child] : node) {
    if (tag == "page") {
      collect(child, net);
      continue;
    }
    if (tag != "place" && tag != "transition" && tag != "arc") continue;  // graphics, tool data, names
    const std::string id = attribute(child, "id").value_or("");
    const std::string where = net.location + " / " + tag + " '" + id + "'";
    if (id.empty()) throw ParseError(net.location + " / " + tag, "missing id attribute");
    if (tag == "arc") {
      RawArc a{id, attribute(child, "source").value_or(""), attribute(child, "target").value_or(""), 1};
      std::optional<std::string> weight = attribute(child, "weight");
      if (!weight) weight = text_child(child, "inscription");
      if (weight) {
        const auto w = parse_count(*weight, where, "arc weight");
        if (w == 0) throw ParseError(where, "arc weight must be positive");
        a.weight = static_cast<TokenCount>(w);
      }
      net.arcs.push_back(std::move(a));
      continue;
    }
    const Kind kind = tag == "place" ? Kind::place : Kind::transition;
    if (!net.kinds.emplace(id, kind).second) throw ParseError(where, "duplicate id");
    const std::string label = text_child(child, "name").value_or(id);
    if (kind == Kind::transition) {
      net.transitions.push_back({id, label});
      continue;
    }
    RawPlace p{id, label, Capacity::omega(), 0};
    std::optional<std::string> cap = attribute(child, "capacity");
    if (!cap) cap = text_child(child, "capacity");
    if (cap) {
      const auto c = parse_count(*cap, where, "capacity");
      if (c == 0) throw ParseError(where, "capacity must be positive");
      p.capacity = c == static_cast<std::uint64_t>(Capacity::omega_rendering) ? Capacity::omega() : Capacity::bounded(static_cast<TokenCount>(c));
    }
    if (auto tokens = text_child(child, "initialMarking")) {
      p.tokens = static_cast<TokenCount>(parse_count(*tokens, where, "initial marking"));
    }
    net.places.push_back(std::move(p));
  }
}

std::optional<IdValue> trailing_number(const std::string& id) {
  std::size_t start = id.size();
  while (start > 0 && std::isdigit(static_cast<unsigned char>(id[start - 1]))) --start;
  if (start == id.size() || id.size() - start > 9) return std::nullopt;
  return static_cast<IdValue>(std::stoul(id.substr(start)));
}

// Numeric ids come from trailing digits when every element has distinct ones;
// otherwise places and then transitions are numbered 1.. in document order.
void assign_numbers(RawNet& net) {
  std::vector<std::string> order;
  for (const auto& p : net.places) order.push_back(p.xml_id);
  for (const auto& t : net.transitions) order.push_back(t.xml_id);
  std::set<IdValue> seen;
  bool usable = true;
  for (const auto& id : order) {
    auto n = trailing_number(id);
    if (!n || !seen.insert(*n).second) {
      usable = false;
      break;
    }
    net.numeric[id] = *n;
  }
  if (usable) return;
  net.numeric.clear();
  IdValue next = 1;
  for (const auto& id : order) net.numeric[id] = next++;
}

PetriNet build(RawNet& raw) {
  assign_numbers(raw);
  PetriNet net;
  Marking initial;
  for (const auto& p : raw.places) {
    const PlaceId id{raw.numeric.at(p.xml_id)};
    net.add_place(Place{p.label, id, p.capacity});
    if (p.tokens) initial.add(id, p.tokens);
  }
  for (const auto& t : raw.transitions) net.add_transition(Transition{t.label, TransitionId{raw.numeric.at(t.xml_id)}});
  for (const auto& a : raw.arcs) {
    const std::string where = raw.location + " / arc '" + a.xml_id + "'";
    auto src = raw.kinds.find(a.source);
    auto dst = raw.kinds.find(a.target);
    if (src == raw.kinds.end()) throw ParseError(where, "unknown source '" + a.source + "'");
    if (dst == raw.kinds.end()) throw ParseError(where, "unknown target '" + a.target + "'");
    if (src->second == dst->second) {
      throw ParseError(where, std::string("arc connects two ") + (src->second == Kind::place ? "places" : "transitions"));
    }
    if (src->second == Kind::place) {
      net.add_pre_arc(TransitionId{raw.numeric.at(a.target)}, PlaceId{raw.numeric.at(a.source)}, a.weight);
    } else {
      net.add_post_arc(TransitionId{raw.numeric.at(a.source)}, PlaceId{raw.numeric.at(a.target)}, a.weight);
    }
  }
  net.set_marking(std::move(initial));
  for (const auto& v : validate_net(net)) throw ParseError(raw.location, v.message);
  return net;
}

RawNet raw_net(const pt::ptree& node, const std::string& source) {
  RawNet raw;
  raw.xml_id = attribute(node, "id").value_or("");
  raw.location = source + ": net '" + raw.xml_id + "'";
  collect(node, raw);
  return raw;
}

std::ifstream open(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), "cannot open file");
  return in;
}

}  // namespace

PetriNet parse_net(std::istream& in, const std::string& source) {
  const pt::ptree root = read_document(in, source);
  const pt::ptree* found = nullptr;
  for (const auto& [tag, child] : root) {
    if (tag != "net") continue;
    if (found) throw ParseError(source, "document holds more than one net");
    found = &child;
  }
  if (!found) throw ParseError(source, "document holds no <net>");
  RawNet raw = raw_net(*found, source);
  return build(raw);
}

PetriNet parse_net_file(const std::filesystem::path& path) {
  auto in = open(path);
  return parse_net(in, path.string());
}

namespace {

struct Side {
  RawNet raw;
  PetriNet net;
};

// K element id -> element id of L or R.
using Morphism = std::map<std::string, std::string>;

Morphism read_morphism(const pt::ptree& node, const std::string& where) {
  Morphism m;
  std::set<std::string> images;
  for (const auto& [tag, child] : node) {
    if (tag != "map") continue;
    const auto src = attribute(child, "source");
    const auto dst = attribute(child, "target");
    if (!src || !dst) throw ParseError(where, "<map> needs source and target");
    if (!m.emplace(*src, *dst).second) throw ParseError(where, "'" + *src + "' is mapped twice");
    if (!images.insert(*dst).second) throw ParseError(where, "'" + *dst + "' is the image of two elements");
  }
  return m;
}

// Checks that `m` embeds K into `side` and returns it keyed by K's numeric ids.
void check_embedding(const Side& k, const Side& side, const Morphism& m, const std::string& where) {
  for (const auto& [kid, kind] : k.raw.kinds) {
    auto it = m.find(kid);
    if (it == m.end()) throw ParseError(where, "interface element '" + kid + "' is not mapped");
    auto target_kind = side.raw.kinds.find(it->second);
    if (target_kind == side.raw.kinds.end()) throw ParseError(where, "map target '" + it->second + "' does not exist");
    if (target_kind->second != kind) throw ParseError(where, "'" + kid + "' maps to an element of another kind");
  }
  for (const auto& [src, dst] : m) {
    if (!k.raw.kinds.contains(src)) throw ParseError(where, "map source '" + src + "' does not exist");
  }
  auto num = [](const Side& s, const std::string& id) { return s.raw.numeric.at(id); };
  for (const auto& [kid, kind] : k.raw.kinds) {
    const std::string& img = m.at(kid);
    if (kind == Kind::place) {
      const Place& a = k.net.place(PlaceId{num(k, kid)});
      const Place& b = side.net.place(PlaceId{num(side, img)});
      if (a.label != b.label || a.capacity != b.capacity) {
        throw ParseError(where, "place '" + kid + "' differs from its image '" + img + "'");
      }
    } else if (k.net.transition(TransitionId{num(k, kid)}).label !=
               side.net.transition(TransitionId{num(side, img)}).label) {
      throw ParseError(where, "transition '" + kid + "' differs from its image '" + img + "'");
    }
  }
  // Arcs of K must reappear with the same weight between the images.
  for (const auto& [kt, pre] : k.net.pre_sets()) {
    const std::string* kt_xml = nullptr;
    for (const auto& [id, n] : k.raw.numeric) {
      if (n == kt.value && k.raw.kinds.at(id) == Kind::transition) kt_xml = &id;
    }
    const TransitionId image_t{num(side, m.at(*kt_xml))};
    auto check_set = [&](const Marking& kset, const Marking& sset, const char* dir) {
      for (const auto& [kp, w] : kset) {
        std::string kp_xml;
        for (const auto& [id, n] : k.raw.numeric) {
          if (n == kp.value && k.raw.kinds.at(id) == Kind::place) kp_xml = id;
        }
        if (sset.count(PlaceId{num(side, m.at(kp_xml))}) != w) {
          throw ParseError(where, std::string("interface ") + dir + " arc of '" + *kt_xml + "' is not preserved");
        }
      }
    };
    check_set(pre, side.net.pre(image_t), "input");
    check_set(k.net.post(kt), side.net.post(image_t), "output");
  }
}

}  // namespace

Rule parse_rule(std::istream& in, const std::string& source) {
  const pt::ptree root = read_document(in, source);
  auto rule_node = root.get_child_optional("rule");
  if (!rule_node) throw ParseError(source, "document holds no <rule>");
  const std::string name = attribute(*rule_node, "name").value_or(attribute(*rule_node, "id").value_or(""));
  if (name.empty()) throw ParseError(source, "rule needs a name");

  std::map<std::string, Side> sides;
  std::map<std::string, std::string> role_by_net_id;
  for (const auto& [tag, child] : *rule_node) {
    if (tag != "net") continue;
    const std::string role = attribute(child, "role").value_or("");
    if (role != "lhs" && role != "interface" && role != "rhs") {
      throw ParseError(source, "net '" + attribute(child, "id").value_or("") + "' needs role lhs, interface or rhs");
    }
    if (sides.contains(role)) throw ParseError(source, "two nets with role " + role);
    Side s{raw_net(child, source), {}};
    s.net = build(s.raw);
    role_by_net_id[s.raw.xml_id] = role;
    sides.emplace(role, std::move(s));
  }
  for (const char* role : {"lhs", "interface", "rhs"}) {
    if (!sides.contains(role)) throw ParseError(source, std::string("missing net with role ") + role);
  }

  std::optional<Morphism> to_lhs, to_rhs;
  for (const auto& [tag, child] : *rule_node) {
    if (tag != "morphism") continue;
    const std::string where = source + ": morphism";
    const std::string from = attribute(child, "from").value_or("");
    const std::string to = attribute(child, "to").value_or("");
    if (role_by_net_id[from] != "interface") throw ParseError(where, "morphisms must start at the interface net");
    const std::string role = role_by_net_id[to];
    auto& slot = role == "lhs" ? to_lhs : role == "rhs" ? to_rhs : throw ParseError(where, "unknown target net '" + to + "'");
    if (slot) throw ParseError(where, "duplicate morphism to " + role);
    slot = read_morphism(child, where);
  }
  const Side& lhs = sides.at("lhs");
  const Side& k = sides.at("interface");
  const Side& rhs = sides.at("rhs");
  if (!to_lhs || !to_rhs) throw ParseError(source, "rule needs morphisms from the interface to lhs and rhs");
  check_embedding(k, lhs, *to_lhs, source + ": interface -> lhs");
  check_embedding(k, rhs, *to_rhs, source + ": interface -> rhs");

  // Rule-local ids: lhs keeps its numbers, preserved rhs elements take the
  // lhs number, created rhs elements get numbers above everything in lhs.
  std::map<std::string, IdValue> rhs_ids;
  for (const auto& [kid, lid] : *to_lhs) rhs_ids[to_rhs->at(kid)] = lhs.raw.numeric.at(lid);
  std::set<IdValue> taken;
  for (const auto& [id, n] : lhs.raw.numeric) taken.insert(n);
  IdValue fresh = std::max(lhs.net.max_id(), rhs.net.max_id());
  std::vector<std::string> created;
  for (const auto& p : rhs.raw.places) created.push_back(p.xml_id);
  for (const auto& t : rhs.raw.transitions) created.push_back(t.xml_id);
  for (const auto& id : created) {
    if (rhs_ids.contains(id)) continue;
    IdValue n = rhs.raw.numeric.at(id);
    if (taken.contains(n)) n = ++fresh;
    taken.insert(n);
    rhs_ids[id] = n;
  }

  PetriNet renamed;
  for (const auto& p : rhs.raw.places) {
    renamed.add_place(Place{p.label, PlaceId{rhs_ids.at(p.xml_id)}, p.capacity});
  }
  for (const auto& t : rhs.raw.transitions) renamed.add_transition(Transition{t.label, TransitionId{rhs_ids.at(t.xml_id)}});
  std::map<IdValue, IdValue> by_number;
  for (const auto& [xml, n] : rhs.raw.numeric) by_number[n] = rhs_ids.at(xml);
  auto remap = [&](const Marking& m) {
    Marking out;
    for (const auto& [p, n] : m) out.add(PlaceId{by_number.at(p.value)}, n);
    return out;
  };
  for (const auto& [t, pre] : rhs.net.pre_sets()) {
    const TransitionId nt{by_number.at(t.value)};
    renamed.set_pre(nt, remap(pre));
    renamed.set_post(nt, remap(rhs.net.post(t)));
  }
  renamed.set_marking(remap(rhs.net.marking()));

  Rule rule{name, lhs.net, std::move(renamed)};
  if (auto problems = identification_problems(rule); !problems.empty()) throw ParseError(source, problems.front());
  return rule;
}

Rule parse_rule_file(const std::filesystem::path& path) {
  auto in = open(path);
  return parse_rule(in, path.string());
}

void write_pnml(std::ostream& out, const PetriNet& net, const std::string& net_id) {
  pt::ptree doc;
  pt::ptree& n = doc.add("pnml.net", "");
  n.put("<xmlattr>.id", net_id);
  n.put("<xmlattr>.type", "http://www.pnml.org/version-2009/grammar/ptnet");
  for (const auto& [id, p] : net.places()) {
    pt::ptree& e = n.add("place", "");
    e.put("<xmlattr>.id", "p" + std::to_string(id.value));
    if (!p.capacity.is_omega()) e.put("<xmlattr>.capacity", p.capacity.bound());
    e.put("name.text", p.label);
    if (auto tokens = net.marking().count(id)) e.put("initialMarking.text", tokens);
  }
  for (const auto& [id, t] : net.transitions()) {
    pt::ptree& e = n.add("transition", "");
    e.put("<xmlattr>.id", "t" + std::to_string(id.value));
    e.put("name.text", t.label);
  }
  std::size_t arc = 0;
  auto add_arc = [&](const std::string& src, const std::string& dst, TokenCount w) {
    pt::ptree& e = n.add("arc", "");
    e.put("<xmlattr>.id", "a" + std::to_string(++arc));
    e.put("<xmlattr>.source", src);
    e.put("<xmlattr>.target", dst);
    if (w != 1) e.put("inscription.text", w);
  };
  for (const auto& [t, pre] : net.pre_sets()) {
    for (const auto& [p, w] : pre) add_arc("p" + std::to_string(p.value), "t" + std::to_string(t.value), w);
    for (const auto& [p, w] : net.post(t)) add_arc("t" + std::to_string(t.value), "p" + std::to_string(p.value), w);
  }
  pt::write_xml(out, doc, pt::xml_writer_make_settings<std::string>(' ', 2));
}

}  // namespace rpn
