#pragma once

#include <filesystem>
#include <string>

#include "rpn/ltl.hpp"

namespace rpn {

std::string maude_place(const Place& p);
std::string maude_transition(const Transition& t);

/// Single-line `net(places{...} , transitions{...} , pre{...} , post{...} , marking{...})`,
/// every collection in ascending id order.
std::string maude_net(const PetriNet& net);

/// `rule(l(net(...)) , r(net(...)))` with the rule-local ids.
std::string maude_rule(const Rule& rule);

/// Rules joined by ` | `, or `emptyRule`.
std::string maude_rules(const RuleSet& rules);

/// Nested list form `26,(27,(28))`, or `emptyIDSet`.
std::string maude_id_set(const IdPool& pool);

/// Net, rules, max id, step size and both pools, one per line.
std::string maude_configuration(const Configuration& config);

struct MaudeModules {
  std::string rpn;    // sorts, operators, firing and bookkeeping equations
  std::string rules;  // one conditional rewrite rule per transformation rule
  std::string prop;   // atomic propositions
  std::string net;    // the initial configuration
};

MaudeModules emit_maude(const Configuration& initial);

/// Writes rpn.maude, rules.maude, prop.maude and net.maude into `dir`, each
/// through a temporary file and a rename.
void write_maude_files(const Configuration& initial, const std::filesystem::path& dir);

/// `result Bool: true` for a verdict that holds, otherwise a
/// `result ModelCheckResult: counterexample(` block with prefix and cycle sections.
std::string render_counterexample(const Verdict& v);

}  // namespace rpn
