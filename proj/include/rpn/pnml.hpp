#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "rpn/rules.hpp"

namespace rpn {

/// Raised for malformed XML and for structural problems. `location` names the
/// offending element, e.g. "net 'n1' / arc 'a3'".
struct ParseError : Error {
  ParseError(const std::string& location, const std::string& what);
  std::string location;
};

/// Reads `<pnml><net>` documents. Places carry `<name><text>`,
/// `<initialMarking><text>` and either a `capacity` attribute or a
/// `<capacity><text>` child (absent means unbounded). Arcs carry an optional
/// `weight` attribute or `<inscription><text>`; repeated arcs add up.
/// Elements may sit directly in the net or inside `<page>` elements.
PetriNet parse_net(std::istream& in, const std::string& source = "<input>");
PetriNet parse_net_file(const std::filesystem::path& path);

/// Reads `<pnml><rule name="...">` documents holding three nets with
/// role="lhs", role="interface" and role="rhs", plus two
/// `<morphism from="K" to="L|R">` blocks of `<map source target/>` entries.
Rule parse_rule(std::istream& in, const std::string& source = "<input>");
Rule parse_rule_file(const std::filesystem::path& path);

/// Writes a PNML document that parse_net reads back to an equal net.
void write_pnml(std::ostream& out, const PetriNet& net, const std::string& net_id = "net");

}  // namespace rpn
