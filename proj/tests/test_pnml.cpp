#include <gtest/gtest.h>

#include <sstream>

#include "fixtures.hpp"
#include "rpn/generators.hpp"
#include "rpn/pnml.hpp"

namespace rpn {
namespace {

using namespace test;

PetriNet parse_text(const std::string& xml) {
  std::istringstream in(xml);
  return parse_net(in, "inline");
}

std::string wrap(const std::string& body) { return "<pnml><net id=\"n\">" + body + "</net></pnml>"; }

TEST(ParseNet, N1Fixture) {
  EXPECT_EQ(parse_net_file(data_path("n1.pnml")), make_n1());
  EXPECT_EQ(parse_net_file(data_path("n1_formal.pnml")), make_n1(true));
  EXPECT_EQ(parse_net_file(data_path("n2.pnml")), make_n2());
}

TEST(ParseNet, MissingCapacityIsOmega) {
  const PetriNet n = parse_text(wrap("<place id=\"p1\"/>"));
  EXPECT_TRUE(n.place(PlaceId{1}).capacity.is_omega());
  EXPECT_EQ(n.place(PlaceId{1}).capacity.rendered(), 2147483647);
}

TEST(ParseNet, CapacityForms) {
  const PetriNet n = parse_text(wrap(
      "<place id=\"p1\" capacity=\"3\"/>"
      "<place id=\"p2\"><capacity><text>2</text></capacity></place>"
      "<place id=\"p3\" capacity=\"2147483647\"/>"));
  EXPECT_EQ(n.place(PlaceId{1}).capacity, Capacity::bounded(3));
  EXPECT_EQ(n.place(PlaceId{2}).capacity, Capacity::bounded(2));
  EXPECT_TRUE(n.place(PlaceId{3}).capacity.is_omega());
}

TEST(ParseNet, ArcMultiplicity) {
  const PetriNet n = parse_text(wrap(
      "<place id=\"p1\"/><place id=\"p2\"/><transition id=\"t3\"/>"
      "<arc id=\"a\" source=\"p1\" target=\"t3\"/>"
      "<arc id=\"b\" source=\"p1\" target=\"t3\"/>"
      "<arc id=\"c\" source=\"t3\" target=\"p2\" weight=\"2\"/>"
      "<arc id=\"d\" source=\"t3\" target=\"p2\"><inscription><text>3</text></inscription></arc>"));
  EXPECT_EQ(n.pre(TransitionId{3}), (Marking{{PlaceId{1}, 2}}));
  EXPECT_EQ(n.post(TransitionId{3}), (Marking{{PlaceId{2}, 5}}));
}

TEST(ParseNet, NonNumericIdsArePlacesFirstInDocumentOrder) {
  const PetriNet n = parse_text(wrap("<place id=\"left\"/><transition id=\"go\"/><place id=\"right\"/>"));
  EXPECT_TRUE(n.has_place(PlaceId{1}));
  EXPECT_TRUE(n.has_place(PlaceId{2}));
  EXPECT_TRUE(n.has_transition(TransitionId{3}));
}

TEST(ParseNet, UnknownAnnotationsIgnored) {
  const PetriNet n = parse_text(wrap(
      "<place id=\"p1\"><graphics><position x=\"1\" y=\"2\"/></graphics><toolspecific tool=\"x\"/></place>"));
  EXPECT_EQ(n.places().size(), 1u);
}

void expect_parse_error(const std::string& xml, const std::string& fragment) {
  try {
    parse_text(xml);
    FAIL() << "accepted: " << xml;
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
  }
}

TEST(ParseNet, StructuralErrors) {
  expect_parse_error(wrap("<place id=\"p1\"/><place id=\"p2\"/><arc id=\"a\" source=\"p1\" target=\"p2\"/>"),
                     "two places");
  expect_parse_error(wrap("<transition id=\"t1\"/><transition id=\"t2\"/><arc id=\"a\" source=\"t1\" target=\"t2\"/>"),
                     "two transitions");
  expect_parse_error(wrap("<place id=\"p1\"/><place id=\"p1\"/>"), "duplicate id");
  expect_parse_error(wrap("<place id=\"p1\"/><arc id=\"a\" source=\"p1\" target=\"t9\"/>"), "unknown target");
  expect_parse_error(wrap("<place id=\"p1\" capacity=\"0\"/>"), "capacity must be positive");
  expect_parse_error(wrap("<place id=\"p1\" capacity=\"1\"><initialMarking><text>2</text></initialMarking></place>"),
                     "capacity");
  expect_parse_error(wrap("<place id=\"p1\"><initialMarking><text>-1</text></initialMarking></place>"),
                     "non-negative");
  expect_parse_error("<pnml><net id=\"n\"><place id=\"p1\"></net></pnml>", "inline");
  expect_parse_error("<petri/>", "<pnml>");
}

TEST(ParseNet, ErrorLocationNamesTheElement) {
  try {
    parse_text(wrap("<place id=\"p1\"/><arc id=\"bad\" source=\"p1\" target=\"nowhere\"/>"));
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(e.location.find("bad"), std::string::npos) << e.location;
  }
}

TEST(ParseNet, MissingFile) { EXPECT_THROW(parse_net_file(data_path("no_such.pnml")), ParseError); }

TEST(ParseRule, Fixtures) {
  EXPECT_EQ(parse_rule_file(data_path("r1.rule.pnml")), make_r1());
  EXPECT_EQ(parse_rule_file(data_path("r2.rule.pnml")), make_r2());
  EXPECT_EQ(parse_rule_file(data_path("r3.rule.pnml")), make_r3());
}

TEST(ParseRule, R1Split) {
  const Rule r1 = parse_rule_file(data_path("r1.rule.pnml"));
  EXPECT_EQ(r1.lhs.places().size(), 2u);
  EXPECT_TRUE(r1.deleted_places().empty());
  EXPECT_EQ(r1.deleted_transitions().size(), 1u);
  EXPECT_EQ(r1.created_transitions().size(), 1u);
}

TEST(ParseRule, R3DeletesOnePlaceAndOneTransition) {
  const Rule r3 = parse_rule_file(data_path("r3.rule.pnml"));
  EXPECT_EQ(r3.deleted_places().size(), 1u);
  EXPECT_EQ(r3.deleted_transitions().size(), 1u);
}

std::string rule_doc(const std::string& interface_label, const std::string& extra_map = "") {
  return "<pnml><rule name=\"x\">"
         "<net id=\"L\" role=\"lhs\"><place id=\"L1\"><name><text>A</text></name></place></net>"
         "<net id=\"K\" role=\"interface\"><place id=\"K1\"><name><text>" +
         interface_label +
         "</text></name></place></net>"
         "<net id=\"R\" role=\"rhs\"><place id=\"R1\"><name><text>A</text></name></place></net>"
         "<morphism from=\"K\" to=\"L\"><map source=\"K1\" target=\"L1\"/>" +
         extra_map +
         "</morphism>"
         "<morphism from=\"K\" to=\"R\"><map source=\"K1\" target=\"R1\"/></morphism>"
         "</rule></pnml>";
}

TEST(ParseRule, InterfaceMustEmbed) {
  std::istringstream ok(rule_doc("A"));
  const Rule r = parse_rule(ok);
  EXPECT_EQ(r.lhs.places().size(), 1u);
  EXPECT_EQ(r.rhs.places().size(), 1u);
  std::istringstream mismatch(rule_doc("B"));
  EXPECT_THROW(parse_rule(mismatch), ParseError);
  std::istringstream dangling(rule_doc("A", "<map source=\"K9\" target=\"L1\"/>"));
  EXPECT_THROW(parse_rule(dangling), ParseError);
}

TEST(WritePnml, RoundTrip) {
  for (const PetriNet& n : {make_n1(), make_n2(), circle_net(7)}) {
    std::ostringstream out;
    write_pnml(out, n);
    EXPECT_EQ(parse_text(out.str()), n);
  }
  PetriNet bounded;
  bounded.add_place({"B", PlaceId{1}, Capacity::bounded(2)});
  bounded.add_transition({"T", TransitionId{2}});
  bounded.add_pre_arc(TransitionId{2}, PlaceId{1}, 2);
  bounded.set_marking(Marking{{PlaceId{1}, 2}});
  std::ostringstream out;
  write_pnml(out, bounded);
  EXPECT_EQ(parse_text(out.str()), bounded);
}

TEST(WritePnml, FixtureReserialisationIsStable) {
  const PetriNet once = parse_net_file(data_path("n1.pnml"));
  std::ostringstream a;
  write_pnml(a, once);
  const PetriNet twice = parse_text(a.str());
  std::ostringstream b;
  write_pnml(b, twice);
  EXPECT_EQ(a.str(), b.str());
}

}  // namespace
}  // namespace rpn
