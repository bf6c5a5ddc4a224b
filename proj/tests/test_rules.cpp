#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "rpn/rules.hpp"

namespace rpn {
namespace {

using namespace test;

std::vector<std::string> digests(const std::vector<Match>& ms) {
  std::vector<std::string> out;
  for (const auto& m : ms) out.push_back(m.digest());
  return out;
}

TEST(FindMatches, N1WithR1MatchesTheTwoMarkedInputs) {
  const PetriNet n = make_n1();
  const Rule r1 = make_r1();
  const auto ms = find_matches(n, r1);
  ASSERT_EQ(ms.size(), 2u);
  EXPECT_EQ(digests(ms), digests(brute_force_matches(n, r1)));
  EXPECT_EQ(ms[0].transition_map.at(TransitionId{24}), TransitionId{5});
  EXPECT_EQ(ms[0].place_map.at(PlaceId{17}), PlaceId{4});
  EXPECT_EQ(ms[0].place_map.at(PlaceId{20}), PlaceId{3});
  EXPECT_EQ(ms[1].transition_map.at(TransitionId{24}), TransitionId{7});
}

TEST(FindMatches, DigestFormat) {
  const Rule r1 = make_r1();
  const auto ms = find_matches(make_n1(), r1);
  EXPECT_EQ(ms[0].digest(), "17->4,20->3;24->5");
}

TEST(FindMatches, LhsLargerThanHost) {
  PetriNet host;
  host.add_place(place_a(1));
  EXPECT_TRUE(find_matches(host, make_r1()).empty());
}

TEST(FindMatches, CapacityMustBeEqual) {
  PetriNet n = make_n1();
  PetriNet bounded;
  for (const auto& [id, p] : n.places()) bounded.add_place({p.label, id, Capacity::bounded(5)});
  for (const auto& [id, t] : n.transitions()) {
    bounded.add_transition(t);
    bounded.set_pre(id, n.pre(id));
    bounded.set_post(id, n.post(id));
  }
  bounded.set_marking(n.marking());
  EXPECT_TRUE(find_matches(bounded, make_r1()).empty());
}

TEST(FindMatches, N2WithR3HasOneApplicableMatch) {
  const PetriNet n2 = make_n2();
  const Rule r3 = make_r3();
  const auto all = find_matches(n2, r3);
  EXPECT_EQ(all.size(), 2u);
  const auto ok = applicable_matches(n2, r3);
  ASSERT_EQ(ok.size(), 1u);
  EXPECT_EQ(ok[0].transition_map.at(TransitionId{12}), TransitionId{2});
}

TEST(Dangling, N2Branches) {
  const PetriNet n2 = make_n2();
  const Rule r3 = make_r3();
  const auto ms = find_matches(n2, r3);
  ASSERT_EQ(ms.size(), 2u);
  EXPECT_TRUE(dangling_ok(n2, ms[0]));   // A3 only fed by T2
  EXPECT_FALSE(dangling_ok(n2, ms[1]));  // A6 also feeds T7
  for (const auto& m : ms) EXPECT_EQ(dangling_ok(n2, m), oracle_dangling(n2, m));
}

Rule delete_isolated_place(TokenCount tokens) {
  Rule r;
  r.name = "drop";
  r.lhs.add_place(place_a(1));
  if (tokens) r.lhs.set_marking(Marking{{PlaceId{1}, tokens}});
  return r;
}

TEST(Dangling, IsolatedDeletedPlace) {
  PetriNet host;
  host.add_place(place_a(9));
  const Rule r = delete_isolated_place(0);
  const auto ms = find_matches(host, r);
  ASSERT_EQ(ms.size(), 1u);
  EXPECT_TRUE(dangling_ok(host, ms[0]));
}

TEST(DeletedMarking, ExactCountRequired) {
  const Rule r = delete_isolated_place(1);
  PetriNet host;
  host.add_place(place_a(9));
  host.set_marking(Marking{{PlaceId{9}, 1}});
  EXPECT_TRUE(deleted_marking_ok(host, find_matches(host, r).at(0)));
  host.set_marking(Marking{{PlaceId{9}, 2}});
  const auto m = find_matches(host, r).at(0);
  EXPECT_FALSE(deleted_marking_ok(host, m));
  Configuration c = Configuration::initial(host, {r});
  try {
    apply_rule(c, m);
    FAIL();
  } catch (const GluingError& e) {
    EXPECT_EQ(e.condition, GluingError::Condition::deleted_marking);
  }
}

TEST(DeletedMarking, NoDeletedPlaces) {
  const Rule r1 = make_r1();
  for (const auto& m : find_matches(make_n1(), r1)) EXPECT_TRUE(deleted_marking_ok(make_n1(), m));
}

TEST(Identification, Examples) {
  EXPECT_TRUE(identification_ok(make_r1()));
  EXPECT_TRUE(identification_ok(make_r3()));
  EXPECT_TRUE(identification_ok(Rule{}));
  Rule clash = make_r1();
  clash.rhs.remove_place(PlaceId{20});
  clash.rhs.add_place({"B", PlaceId{20}, Capacity::omega()});
  clash.rhs.add_pre_arc(TransitionId{26}, PlaceId{20});
  EXPECT_FALSE(identification_ok(clash));
}

TEST(Identification, PreservedTransitionMustKeepArcs) {
  Rule r = make_r1();
  r.rhs.remove_transition(TransitionId{26});
  r.rhs.add_transition(trans_t(24));
  r.rhs.add_pre_arc(TransitionId{24}, PlaceId{20});
  EXPECT_FALSE(identification_ok(r));
}

TEST(Rule, R1Split) {
  const Rule r1 = make_r1();
  EXPECT_TRUE(r1.deleted_places().empty());
  EXPECT_TRUE(r1.created_places().empty());
  EXPECT_EQ(r1.deleted_transitions(), (std::vector<TransitionId>{TransitionId{24}}));
  EXPECT_EQ(r1.created_transitions(), (std::vector<TransitionId>{TransitionId{26}}));
}

TEST(ApplyRule, R1OnT5ReversesItAndReusesTheId) {
  const Configuration c = Configuration::initial(make_n1(), {make_r1()});
  const auto ms = find_matches(c.net, c.rules->rules()[0]);
  const Configuration next = apply_rule(c, ms[0]);
  const TransitionId t5{5};
  ASSERT_TRUE(next.net.has_transition(t5));
  EXPECT_EQ(next.net.pre(t5), (Marking{{PlaceId{3}, 1}}));
  EXPECT_EQ(next.net.post(t5), (Marking{{PlaceId{4}, 1}}));
  EXPECT_EQ(next.net.marking(), c.net.marking());
  EXPECT_EQ(next.max_id, 7u);
  EXPECT_TRUE(next.transition_pool.empty());
  EXPECT_TRUE(validate_net(next.net).empty());
  // input untouched
  EXPECT_EQ(c.net.pre(t5), (Marking{{PlaceId{4}, 1}}));
}

TEST(ApplyRule, R3OnN2) {
  const Configuration c = Configuration::initial(make_n2(), {make_r3()});
  const auto ok = applicable_matches(c.net, c.rules->rules()[0]);
  const Configuration next = apply_rule(c, ok.at(0));
  EXPECT_FALSE(next.net.has_place(PlaceId{3}));
  EXPECT_EQ(next.place_pool.available(), (std::vector<IdValue>{3}));
  ASSERT_TRUE(next.net.has_transition(TransitionId{2}));
  EXPECT_EQ(next.net.pre(TransitionId{2}), (Marking{{PlaceId{1}, 1}}));
  EXPECT_TRUE(next.net.post(TransitionId{2}).empty());
  EXPECT_EQ(next.net.marking(), c.net.marking());
  EXPECT_TRUE(validate_net(next.net).empty());
}

TEST(ApplyRule, IdentityRuleChangesNothing) {
  Rule keep;
  keep.name = "keep";
  keep.lhs.add_place(place_a(1));
  keep.lhs.set_marking(Marking{{PlaceId{1}, 1}});
  keep.rhs = keep.lhs;
  const Configuration c = Configuration::initial(make_n1(), {keep});
  for (const auto& m : find_matches(c.net, c.rules->rules()[0])) {
    const Configuration next = apply_rule(c, m);
    EXPECT_EQ(next.net, c.net);
    EXPECT_EQ(next.place_pool, c.place_pool);
    EXPECT_EQ(next.transition_pool, c.transition_pool);
    EXPECT_EQ(next.max_id, c.max_id);
  }
}

TEST(ApplyRule, DanglingViolationIsAnError) {
  const Configuration c = Configuration::initial(make_n2(), {make_r3()});
  const auto ms = find_matches(c.net, c.rules->rules()[0]);
  try {
    apply_rule(c, ms.at(1));
    FAIL();
  } catch (const GluingError& e) {
    EXPECT_EQ(e.condition, GluingError::Condition::dangling);
  }
}

TEST(ApplyRule, CreatedPlaceDrawsFreshIdWithRefill) {
  Rule grow;
  grow.name = "grow";
  grow.lhs.add_place(place_a(1));
  grow.rhs.add_place(place_a(1));
  grow.rhs.add_place(place_a(2));
  const Configuration c = Configuration::initial(make_n1(), {grow});
  const auto ms = find_matches(c.net, c.rules->rules()[0]);
  const Configuration next = apply_rule(c, ms.at(0));
  EXPECT_TRUE(next.net.has_place(PlaceId{8}));
  EXPECT_EQ(next.max_id, 17u);
  EXPECT_EQ(next.place_pool.available(), (std::vector<IdValue>{9, 10, 11, 12, 13, 14, 15, 16, 17}));
}

TEST(IdPool, AcquireFromNonEmpty) {
  const IdPool pool(IdPool::Kind::place, {26, 27, 28});
  const auto a = pool_acquire(pool, 36, 10);
  EXPECT_EQ(a.id, 26u);
  EXPECT_EQ(a.pool.available(), (std::vector<IdValue>{27, 28}));
  EXPECT_EQ(a.max_id, 36u);
}

TEST(IdPool, RefillYieldsExactlyStepSizeIds) {
  const auto a = pool_acquire(IdPool{}, 25, 10);
  EXPECT_EQ(a.id, 26u);
  EXPECT_EQ(a.pool.available(), (std::vector<IdValue>{27, 28, 29, 30, 31, 32, 33, 34, 35}));
  EXPECT_EQ(a.max_id, 35u);
  const auto one = pool_acquire(IdPool{}, 25, 1);
  EXPECT_EQ(one.id, 26u);
  EXPECT_TRUE(one.pool.empty());
  EXPECT_EQ(one.max_id, 26u);
  EXPECT_THROW(pool_acquire(IdPool{}, 25, 0), Error);
}

TEST(IdPool, ReleasePrepends) {
  const IdPool pool(IdPool::Kind::transition, {26, 27});
  EXPECT_EQ(pool_release(pool, 24).available(), (std::vector<IdValue>{24, 26, 27}));
  EXPECT_EQ(pool_release(IdPool{}, 24).available(), (std::vector<IdValue>{24}));
  EXPECT_THROW(pool_release(pool, 27), Error);
  EXPECT_EQ(pool_acquire(pool_release(pool, 24), 40, 10).id, 24u);
}

TEST(RuleSet, OrderIndependentFingerprint) {
  const RuleSet a({make_r1(), make_r2()});
  const RuleSet b({make_r2(), make_r1()});
  EXPECT_EQ(a.fingerprint(), b.fingerprint());
  EXPECT_EQ(a.rules()[0].name, "r1");
  EXPECT_THROW(RuleSet({make_r1(), make_r1()}), Error);
}

}  // namespace
}  // namespace rpn
