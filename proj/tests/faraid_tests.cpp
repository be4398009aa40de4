#include <doctest.h>

#include "minaret/faraid.hpp"

using namespace minaret;

namespace {

Estate estate(std::map<HeirKind, int> heirs, long long cents = 100000) {
  Estate e;
  e.heirs = std::move(heirs);
  e.net_estate_cents = cents;
  return e;
}

Rational share_of(const DistributionOutcome& o, HeirKind k) {
  auto it = o.shares.find(to_string(k));
  REQUIRE(it != o.shares.end());
  return it->second.fraction;
}

}  // namespace

TEST_CASE("validation rules") {
  CHECK_THROWS_AS(distribute(estate({})), FaraidError);
  CHECK_THROWS_AS(distribute(estate({{HeirKind::husband, 1}, {HeirKind::wife, 1}})), FaraidError);
  CHECK_THROWS_AS(distribute(estate({{HeirKind::wife, 5}})), FaraidError);
  CHECK_THROWS_AS(distribute(estate({{HeirKind::husband, 2}})), FaraidError);
  CHECK_THROWS_AS(distribute(estate({{HeirKind::father, 2}})), FaraidError);
  CHECK_THROWS_AS(distribute(estate({{HeirKind::son, 1}}, -5)), FaraidError);
  CHECK_NOTHROW(distribute(estate({{HeirKind::wife, 4}, {HeirKind::son, 1}})));
}

TEST_CASE("fixed share table rows in isolation") {
  // Each canonical row exercised through assign_fard directly.
  auto fard = [](std::map<HeirKind, int> heirs) {
    return assign_fard(heirs, MadhhabPolicy::jumhur);
  };
  CHECK(fard({{HeirKind::husband, 1}})[HeirKind::husband] == Rational(1, 2));
  CHECK(fard({{HeirKind::husband, 1}, {HeirKind::son, 1}})[HeirKind::husband] == Rational(1, 4));
  CHECK(fard({{HeirKind::wife, 1}})[HeirKind::wife] == Rational(1, 4));
  CHECK(fard({{HeirKind::wife, 1}, {HeirKind::daughter, 1}})[HeirKind::wife] == Rational(1, 8));
  CHECK(fard({{HeirKind::father, 1}, {HeirKind::son, 1}})[HeirKind::father] == Rational(1, 6));
  CHECK(fard({{HeirKind::mother, 1}, {HeirKind::son, 1}})[HeirKind::mother] == Rational(1, 6));
  CHECK(fard({{HeirKind::daughter, 1}})[HeirKind::daughter] == Rational(1, 2));
  CHECK(fard({{HeirKind::daughter, 2}})[HeirKind::daughter] == Rational(2, 3));
}

TEST_CASE("classic awl case: husband, two daughters, both parents") {
  auto outcomes = distribute(estate({{HeirKind::husband, 1},
                                     {HeirKind::daughter, 2},
                                     {HeirKind::father, 1},
                                     {HeirKind::mother, 1}}, 1500000));
  REQUIRE(outcomes.size() == 1);
  const auto& o = outcomes[0];
  CHECK(o.applied.count(RuleFlag::awl) == 1);
  CHECK(share_of(o, HeirKind::husband) == Rational(3, 15));
  CHECK(share_of(o, HeirKind::daughter) == Rational(8, 15));
  CHECK(share_of(o, HeirKind::father) == Rational(2, 15));
  CHECK(share_of(o, HeirKind::mother) == Rational(2, 15));
  CHECK(o.total() == Rational::one());
  // exact cash split of 15000.00
  CHECK(o.shares.at("husband").amount_cents == 300000);
  CHECK(o.shares.at("daughter").amount_cents == 800000);
}

TEST_CASE("radd case: mother and daughter") {
  auto outcomes = distribute(estate({{HeirKind::mother, 1}, {HeirKind::daughter, 1}}));
  REQUIRE(outcomes.size() == 1);
  const auto& o = outcomes[0];
  CHECK(o.applied.count(RuleFlag::radd) == 1);
  CHECK(share_of(o, HeirKind::mother) == Rational(1, 4));
  CHECK(share_of(o, HeirKind::daughter) == Rational(3, 4));
  CHECK(o.total() == Rational::one());
}

TEST_CASE("umariyyatan: spouse plus both parents") {
  auto husband_case = distribute(estate({{HeirKind::husband, 1},
                                         {HeirKind::mother, 1},
                                         {HeirKind::father, 1}}));
  REQUIRE(husband_case.size() == 1);
  CHECK(share_of(husband_case[0], HeirKind::husband) == Rational(1, 2));
  CHECK(share_of(husband_case[0], HeirKind::mother) == Rational(1, 6));
  CHECK(share_of(husband_case[0], HeirKind::father) == Rational(1, 3));

  auto wife_case = distribute(estate({{HeirKind::wife, 1},
                                      {HeirKind::mother, 1},
                                      {HeirKind::father, 1}}));
  REQUIRE(wife_case.size() == 1);
  CHECK(share_of(wife_case[0], HeirKind::wife) == Rational(1, 4));
  CHECK(share_of(wife_case[0], HeirKind::mother) == Rational(1, 4));
  CHECK(share_of(wife_case[0], HeirKind::father) == Rational(1, 2));
}

TEST_CASE("asaba with the 2:1 rule") {
  auto outcomes = distribute(estate({{HeirKind::wife, 2},
                                     {HeirKind::son, 1},
                                     {HeirKind::daughter, 1}}));
  REQUIRE(outcomes.size() == 1);
  const auto& o = outcomes[0];
  CHECK(share_of(o, HeirKind::wife) == Rational(1, 8));
  CHECK(share_of(o, HeirKind::son) == Rational(7, 12));
  CHECK(share_of(o, HeirKind::daughter) == Rational(7, 24));
  CHECK(o.total() == Rational::one());
}

TEST_CASE("hajb: nearer heirs block remoter ones") {
  auto [eligible, blocked] = apply_hajb({{HeirKind::son, 1},
                                         {HeirKind::sons_son, 1},
                                         {HeirKind::full_brother, 1},
                                         {HeirKind::father, 1},
                                         {HeirKind::paternal_grandfather, 1},
                                         {HeirKind::uterine_sibling, 1}},
                                        MadhhabPolicy::jumhur);
  CHECK(eligible.count(HeirKind::son) == 1);
  CHECK(eligible.count(HeirKind::father) == 1);
  CHECK(eligible.count(HeirKind::sons_son) == 0);
  CHECK(eligible.count(HeirKind::full_brother) == 0);
  CHECK(eligible.count(HeirKind::paternal_grandfather) == 0);
  CHECK(eligible.count(HeirKind::uterine_sibling) == 0);
  CHECK(blocked.size() == 4);
  for (const auto& b : blocked) CHECK(!b.reason.empty());
}

TEST_CASE("disputed: radd with a surviving spouse") {
  auto outcomes = distribute(estate({{HeirKind::wife, 1}, {HeirKind::mother, 1}}));
  REQUIRE(outcomes.size() == 2);
  const auto& hanafi = outcomes[0];
  const auto& jumhur = outcomes[1];
  CHECK(hanafi.policy == MadhhabPolicy::hanafi);
  CHECK(jumhur.policy == MadhhabPolicy::jumhur);

  // Hanafi: surplus returns to the mother, never the spouse.
  CHECK(share_of(hanafi, HeirKind::wife) == Rational(1, 4));
  CHECK(share_of(hanafi, HeirKind::mother) == Rational(3, 4));

  // Classical jumhur: surplus escheats to the treasury.
  CHECK(share_of(jumhur, HeirKind::wife) == Rational(1, 4));
  CHECK(share_of(jumhur, HeirKind::mother) == Rational(1, 3));
  CHECK(jumhur.shares.at(kTreasuryRecipient).fraction == Rational(5, 12));

  CHECK(hanafi.total() == Rational::one());
  CHECK(jumhur.total() == Rational::one());
}

TEST_CASE("disputed: grandfather with full brothers") {
  auto outcomes = distribute(estate({{HeirKind::paternal_grandfather, 1},
                                     {HeirKind::full_brother, 2}}));
  REQUIRE(outcomes.size() == 2);
  const auto& hanafi = outcomes[0];
  const auto& jumhur = outcomes[1];

  // Hanafi: the grandfather blocks the brothers entirely.
  CHECK(share_of(hanafi, HeirKind::paternal_grandfather) == Rational::one());
  CHECK(hanafi.shares.count(to_string(HeirKind::full_brother)) == 0);

  // Jumhur: best of muqasama (1/3 here), a third of the residue, or a sixth.
  CHECK(share_of(jumhur, HeirKind::paternal_grandfather) == Rational(1, 3));
  CHECK(share_of(jumhur, HeirKind::full_brother) == Rational(2, 3));

  CHECK(hanafi.total() == Rational::one());
  CHECK(jumhur.total() == Rational::one());
}

TEST_CASE("pinned policy returns a single outcome even for disputed cases") {
  auto pinned = distribute(estate({{HeirKind::wife, 1}, {HeirKind::mother, 1}}),
                           MadhhabPolicy::hanafi);
  REQUIRE(pinned.size() == 1);
  CHECK(pinned[0].policy == MadhhabPolicy::hanafi);
}

TEST_CASE("sole distant heir takes everything by radd") {
  auto outcomes = distribute(estate({{HeirKind::grandmother, 1}}));
  REQUIRE(outcomes.size() == 1);
  CHECK(share_of(outcomes[0], HeirKind::grandmother) == Rational::one());
}

TEST_CASE("spouse alone: policy-dependent residual handling") {
  auto outcomes = distribute(estate({{HeirKind::husband, 1}}));
  REQUIRE(outcomes.size() == 2);
  for (const auto& o : outcomes) CHECK(o.total() == Rational::one());
}

TEST_CASE("cash amounts round half-even and follow the fractions") {
  auto outcomes = distribute(estate({{HeirKind::husband, 1},
                                     {HeirKind::daughter, 1},
                                     {HeirKind::full_brother, 1}}, 99999));
  REQUIRE(outcomes.size() == 1);
  const auto& o = outcomes[0];
  CHECK(share_of(o, HeirKind::husband) == Rational(1, 4));
  CHECK(share_of(o, HeirKind::daughter) == Rational(1, 2));
  CHECK(share_of(o, HeirKind::full_brother) == Rational(1, 4));
  for (const auto& [name, s] : o.shares) {
    CAPTURE(name);
    long long expected = s.fraction.num() * 99999 / s.fraction.den();
    CHECK(std::llabs(s.amount_cents - expected) <= 1);
  }
}

TEST_CASE("heir kind names round-trip") {
  CHECK(all_heir_kinds().size() == 15);
  for (HeirKind k : all_heir_kinds()) CHECK(parse_heir_kind(to_string(k)) == k);
  CHECK(!parse_heir_kind("third_cousin").has_value());
}
