#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "ptsim/forcing.hpp"

using namespace ptsim;

namespace {

Bits random_bits(std::mt19937& rng, std::size_t n) {
  Bits b = Bits::zeros(n);
  for (std::size_t p = 0; p < n; ++p) b.set(p, rng() & 1u);
  return b;
}

Registry random_registry(std::mt19937& rng, std::size_t universe) {
  Registry reg;
  reg.stage_budget = 1 + rng() % 3;
  for (std::size_t e = 0; e < 2; ++e) {
    FunctionalTable table;
    table.index = e;
    std::size_t count = rng() % 4;
    std::map<std::size_t, std::size_t> per_input;
    for (std::size_t t = 0; t < count; ++t) {
      FunctionalEntry entry;
      entry.input = rng() % 3;
      std::size_t& used = per_input[entry.input];
      if (used == 2) continue;
      entry.settle_stage = 1 + rng() % reg.stage_budget;
      entry.output = rng() & 1u;
      entry.constraints.push_back(
          {(entry.input * 7 + 1) % universe, OracleSide::G, (used++ & 1u) != 0});
      std::size_t ncons = rng() % 3;
      std::size_t pos = rng() % universe;
      for (std::size_t ci = 0; ci < ncons; ++ci)
        entry.constraints.push_back(
            {(pos + ci) % universe, rng() % 2 ? OracleSide::G : OracleSide::C, (rng() & 1u) != 0});
      table.entries.push_back(std::move(entry));
    }
    reg.functionals[e] = std::move(table);
  }
  for (std::size_t n = 0; n < 3; ++n)
    if (rng() % 2) reg.diagonal[n] = DiagonalFact{(rng() & 1u) != 0, 1};
  return reg;
}

Condition random_condition(std::mt19937& rng, std::size_t universe, std::size_t k) {
  PartitionTree full = full_partition_tree(k, universe);
  auto all = paths_at_depth(full, universe).codes;
  std::set<Bits> keep;
  for (const Bits& p : all)
    if (rng() % 3 == 0) keep.insert(p);
  if (keep.empty()) keep.insert(*all.begin());
  Condition c;
  c.parts = k;
  c.tree = tree_from_paths(k, universe, keep);
  for (std::size_t j = 0; j < k; ++j) c.stems.push_back(random_bits(rng, rng() % 3));
  return c;
}

// literal definition: every length-universe G satisfying the part meets
// the requirement
bool brute_forces_r(const Condition& c, std::size_t part, std::size_t e, std::size_t i,
                    const Registry& reg, const GroundSets& grounds) {
  for (unsigned long v = 0; v < (1ul << grounds.universe); ++v) {
    Bits g = Bits::zeros(grounds.universe);
    for (std::size_t p = 0; p < grounds.universe; ++p) g.set(p, (v >> p) & 1u);
    if (!satisfies_on_part(g, c, part)) continue;
    if (!r_requirement_witness(g, e, i, reg, grounds).has_value()) return false;
  }
  return true;
}

// A fixed small scenario with a genuinely unforced part: both tables are
// total on inputs 0..universe, the diagonal settles input 0 to 1, and
// the A-side answer at 0 copies bit 3 of the oracle. Sets with g(3) = 0
// hit the diagonal; sets with g(3) = 1 miss it on both sides.
Registry pin_registry(std::size_t universe) {
  Registry reg;
  reg.stage_budget = 2;
  reg.diagonal[0] = DiagonalFact{true, 1};
  FunctionalTable t0{0, {}};
  t0.entries.push_back(FunctionalEntry{0, {{3, OracleSide::G, false}}, 1, true});
  t0.entries.push_back(FunctionalEntry{0, {{3, OracleSide::G, true}}, 1, false});
  for (std::size_t n = 1; n <= universe; ++n)
    t0.entries.push_back(FunctionalEntry{n, {}, 1, false});
  FunctionalTable t1{1, {}};
  for (std::size_t n = 0; n <= universe; ++n)
    t1.entries.push_back(FunctionalEntry{n, {}, 1, false});
  reg.functionals[0] = std::move(t0);
  reg.functionals[1] = std::move(t1);
  return reg;
}

GroundSets pin_grounds() {
  return GroundSets{8, Bits::from_text("10110100"), Bits::zeros(8)};
}

Condition one_part_condition(std::size_t universe) {
  return Condition{1, {Bits()}, single_path_tree(1, Bits::ones(universe))};
}

}  // namespace

TEST_CASE("Mathias extension") {
  MathiasCondition c{Bits::from_text("1"), Bits::from_text("1111")};
  MathiasCondition d{Bits::from_text("10"), Bits::from_text("1011")};
  CHECK(mathias_extends(d, c));
  CHECK(mathias_extends(c, c));
  CHECK_FALSE(mathias_extends(c, d));
  // a new stem element must come from the old reservoir
  MathiasCondition bad{Bits::from_text("11"), Bits::from_text("1111")};
  CHECK_FALSE(mathias_extends(bad, {Bits::from_text("1"), Bits::from_text("1011")}));
  // the reservoir may not grow
  CHECK_FALSE(mathias_extends({Bits::from_text("1"), Bits::from_text("1111")},
                              {Bits::from_text("1"), Bits::from_text("1011")}));
  // transitivity on random chains
  std::mt19937 rng(41);
  for (int trial = 0; trial < 200; ++trial) {
    Bits x = random_bits(rng, 6);
    MathiasCondition a{restrict_to(random_bits(rng, 2), x), x};
    Bits y = restrict_to(random_bits(rng, 6), x);
    MathiasCondition b{a.stem, y};
    for (std::size_t p = a.stem.size(); p < 4; ++p) b.stem.push_back(y.at(p));
    Bits z = restrict_to(random_bits(rng, 6), y);
    MathiasCondition cc{b.stem, z};
    for (std::size_t p = b.stem.size(); p < 5; ++p) cc.stem.push_back(z.at(p));
    REQUIRE(mathias_extends(b, a));
    REQUIRE(mathias_extends(cc, b));
    CHECK(mathias_extends(cc, a));
  }
}

TEST_CASE("condition extension is reflexive and composes") {
  std::mt19937 rng(42);
  for (int trial = 0; trial < 30; ++trial) {
    Condition c = random_condition(rng, 4, 1 + rng() % 2);
    CHECK(extends(c, c, identity_witness(c.parts)));
  }
  GroundSets grounds{6, Bits::from_text("110101"), Bits::zeros(6)};
  Condition c0{1, {Bits()}, single_path_tree(1, Bits::ones(6))};
  Condition c1 = force_qm_extension(c0, 0, grounds, 1);
  Condition c2 = force_qm_extension(c1, 0, grounds, 2);
  CHECK(extends(c1, c0, identity_witness(1)));
  CHECK(extends(c2, c1, identity_witness(1)));
  CHECK(extends(c2, c0, identity_witness(1)));
}

TEST_CASE("satisfaction picks the smallest part") {
  Condition c;
  c.parts = 2;
  c.stems = {Bits::from_text("1"), Bits::from_text("1")};
  c.tree = full_partition_tree(2, 3);
  Bits g = Bits::from_text("110");
  auto j = satisfies(g, c);
  REQUIRE(j.has_value());
  CHECK(*j == 0);
  CHECK(satisfies_on_part(g, c, 0));
  CHECK(satisfies_on_part(g, c, 1));
  c.stems[0] = Bits::from_text("0");
  j = satisfies(g, c);
  REQUIRE(j.has_value());
  CHECK(*j == 1);  // stem mismatch rules part 0 out
  c.stems[1] = Bits::from_text("0");
  CHECK_FALSE(satisfies(g, c).has_value());
}

TEST_CASE("forcing the pair requirement") {
  GroundSets grounds{4, Bits::from_text("1100"), Bits::zeros(4)};
  Condition c{1, {Bits::from_text("1101")}, single_path_tree(1, Bits::ones(4))};
  CHECK_FALSE(forces_qm(c, 0, grounds, 2));  // one element of the complement only
  grounds.a = Bits::from_text("1010");
  c.stems[0] = Bits::from_text("1111");
  CHECK(forces_qm(c, 0, grounds, 2));
  CHECK(forces_qm(c, 0, grounds, 0));
  CHECK_FALSE(forces_qm(c, 0, grounds, 3));
}

TEST_CASE("horizon forcing matches the exhaustive sweep") {
  std::mt19937 rng(43);
  for (int trial = 0; trial < 60; ++trial) {
    std::size_t universe = 4 + rng() % 3;
    std::size_t k = 1 + rng() % 2;
    Registry reg = random_registry(rng, universe);
    GroundSets grounds{universe, random_bits(rng, universe), random_bits(rng, universe)};
    Condition c = random_condition(rng, universe, k);
    for (std::size_t j = 0; j < k; ++j)
      CHECK(forces_r_at_horizon(c, j, 0, 1, reg, grounds) ==
            brute_forces_r(c, j, 0, 1, reg, grounds));
    std::set<std::size_t> u = unforced_parts(c, 0, 1, reg, grounds);
    for (std::size_t j = 0; j < k; ++j)
      CHECK(u.contains(j) == !forces_r_at_horizon(c, j, 0, 1, reg, grounds));
  }
}

TEST_CASE("acceptable parts") {
  GroundSets grounds{4, Bits::from_text("1100"), Bits::zeros(4)};
  Condition c;
  c.parts = 2;
  c.stems = {Bits(), Bits()};
  // single path: part 0 = A, part 1 = complement
  c.tree = single_path_tree(2, interleave({Bits::from_text("1100"), Bits::from_text("0011")}));
  CHECK(acceptable_parts(c, grounds, 0) == std::set<std::size_t>{0, 1});
  CHECK(acceptable_parts(c, grounds, 1).empty());  // neither part meets both sides
  // mixed part: both elements of A and of the complement
  c.tree = single_path_tree(2, interleave({Bits::from_text("1010"), Bits::from_text("0101")}));
  CHECK(acceptable_parts(c, grounds, 1) == std::set<std::size_t>{0, 1});
  auto found = find_acceptable_part(c, grounds, 1);
  REQUIRE(found.has_value());
  CHECK(acceptable_parts(c, grounds, 1).contains(found->first));
}

TEST_CASE("greedy search agrees with the path scan on random conditions") {
  std::mt19937 rng(44);
  for (int trial = 0; trial < 80; ++trial) {
    std::size_t universe = 5;
    GroundSets grounds{universe, random_bits(rng, universe), Bits::zeros(universe)};
    Condition c = random_condition(rng, universe, 1 + rng() % 2);
    c.stems.assign(c.parts, Bits());
    std::size_t t = 1 + rng() % 2;
    auto found = find_acceptable_part(c, grounds, t);
    std::set<std::size_t> scan = acceptable_parts(c, grounds, t);
    // the greedy walk may stall on sparse trees, but never invents a part
    if (scan.empty()) CHECK_FALSE(found.has_value());
    if (found.has_value()) {
      CHECK(scan.contains(found->first));
      Bits part = deinterleave(found->second, c.parts)[found->first];
      CHECK(restrict_to(part, grounds.a).count() >= t);
      CHECK(restrict_to(part, grounds.a_bar()).count() >= t);
    }
  }
}

TEST_CASE("forcing Q_m by stem extension") {
  GroundSets grounds{6, Bits::from_text("110101"), Bits::zeros(6)};
  Condition c{1, {Bits()}, single_path_tree(1, Bits::ones(6))};
  Condition d = force_qm_extension(c, 0, grounds, 2);
  CHECK(forces_qm(d, 0, grounds, 2));
  CHECK(extends(d, c, identity_witness(1)));
  // minimal stem: dropping the last element loses the property
  Bits shorter = d.stems[0].prefix(d.stems[0].size() - 1);
  Condition dm = d;
  dm.stems[0] = shorter;
  CHECK_FALSE(forces_qm(dm, 0, grounds, 2));
  // m = 0 asks nothing
  Condition z = force_qm_extension(c, 0, grounds, 0);
  CHECK(z.stems[0] == c.stems[0]);
  // unreachable demands throw
  CHECK_THROWS(force_qm_extension(c, 0, grounds, 4));
}

TEST_CASE("computing A from the class") {
  Bits a = Bits::from_text("1010");
  PartitionTree split = single_path_tree(2, interleave({a, complement_of(a)}));
  CHECK(compute_a_from_c(split, {0}, {1}, 0, 4) == std::optional<bool>(true));
  CHECK(compute_a_from_c(split, {0}, {1}, 1, 4) == std::optional<bool>(false));
  CHECK_FALSE(compute_a_from_c(split, {0}, {1}, 0, 0).has_value());
  // a full tree leaves every membership undetermined
  PartitionTree full = full_partition_tree(2, 3);
  CHECK_FALSE(compute_a_from_c(full, {0}, {1}, 0, 3).has_value());
  // classification with no candidate part for the element throws
  CHECK_THROWS(compute_a_from_c(split, {0}, {}, 1, 4));
}

TEST_CASE("case i pins a diagonal hit into the stem") {
  GroundSets grounds = pin_grounds();
  Registry reg = pin_registry(grounds.universe);
  Condition c = one_part_condition(grounds.universe);
  REQUIRE(unforced_parts(c, 0, 1, reg, grounds) == std::set<std::size_t>{0});
  Valuation p;
  p.values = {{0, false}};  // correct: the diagonal settles 0 to 1
  CaseIResult step = case_i_extension(c, p, {0}, 0, 1, reg, grounds);
  CHECK(step.part == 0);
  CHECK(step.input == 0);
  CHECK(step.tau == Bits::from_text("0000"));  // pins position 3 out of G
  CHECK(step.cond.stems[0] == step.tau);
  CHECK(extends(step.cond, c, identity_witness(1)));
  CHECK(forces_r_at_horizon(step.cond, 0, 0, 1, reg, grounds));
  // with no realizable hit the case is rejected
  Registry empty;
  empty.stage_budget = 2;
  CHECK_THROWS(case_i_extension(c, p, {0}, 0, 1, empty, grounds));
}

TEST_CASE("case ii crosses the survivor classes") {
  Registry reg;
  reg.stage_budget = 2;
  GroundSets grounds{4, Bits::from_text("1100"), Bits::zeros(4)};
  Condition c = one_part_condition(4);
  std::vector<Valuation> ps;
  for (unsigned long v = 0; v < 3; ++v) {
    Valuation p;
    p.values[0] = (v >> 1) & 1u;
    p.values[1] = v & 1u;
    ps.push_back(p);
  }
  CaseIIResult step = case_ii_extension(c, ps, {0}, 0, 1, reg, grounds, 4);
  CHECK(step.cond.parts == 6);  // 2k parts times C(2k+1, 2) pairs
  CHECK(step.witness == ExtensionWitness{0, 0, 0, 0, 0, 0});
  CHECK(extends(step.cond, c, step.witness));
  CHECK(condition_violations(step.cond, 4).empty());
  // an empty survivor class is rejected
  Registry total;
  total.stage_budget = 2;
  total.functionals[0] = FunctionalTable{0, {FunctionalEntry{0, {}, 1, true}}};
  total.functionals[1] = FunctionalTable{1, {FunctionalEntry{0, {}, 1, true}}};
  CHECK_THROWS(case_ii_extension(c, ps, {0}, 0, 1, total, grounds, 4));
  CHECK_THROWS(case_ii_extension(c, {ps[0]}, {0}, 0, 1, reg, grounds, 4));
}

TEST_CASE("dichotomy: empty registry reaches case ii") {
  Registry reg;
  reg.stage_budget = 2;
  GroundSets grounds{4, Bits::from_text("1100"), Bits::zeros(4)};
  Condition c = one_part_condition(4);
  SearchOutcome out = dichotomy_search(c, {0}, 0, 1, reg, grounds, 4, 2);
  REQUIRE(out.kind == SearchOutcome::Kind::CaseII);
  CHECK(out.witnesses == std::vector<std::size_t>{0, 1});
  REQUIRE(out.case_ii_valuations.size() == 3);
  CHECK(out.case_ii_valuations[0].text() == "{0:0,1:0}");
  CHECK(out.case_ii_valuations[1].text() == "{0:0,1:1}");
  CHECK(out.case_ii_valuations[2].text() == "{0:1,1:0}");
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = a + 1; b < 3; ++b)
      CHECK(incompatible(out.case_ii_valuations[a], out.case_ii_valuations[b]));
}

TEST_CASE("dichotomy: a correct refuted valuation reaches case i") {
  GroundSets grounds = pin_grounds();
  Registry reg = pin_registry(grounds.universe);
  Condition c = one_part_condition(grounds.universe);
  SearchOutcome out = dichotomy_search(c, {0}, 0, 1, reg, grounds, 8, 2);
  REQUIRE(out.kind == SearchOutcome::Kind::CaseI);
  CHECK(out.case_i_valuation.text() == "{0:0}");
  CHECK(is_correct(out.case_i_valuation, reg));
  CHECK(out.enumerated.contains(out.case_i_valuation));
}

TEST_CASE("dichotomy: exhausted candidates are unresolved") {
  Registry reg;
  reg.stage_budget = 2;
  GroundSets grounds{4, Bits::from_text("1100"), Bits::zeros(4)};
  Condition c = one_part_condition(4);
  SearchOutcome out = dichotomy_search(c, {0}, 0, 1, reg, grounds, 4, 0);
  CHECK(out.kind == SearchOutcome::Kind::Unresolved);
  CHECK(out.witnesses == std::vector<std::size_t>{0});
}

TEST_CASE("dichotomy: a fully settled diagonal violates the hypothesis") {
  Registry reg;
  reg.stage_budget = 2;
  reg.diagonal[0] = DiagonalFact{true, 1};
  reg.diagonal[1] = DiagonalFact{false, 1};
  reg.diagonal[2] = DiagonalFact{true, 1};
  GroundSets grounds{4, Bits::from_text("1100"), Bits::zeros(4)};
  Condition c = one_part_condition(4);
  SearchOutcome out = dichotomy_search(c, {0}, 0, 1, reg, grounds, 4, 2);
  REQUIRE(out.kind == SearchOutcome::Kind::HypothesisViolated);
  CHECK(out.witnesses.empty());
  REQUIRE(out.h.size() == 3);
  for (const auto& [n, v] : out.h) {
    EvalResult d = diag(reg, n, reg.stage_budget);
    REQUIRE(d.has_value());
    CHECK(v != *d);  // h avoids the diagonal everywhere it is settled
  }
}

TEST_CASE("requirement loop: nothing to do when already forced") {
  Registry reg;
  reg.stage_budget = 2;
  GroundSets grounds{4, Bits::from_text("1100"), Bits::zeros(4)};
  Condition c = one_part_condition(4);  // empty tables diverge everywhere
  ForceRResult res = force_r_extension(c, 0, 1, reg, grounds, 4, 2);
  CHECK(res.status == ForceRResult::Status::Forced);
  CHECK(res.rounds.empty());
  CHECK(res.cond.stems == c.stems);
}

TEST_CASE("requirement loop: one case-i round forces the pin scenario") {
  GroundSets grounds = pin_grounds();
  Registry reg = pin_registry(grounds.universe);
  Condition c = one_part_condition(grounds.universe);
  ForceRResult res = force_r_extension(c, 0, 1, reg, grounds, 8, 2);
  REQUIRE(res.status == ForceRResult::Status::Forced);
  REQUIRE(res.rounds.size() == 1);
  CHECK(res.rounds[0].tag == "CaseI");
  CHECK(res.cond.stems[0] == Bits::from_text("0000"));
  CHECK(unforced_parts(res.cond, 0, 1, reg, grounds).empty());
  CHECK(extends(res.cond, c, identity_witness(1)));
}

TEST_CASE("requirement loop: violation and budget outcomes propagate") {
  GroundSets grounds{4, Bits::from_text("1100"), Bits::zeros(4)};
  // every G misses the diagonal on both sides: tables answer the
  // opposite of every settled value and are total on 0..universe
  Registry reg;
  reg.stage_budget = 2;
  for (std::size_t n = 0; n < 3; ++n) reg.diagonal[n] = DiagonalFact{(n % 2) == 0, 1};
  FunctionalTable t0{0, {}};
  for (std::size_t n = 0; n <= 4; ++n) {
    bool out = n < 3 ? !((n % 2) == 0) : false;
    t0.entries.push_back(FunctionalEntry{n, {}, 1, out});
  }
  reg.functionals[0] = t0;
  Condition c = one_part_condition(4);
  REQUIRE(unforced_parts(c, 0, 0, reg, grounds) == std::set<std::size_t>{0});
  ForceRResult res = force_r_extension(c, 0, 0, reg, grounds, 4, 2);
  REQUIRE(res.status == ForceRResult::Status::HypothesisViolated);
  for (const auto& [n, v] : res.h) {
    EvalResult d = diag(reg, n, reg.stage_budget);
    if (d.has_value()) CHECK(v != *d);
  }

  Registry empty;
  empty.stage_budget = 2;
  Condition pinned = one_part_condition(4);
  ForceRResult un = force_r_extension(pinned, 0, 1, empty, grounds, 4, 0);
  CHECK(un.status == ForceRResult::Status::Forced);  // empty tables force trivially
}
