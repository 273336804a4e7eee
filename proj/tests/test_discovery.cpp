#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>
#include <string>

#include "cfdm/discovery.hpp"
#include "cfdm/rng.hpp"
#include "helpers.hpp"

using namespace cfdm;
using namespace cfdm::testutil;

namespace {

std::set<std::string> rule_strings(const std::vector<MinedRule>& rules) {
  std::set<std::string> out;
  for (const auto& r : rules) out.insert(format_cfd(r.cfd));
  return out;
}

bool contains(const std::vector<MinedRule>& rules, const std::string& rule) {
  return rule_strings(rules).count(rule) > 0;
}

// ---- independent oracle -------------------------------------------------
// Re-derives the minimal valid rule set from first principles with plain
// loops. Meant for small complete relations with short values, where the
// similarity tolerance can never fire.

struct OracleEval {
  std::size_t t_prime = 0, supporters = 0;
};

OracleEval oracle_eval(const CFD& c, const Relation& rel) {
  OracleEval ev;
  std::vector<int> idx;
  for (const auto& a : c.lhs) idx.push_back(rel.schema.index_of(a));
  int ri = rel.schema.index_of(c.rhs);
  std::map<std::vector<std::string>, std::map<std::string, std::size_t>> subs;
  for (const Tuple& t : rel.tuples) {
    bool match = true;
    for (std::size_t j = 0; j < idx.size(); ++j) {
      if (!t.cells[idx[j]].has_value() ||
          (c.lhs_cell(j).is_const() &&
           *c.lhs_cell(j).value != *t.cells[idx[j]]))
        match = false;
    }
    if (!match || !t.cells[ri].has_value()) {
      ev.t_prime += match;
      continue;
    }
    ++ev.t_prime;
    if (c.rhs_cell().is_const()) {
      if (*t.cells[ri] == *c.rhs_cell().value) ++ev.supporters;
    } else {
      std::vector<std::string> key;
      for (int i : idx) key.push_back(*t.cells[i]);
      ++subs[key][*t.cells[ri]];
    }
  }
  for (const auto& [k, counts] : subs) {
    std::size_t best = 0;
    for (const auto& [v, n] : counts) best = std::max(best, n);
    ev.supporters += best;
  }
  return ev;
}

bool oracle_valid(const CFD& c, const Relation& rel, double e, std::size_t k) {
  OracleEval ev = oracle_eval(c, rel);
  return ev.t_prime > 0 && ev.supporters >= k &&
         double(ev.supporters) / double(ev.t_prime) > e;
}

bool oracle_generalizes(const CFD& g, const CFD& c) {  // g at least as general
  if (g.rhs != c.rhs || g.rhs_cell() != c.rhs_cell()) return false;
  for (std::size_t i = 0; i < g.lhs.size(); ++i) {
    bool ok = false;
    for (std::size_t j = 0; j < c.lhs.size(); ++j)
      if (g.lhs[i] == c.lhs[j] &&
          (!g.lhs_cell(i).is_const() || g.lhs_cell(i) == c.lhs_cell(j)))
        ok = true;
    if (!ok) return false;
  }
  return true;
}

std::set<std::string> oracle_rules(const Relation& rel, double e,
                                   std::size_t k, std::size_t max_lhs) {
  std::size_t r = rel.schema.arity();
  std::vector<std::set<std::string>> domain(r);
  for (const Tuple& t : rel.tuples)
    for (std::size_t i = 0; i < r; ++i)
      if (t.cells[i].has_value()) domain[i].insert(*t.cells[i]);

  std::vector<CFD> valid;
  // Enumerate attribute subsets by bitmask, pattern cells by odometer.
  for (std::uint32_t mask = 1; mask < (1u << r); ++mask) {
    std::vector<int> X;
    for (std::size_t i = 0; i < r; ++i)
      if (mask >> i & 1) X.push_back(int(i));
    if (X.size() > max_lhs) continue;
    for (std::size_t a = 0; a < r; ++a) {
      if (mask >> a & 1) continue;
      std::vector<std::vector<PatternCell>> choices;
      for (int x : X) {
        std::vector<PatternCell> c{PatternCell::wildcard()};
        for (const auto& v : domain[x]) c.push_back(PatternCell::constant(v));
        choices.push_back(std::move(c));
      }
      std::vector<PatternCell> rhs_choices{PatternCell::wildcard()};
      for (const auto& v : domain[a])
        rhs_choices.push_back(PatternCell::constant(v));
      choices.push_back(std::move(rhs_choices));

      std::vector<std::size_t> odo(choices.size(), 0);
      while (true) {
        CFD c;
        for (std::size_t j = 0; j < X.size(); ++j) {
          c.lhs.push_back(rel.schema.attributes[X[j]]);
          c.pattern.push_back(choices[j][odo[j]]);
        }
        c.rhs = rel.schema.attributes[a];
        c.pattern.push_back(choices.back()[odo.back()]);
        if (oracle_valid(c, rel, e, k)) valid.push_back(c);
        std::size_t j = 0;
        for (; j < odo.size(); ++j) {
          if (++odo[j] < choices[j].size()) break;
          odo[j] = 0;
        }
        if (j == odo.size()) break;
      }
    }
  }
  std::set<std::string> minimal;
  for (const CFD& c : valid) {
    bool reduced = false;
    for (const CFD& g : valid)
      if (!(g == c) && oracle_generalizes(g, c)) reduced = true;
    if (!reduced) minimal.insert(format_cfd(c));
  }
  return minimal;
}

Relation random_relation(Rng& rng, std::size_t rows, std::size_t attrs,
                         std::size_t values) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < attrs; ++i) names.push_back("A" + std::to_string(i));
  std::vector<std::vector<std::string>> data;
  for (std::size_t i = 0; i < rows; ++i) {
    std::vector<std::string> row;
    for (std::size_t j = 0; j < attrs; ++j)
      row.push_back("v" + std::to_string(rng.range(0, values - 1)));
    data.push_back(std::move(row));
  }
  return make_relation(names, data);
}

// 50 tuples where A determines B exactly; optionally corrupt B cells.
Relation fd_fixture(std::size_t corruptions) {
  std::vector<std::vector<std::string>> rows;
  for (int i = 0; i < 50; ++i) {
    std::string a = "a" + std::to_string(i % 10);
    std::string b = "b" + std::to_string((i % 10) / 2);
    rows.push_back({a, b, "c" + std::to_string(i % 3)});
  }
  for (std::size_t j = 0; j < corruptions; ++j)
    rows[j * 25][1] = "ERR" + std::to_string(j);
  return make_relation({"A", "B", "C"}, rows);
}

}  // namespace

TEST_CASE("support index counts value combinations") {
  Relation r8 = head(example1(), 8);
  SupportIndex idx(r8.tuples, r8.schema, 2);
  CHECK(idx.support({{"CC", "01"}}) == 5);
  CHECK(idx.support({{"CC", "40"}, {"AC", "1069"}}) == 2);
  CHECK(idx.support({{"AC", "1069"}, {"CC", "40"}}) == 2);  // order-free
  CHECK(idx.support({{"CC", "99"}}) == 0);
  std::uint64_t total = 0;
  for (const char* v : {"01", "40"}) total += idx.support({{"CC", v}});
  CHECK(total == 8);  // level-1 partition property
  CHECK_THROWS_AS(idx.support({{"CC", "01"}, {"AC", "108"}, {"CT", "MH"}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(idx.support({{"QQ", "01"}}), std::invalid_argument);
}

TEST_CASE("difference set is empty exactly for determined attributes") {
  Relation rel = make_relation(
      {"A", "B"}, {{"1", "x"}, {"1", "x"}, {"2", "y"}, {"2", "y"}});
  DifferenceSet d = build_difference_set(rel.tuples, rel.schema, "B", 0.9);
  // A determines B here, so every disagreeing pair disagrees on A too, but
  // pairs still exist.
  CHECK_FALSE(d.empty());
  CHECK(d.uncovered(1ULL << 0) == 0);  // {A} separates every pair

  Relation det = make_relation({"A", "B"}, {{"1", "x"}, {"1", "x"}});
  CHECK(build_difference_set(det.tuples, det.schema, "B", 0.9).empty());

  Relation mixed = make_relation(
      {"A", "B"}, {{"1", "x"}, {"1", "y"}, {"2", "x"}});
  DifferenceSet d2 = build_difference_set(mixed.tuples, mixed.schema, "B", 0.9);
  CHECK(d2.agree_masks.size() == 2);   // (t1,t2) agree on A; (t2,t3) on nothing
  CHECK(d2.uncovered(1ULL << 0) == 1);  // {A} misses the first pair
}

TEST_CASE("miners keep an exact dependency, clean or slightly corrupted") {
  DiscoveryParams params{.e = 0.9, .min_support = 2, .max_lhs = 2};
  for (std::size_t corruptions : {0u, 2u}) {
    Relation rel = fd_fixture(corruptions);
    for (auto miner : {bctane, bfcfd}) {
      auto rules = miner(rel.tuples, rel.schema, params);
      CHECK(contains(rules, "[A] -> B : (_ || _)"));
    }
  }
  // 2 corrupted cells out of 50 leave u = 0.96 > 0.9 by construction.
  Relation dirty = fd_fixture(2);
  RuleEval ev = evaluate_rule(parse_cfd("[A] -> B : (_ || _)"), dirty.tuples,
                              dirty.schema, 0.9);
  CHECK(ev.u == doctest::Approx(0.96));
}

TEST_CASE("worked fixture: lattice miner output at two thresholds") {
  Relation r8 = head(example1(), 8);
  DiscoveryParams params{.e = 0.9, .min_support = 1, .max_lhs = 2};
  auto at_090 = bctane(r8.tuples, r8.schema, params);
  CHECK(contains(at_090, "[CC,AC] -> CT : (_,_ || _)"));

  // At 0.85 the single-attribute rule [AC] -> CT becomes valid (u = 7/8)
  // and left-reduces the two-attribute rule away.
  params.e = 0.85;
  auto at_085 = bctane(r8.tuples, r8.schema, params);
  CHECK(contains(at_085, "[AC] -> CT : (_ || _)"));
  CHECK_FALSE(contains(at_085, "[CC,AC] -> CT : (_,_ || _)"));
}

TEST_CASE("worked fixture: depth-first miner finds the reduced constant rule") {
  Relation r8 = head(example1(), 8);
  DiscoveryParams params{.e = 0.85, .min_support = 1, .max_lhs = 2};
  auto rules = bfcfd(r8.tuples, r8.schema, params);
  // The two-attribute pattern (01,112 || NYC) reduces onto AC alone.
  CHECK(contains(rules, "[AC] -> CT : (112 || NYC)"));
  CHECK_FALSE(contains(rules, "[CC,AC] -> CT : (01,112 || NYC)"));
}

TEST_CASE("worked fixture: free-set miner emits reduced constant rules") {
  Relation r8 = head(example1(), 8);
  DiscoveryParams params{.e = 0.9, .min_support = 1, .max_lhs = 2};
  auto rules = bcfdm(r8.tuples, r8.schema, params);
  CHECK(contains(rules, "[AC] -> CT : (108 || MH)"));
  CHECK_FALSE(contains(rules, "[CC,AC] -> CT : (01,108 || MH)"));
  for (const auto& r : rules) {
    CHECK(r.cfd.kind() == CfdKind::Constant);
    for (const auto& cell : r.cfd.pattern) CHECK(cell.is_const());
  }
}

TEST_CASE("single-tuple group with support floor 2 yields nothing") {
  Relation rel = make_relation({"A", "B"}, {{"1", "x"}});
  DiscoveryParams params{.e = 0.9, .min_support = 2, .max_lhs = 2};
  CHECK(bcfdm(rel.tuples, rel.schema, params).empty());
  CHECK(bctane(rel.tuples, rel.schema, params).empty());
  CHECK(bfcfd(rel.tuples, rel.schema, params).empty());
}

TEST_CASE("empty group yields nothing") {
  Relation rel;
  rel.schema.attributes = {"A", "B"};
  DiscoveryParams params{.e = 0.9, .min_support = 1, .max_lhs = 2};
  CHECK(bfcfd(rel.tuples, rel.schema, params).empty());
}

TEST_CASE("free-set miner output is contained in depth-first constants") {
  Rng rng(424242);
  Relation rel = random_relation(rng, 80, 6, 3);
  DiscoveryParams params{.e = 0.99, .min_support = 1, .max_lhs = 3};
  auto cm = rule_strings(bcfdm(rel.tuples, rel.schema, params));
  auto fd = rule_strings(bfcfd(rel.tuples, rel.schema, params));
  for (const auto& r : cm) CHECK(fd.count(r) == 1);
}

TEST_CASE("miners equal the brute-force oracle on random clean relations") {
  Rng rng(1337);
  DiscoveryParams params{.e = 0.99, .min_support = 1, .max_lhs = 3};
  for (int trial = 0; trial < 8; ++trial) {
    Relation rel = random_relation(rng, 30 + 5 * trial, 5, 3);
    auto want = oracle_rules(rel, params.e, params.min_support, params.max_lhs);
    auto got_bctane = rule_strings(bctane(rel.tuples, rel.schema, params));
    CHECK(got_bctane == want);
    auto fd = bfcfd(rel.tuples, rel.schema, params);
    auto cm = bcfdm(rel.tuples, rel.schema, params);
    auto both = rule_strings(fd);
    for (const auto& r : rule_strings(cm)) both.insert(r);
    CHECK(both == want);
  }
}

TEST_CASE("emitted rules are valid, nontrivial, and left-reduced") {
  Relation rel = fd_fixture(2);
  DiscoveryParams params{.e = 0.9, .min_support = 2, .max_lhs = 2};
  auto rules = bctane(rel.tuples, rel.schema, params);
  REQUIRE_FALSE(rules.empty());
  for (const auto& r : rules) {
    CHECK_NOTHROW(r.cfd.validate());
    RuleEval ev = evaluate_rule(r.cfd, rel.tuples, rel.schema, params.e);
    CHECK(ev == r.eval);
    CHECK(ev.u > params.e);
    CHECK(ev.supporters >= params.min_support);
    for (const auto& other : rules) {
      if (other.cfd == r.cfd) continue;
      CHECK_FALSE(more_general_or_equal(other.cfd, r.cfd));
    }
  }
  // Exact confidence agrees on complete clean-satisfying rules.
  Relation clean = fd_fixture(0);
  for (const auto& r : bctane(clean.tuples, clean.schema, params))
    CHECK(confidence(r.cfd, clean).u > params.e);
}

TEST_CASE("dispatch plan follows arity and volume") {
  CHECK(dfcfd_plan(16, 2000000) ==
        DiscoveryPlan{.use_bctane = true, .use_bfcfd = false, .use_bcfdm = true});
  CHECK(dfcfd_plan(23, 2000000) ==
        DiscoveryPlan{.use_bctane = false, .use_bfcfd = true, .use_bcfdm = true});
  CHECK(dfcfd_plan(16, 10000) ==
        DiscoveryPlan{.use_bctane = false, .use_bfcfd = true, .use_bcfdm = true});
}

TEST_CASE("dfcfd unions miners per group without duplicates") {
  Relation rel = fd_fixture(0);
  SampleGroups groups;
  groups.groups.push_back(rel.tuples);
  groups.groups.push_back(rel.tuples);
  groups.q = {50, 50};
  DiscoveryParams params{.e = 0.9, .min_support = 2, .max_lhs = 2};
  auto per_group = dfcfd(groups, rel.schema, params, 10000);
  REQUIRE(per_group.size() == 2);
  CHECK(per_group[0].size() == per_group[1].size());
  std::set<std::string> seen;
  for (const auto& r : per_group[0])
    CHECK(seen.insert(format_cfd(r.cfd)).second);
  CHECK(contains(per_group[0], "[A] -> B : (_ || _)"));
}

TEST_CASE("tolerance counts near-identical and missing RHS values") {
  // 9 matching tuples: 7 exact, 1 similar (>0.9), 1 missing RHS.
  std::vector<std::vector<std::string>> rows;
  for (int i = 0; i < 7; ++i) rows.push_back({"1", "bluebird-" + std::string(1, 'x')});
  rows.push_back({"1", "bluebird-y"});
  rows.push_back({"1", "XXXX"});
  Relation rel = make_relation({"A", "B"}, rows);
  RuleEval ev = evaluate_rule(parse_cfd("[A] -> B : (1 || bluebird-x)"),
                              rel.tuples, rel.schema, 0.85);
  CHECK(ev.t_prime == 9);
  CHECK(ev.u_prime == 9);  // 7 exact + 1 similar + 1 missing
  CHECK(ev.supporters == 7);
  CHECK(ev.u == 1.0);
}

TEST_CASE("parameter validation") {
  DiscoveryParams p{.e = 0.5};
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = {.e = 1.0};
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = {.e = 0.9, .min_support = 0};
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = {.e = 0.9, .min_support = 1, .max_lhs = 0};
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}
