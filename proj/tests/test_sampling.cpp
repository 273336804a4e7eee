#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "cfdm/sampling.hpp"
#include "helpers.hpp"

using namespace cfdm;
using namespace cfdm::testutil;

namespace {

std::multiset<Tuple> as_set(const std::vector<Tuple>& v) {
  return {v.begin(), v.end()};
}

// Homogeneous cluster: `count` complete tuples sharing `shared` attribute
// values plus one unique id column; any two distinct members agree on
// exactly `shared` attributes.
Relation cluster(std::size_t count, std::size_t shared,
                 const std::string& tag) {
  std::vector<std::string> attrs;
  for (std::size_t i = 0; i < shared; ++i) attrs.push_back("A" + std::to_string(i));
  attrs.push_back("ID");
  std::vector<std::vector<std::string>> rows;
  for (std::size_t r = 0; r < count; ++r) {
    std::vector<std::string> row;
    for (std::size_t i = 0; i < shared; ++i)
      row.push_back(tag + std::to_string(i));
    row.push_back(tag + "#" + std::to_string(r));
    rows.push_back(std::move(row));
  }
  return make_relation(std::move(attrs), std::move(rows));
}

// Upper chi-square quantile via the Wilson-Hilferty cube approximation.
double chi2_critical(double df, double z) {
  double h = 2.0 / (9.0 * df);
  double t = 1.0 - h + z * std::sqrt(h);
  return df * t * t * t;
}

}  // namespace

TEST_CASE("is_misleading") {
  Relation rel = example1();
  std::vector<Tuple> ref8(rel.tuples.begin(), rel.tuples.begin() + 8);
  std::vector<Tuple> ref7(rel.tuples.begin(), rel.tuples.begin() + 7);

  CHECK(is_misleading(rel.tuples[8], ref8, 2));    // t9 incomplete
  CHECK(is_misleading(rel.tuples[10], ref8, 3));   // t11 shares at most 2
  CHECK_FALSE(is_misleading(rel.tuples[7], ref7, 2));  // t8 via t3
}

TEST_CASE("frrsc reproduces the worked first-group example") {
  Relation rel = example1();
  SamplingParams params{.m = 7, .b = 3, .b_lo = 2};
  std::vector<Tuple> want = {rel.tuples[0], rel.tuples[7], rel.tuples[2],
                             rel.tuples[3], rel.tuples[4], rel.tuples[5],
                             rel.tuples[6]};
  bool found = false;
  for (std::uint64_t seed = 0; seed < 5000 && !found; ++seed) {
    params.seed = seed;
    MemoryStream ms(rel);
    SamplingStats stats;
    if (frrsc(ms, params, stats) == want) {
      found = true;
      CHECK(stats.rejected_incomplete == 2);  // t9, t10
      CHECK(stats.rejected_special == 1);     // t11
      CHECK(stats.passes == 1);
    }
  }
  CHECK(found);
}

TEST_CASE("frrsc with exactly m complete tuples returns them in order") {
  Relation rel = cluster(5, 4, "c");
  MemoryStream ms(rel);
  SamplingParams params{.m = 5, .b = 4, .b_lo = 3, .seed = 7};
  SamplingStats stats;
  CHECK(frrsc(ms, params, stats) == rel.tuples);
}

TEST_CASE("frrsc errors when complete tuples run short") {
  Relation rel = parse_csv("A,B\n1,2\n1,XXXX\n3,4\nXXXX,1\n5,6\n");
  MemoryStream ms(rel);
  SamplingParams params{.m = 7, .b = 2, .b_lo = 1};
  SamplingStats stats;
  try {
    frrsc(ms, params, stats);
    FAIL("expected error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("found 3") != std::string::npos);
  }
}

TEST_CASE("trrsc reproduces the worked second-group example and stops") {
  Relation rel = example1();
  SampleGroups prior;
  prior.groups.push_back({rel.tuples[0], rel.tuples[1], rel.tuples[2],
                          rel.tuples[3]});
  prior.q.push_back(4);
  SamplingParams params{.m = 3, .b = 3, .b_lo = 2, .seed = 1};
  SamplingStats stats;
  MemoryStream ms(rel);
  std::vector<Tuple> candidate;
  auto result = trrsc(ms, prior, params, stats, &candidate);
  CHECK_FALSE(result.has_value());  // STOP: n stays 1
  CHECK(candidate ==
        std::vector<Tuple>{rel.tuples[4], rel.tuples[5], rel.tuples[6]});
}

TEST_CASE("trrsc on covered data stops immediately") {
  Relation rel = cluster(10, 4, "c");
  SampleGroups prior;
  prior.groups.push_back({rel.tuples.begin(), rel.tuples.begin() + 3});
  prior.q.push_back(10);
  // Members agree on 4 attributes, strictly above b: every tuple is covered.
  SamplingParams params{.m = 3, .b = 3, .b_lo = 2, .seed = 1};
  SamplingStats stats;
  MemoryStream ms(rel);
  std::vector<Tuple> candidate;
  CHECK_FALSE(trrsc(ms, prior, params, stats, &candidate).has_value());
  CHECK(candidate.empty());
}

TEST_CASE("trrsc draws the next group only from the unseen cluster") {
  // Cluster B shares exactly 3 of 6 attributes with cluster A.
  std::vector<std::string> attrs{"P", "Q", "R", "S", "T", "ID"};
  std::vector<std::vector<std::string>> rows;
  for (int i = 0; i < 8; ++i)
    rows.push_back({"p", "q", "r", "s", "t", "a" + std::to_string(i)});
  for (int i = 0; i < 20; ++i)
    rows.push_back({"p", "q", "r", "s2", "t2", "b" + std::to_string(i)});
  Relation rel = make_relation(attrs, rows);

  SampleGroups prior;
  prior.groups.push_back({rel.tuples.begin(), rel.tuples.begin() + 8});
  prior.q.push_back(8);
  SamplingParams params{.m = 3, .b = 4, .b_lo = 3, .seed = 11};
  SamplingStats stats;
  MemoryStream ms(rel);
  auto result = trrsc(ms, prior, params, stats);
  REQUIRE(result.has_value());
  for (const Tuple& t : *result) {
    CHECK(t.cells[3] == Cell{"s2"});
    for (const Tuple& a : prior.groups[0]) CHECK(cmp(t, a) <= params.b);
  }
}

TEST_CASE("brrsc reproduces the worked one-pass example") {
  Relation rel = example1();
  SamplingParams params{.m = 3, .b = 3, .b_lo = 2};
  std::multiset<Tuple> want1 = {rel.tuples[1], rel.tuples[2], rel.tuples[3]};
  std::multiset<Tuple> want2 = {rel.tuples[4], rel.tuples[5], rel.tuples[6]};
  bool found = false;
  for (std::uint64_t seed = 0; seed < 5000 && !found; ++seed) {
    params.seed = seed;
    MemoryStream ms(rel);
    SamplingStats stats;
    SampleGroups out = brrsc(ms, params, stats);
    if (out.n() == 2 && as_set(out.groups[0]) == want1 &&
        as_set(out.groups[1]) == want2 &&
        out.q == std::vector<std::uint64_t>{4, 3} &&
        stats.groups_dropped == 1) {  // the t8 group never fills
      found = true;
      CHECK(stats.passes == 1);
      CHECK(ms.passes() == 1);
    }
  }
  CHECK(found);
}

TEST_CASE("brrsc is deterministic and single-pass") {
  Relation rel = cluster(500, 4, "c");
  SamplingParams params{.m = 20, .b = 4, .b_lo = 3, .seed = 99};
  SamplingStats s1, s2;
  MemoryStream m1(rel), m2(rel);
  SampleGroups g1 = brrsc(m1, params, s1);
  SampleGroups g2 = brrsc(m2, params, s2);
  CHECK(g1.groups == g2.groups);
  CHECK(g1.q == g2.q);
  CHECK(s1.comparisons == s2.comparisons);
  CHECK(m1.passes() == 1);
  REQUIRE(g1.n() == 1);
  CHECK(g1.groups[0].size() == 20);
  for (const Tuple& t : g1.groups[0]) CHECK(is_complete(t));
}

TEST_CASE("brrsc errors on streams shorter than m complete tuples") {
  Relation rel = cluster(4, 4, "c");
  MemoryStream ms(rel);
  SamplingParams params{.m = 6, .b = 4, .b_lo = 3};
  SamplingStats stats;
  CHECK_THROWS_AS(brrsc(ms, params, stats), std::runtime_error);
}

TEST_CASE("sampler inclusion is uniform on a homogeneous cluster") {
  const std::size_t rows = 50, m = 5, runs = 2000;
  Relation rel = cluster(rows, 4, "c");
  SamplingParams params{.m = m, .b = 4, .b_lo = 3};
  std::vector<std::size_t> hits_f(rows, 0), hits_b(rows, 0);
  auto index_of = [&](const Tuple& t) {
    return std::stoul(t.cells.back()->substr(2));
  };
  for (std::uint64_t seed = 0; seed < runs; ++seed) {
    params.seed = seed;
    MemoryStream m1(rel), m2(rel);
    SamplingStats s1, s2;
    for (const Tuple& t : frrsc(m1, params, s1)) ++hits_f[index_of(t)];
    SampleGroups g = brrsc(m2, params, s2);
    REQUIRE(g.n() == 1);
    for (const Tuple& t : g.groups[0]) ++hits_b[index_of(t)];
  }
  double expect = double(runs * m) / double(rows);
  double crit = chi2_critical(double(rows - 1), 2.326);  // alpha = 0.01
  for (const auto& hits : {hits_f, hits_b}) {
    double stat = 0.0;
    for (std::size_t h : hits) {
      double d = double(h) - expect;
      stat += d * d / expect;
    }
    CHECK(stat < crit);
  }
}

TEST_CASE("invalid sampling parameters are rejected") {
  SamplingParams p{.m = 3, .b = 3, .b_lo = 3};
  CHECK_THROWS_AS(p.validate(7), std::invalid_argument);
  p = {.m = 0, .b = 3, .b_lo = 2};
  CHECK_THROWS_AS(p.validate(7), std::invalid_argument);
  p = {.m = 3, .b = 9, .b_lo = 2};
  CHECK_THROWS_AS(p.validate(7), std::invalid_argument);
  p = {.m = 3, .b = 3, .b_lo = 2, .n_max = 1};
  CHECK_THROWS_AS(p.validate(7), std::invalid_argument);
}
