#include <catch2/catch_amalgamated.hpp>

#include "hypercc/comb.hpp"
#include "hypercc/surd.hpp"
#include "hypercc/rng.hpp"
#include "hypercc/multigraph.hpp"

using namespace hypercc;

TEST_CASE("binomials and rankings") {
  BinomTable bt(20, 5);
  CHECK(bt(5, 2) == 10);
  CHECK(bt(20, 5) == 15504);
  CHECK(big_binomial(40, 20) == BigInt("137846528820"));

  // colex ranks are a bijection onto [C(8,3)] and unrank inverts rank
  std::vector<int> out;
  std::set<uint64_t> ranks;
  for_each_subset(8, 3, [&](const std::vector<int>& v) {
    uint64_t r = colex_rank(v, bt);
    ranks.insert(r);
    colex_unrank(r, 3, out, bt);
    CHECK(out == v);
  });
  CHECK(ranks.size() == 56);
  CHECK(*ranks.begin() == 0);
  CHECK(*ranks.rbegin() == 55);

  // multiset ranks are a bijection onto [C(n+r-1, r)]
  std::set<uint64_t> seen;
  for_each_multiset(5, 3, [&](const std::vector<int>& v) { seen.insert(multiset_rank(v, bt)); });
  CHECK(seen.size() == 35);
  CHECK(*seen.begin() == 0);
  CHECK(*seen.rbegin() == 34);
}

TEST_CASE("surd ring") {
  CHECK(Surd::sqrt_of(Rational(4)).as_rational() == 2);
  CHECK(Surd::sqrt_of(Rational(18)).str() == "3*sqrt(2)");
  CHECK((Surd::sqrt_of(Rational(2)) * Surd::sqrt_of(Rational(3))).str() == "1*sqrt(6)");
  CHECK((Surd::sqrt_of(Rational(6)) * Surd::sqrt_of(Rational(10))).str() == "2*sqrt(15)");
  Surd x = Surd(Rational(1, 2)) + Surd::sqrt_of(Rational(1, 3));
  Surd y = x * x;  // 1/4 + 1/3 + sqrt(1/3)
  CHECK((y - Surd(Rational(7, 12))).str() == Surd::sqrt_of(Rational(1, 3)).str());
  CHECK_FALSE(y.is_rational());
  CHECK((x - x).is_zero());
  // division by single-term surds
  Surd z = Surd(Rational(5)) / Surd::sqrt_of(Rational(5));
  CHECK(z == Surd::sqrt_of(Rational(5)));
  CHECK(Surd::sqrt_pow(Rational(1, 3), 4).as_rational() == Rational(1, 9));
  CHECK_THROWS_AS(Surd::sqrt_of(Rational(-1)), std::domain_error);
  CHECK_THROWS_AS(y.as_rational(), std::domain_error);
}

TEST_CASE("counter rng determinism and substreams") {
  Rng a = Rng::substream(42, 7);
  Rng b = Rng::substream(42, 7);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  Rng c = Rng::substream(42, 8);
  int same = 0;
  Rng a2 = Rng::substream(42, 7);
  for (int i = 0; i < 64; ++i) same += a2.next_u64() == c.next_u64();
  CHECK(same == 0);
  // uniform01 in (0, 1]
  Rng u(5);
  for (int i = 0; i < 1000; ++i) {
    double x = u.uniform01();
    CHECK(x > 0);
    CHECK(x <= 1);
  }
  // normals: mean/variance sanity
  Rng g(9);
  double s = 0, s2 = 0;
  int trials = 20000;
  for (int i = 0; i < trials; ++i) {
    double v = g.normal();
    s += v;
    s2 += v * v;
  }
  CHECK(std::abs(s / trials) < 0.03);
  CHECK(std::abs(s2 / trials - 1.0) < 0.05);
}

TEST_CASE("multigraph basics") {
  auto g = MultiHypergraph::from_edges({{0, 1, 2}, {2, 3, 4}, {0, 1, 2}});
  CHECK(g.total_edges() == 3);
  CHECK(g.vertices() == std::vector<int>{0, 1, 2, 3, 4});
  CHECK(g.edge_factorial() == 2);
  CHECK(g.connected());
  CHECK(g.degrees()[2] == 3);

  auto h = MultiHypergraph::from_edges({{0, 1}, {3, 4}});
  CHECK_FALSE(h.connected());
  CHECK(h.component_count() == 2);

  auto beta = MultiHypergraph::from_edges({{0, 1, 2}});
  CHECK(submultigraph_of(beta, g));
  CHECK(multigraph_minus(g, beta).total_edges() == 2);
  CHECK(multigraph_binomial(g, beta) == 2);  // C(2,1) on the doubled edge

  int count = 0;
  for_each_submultigraph(g, [&](const MultiHypergraph&) { ++count; });
  CHECK(count == 3 * 2);  // multiplicities (2+1)*(1+1)
}
