#include <catch2/catch_amalgamated.hpp>

#include "hypercc/conditional.hpp"

using namespace hypercc;
using namespace hypercc::lowdeg;
using namespace hypercc::conditional;

namespace {
ExactParams base_params(int n, int D) {
  ExactParams p;
  p.model = Model::pds;
  p.n = n;
  p.r = 2;
  p.D = D;
  p.rho = Rational(1, 4);
  p.q0 = Rational(1, 5);
  p.q1 = Rational(2, 5);
  return p;
}

// recompute F from scratch (no shared memo) to confirm evaluation-order
// independence of the recursion
Rational recompute_F(const ConditionalSystem& sys, int ai) {
  Rational acc = sys.c_tilde[size_t(ai)];
  for (int bi : sys.comp_union_ids[size_t(ai)]) {
    if (bi == ai) continue;
    acc -= h_entry(sys, bi, ai) * recompute_F(sys, bi);
  }
  return acc / sys.denom[size_t(ai)];
}
}  // namespace

TEST_CASE("event checks") {
  // r=2, tau = 1.2: triangle sparse, two triangles sharing an edge dense
  EventSpec sp{Rational(6, 10), Rational(1, 2), Rational(0), 5};
  CHECK(sp.tau() == Rational(6, 5));
  CHECK(sp.m_of(3) == 3);
  CHECK(sp.m_of(4) == 4);
  std::vector<Edge> triangle = {{0, 1}, {1, 2}, {0, 2}};
  CHECK(event_holds_on(triangle, sp));
  std::vector<Edge> two_tri = {{0, 1}, {1, 2}, {0, 2}, {1, 3}, {2, 3}};
  CHECK_FALSE(event_holds_on(two_tri, sp));
  // empty graph: event vacuously true
  CHECK(event_holds_on({}, sp));
  // D = 0: vacuous
  EventSpec d0 = sp;
  d0.D = 0;
  CHECK(event_holds_on(two_tri, d0));
  // single edge with m_r >= 1
  CHECK(event_holds_on({{0, 1}}, sp));
}

TEST_CASE("event always true reduces to the unconditional system") {
  auto p = base_params(4, 2);
  EventSpec huge{Rational(10), Rational(1), Rational(0), p.D};
  auto sys = build_conditional_system(p, huge);
  CHECK(sys.p_event_uncond == 1);
  auto plain = MomentSystem::build(p);
  for (size_t i = 0; i < plain.G.size(); ++i) {
    CHECK(sys.c_tilde[i] == plain.c[i].as_rational());
    CHECK(sys.denom[i] == 1);
  }
  // the F-certificate then matches the unconditional gamma-summed action:
  // residual of the unconditional system with u built from F is zero
  for (size_t ai = 0; ai < sys.G.size(); ai += 5)
    CHECK(conditional_residual(sys, int(ai)).is_zero());
}

TEST_CASE("conditional system identities with a binding event") {
  auto p = base_params(5, 3);
  EventSpec sp{Rational(2, 5), Rational(1, 2), Rational(1, 10), p.D};  // tau = 0.9
  auto sys = build_conditional_system(p, sp);
  CHECK(sys.p_event_uncond < 1);
  CHECK(sys.denom_min > 0);

  // key identity: exact zero off C_alpha, (q0(1-q0))^{|b|/2} H_{ba} on it
  Rng g(17);
  for (int t = 0; t < 250; ++t) {
    int ai = int(g.next_u64() % sys.G.size());
    int bi = int(g.next_u64() % sys.G.size());
    Surd lhs = key_identity_lhs(sys, bi, ai);
    bool in_c = std::binary_search(sys.comp_union_ids[size_t(ai)].begin(),
                                   sys.comp_union_ids[size_t(ai)].end(), bi);
    if (!in_c) {
      CHECK(lhs.is_zero());
    } else {
      Rational h = (bi == ai) ? sys.denom[size_t(ai)] : h_entry(sys, bi, ai);
      CHECK(lhs == Surd::sqrt_pow(p.q0 * (1 - p.q0), sys.G[size_t(bi)].total_edges()) * Surd(h));
    }
  }
  // residual of M~^T u = c~ vanishes identically
  for (size_t ai = 0; ai < sys.G.size(); ai += 11)
    CHECK(conditional_residual(sys, int(ai)).is_zero());
  // F is evaluation-order independent
  for (size_t ai = 0; ai < sys.G.size(); ai += 17)
    CHECK(sys.F[ai] == recompute_F(sys, int(ai)));
  // H complexity values: connected -> 2; w = 2 without vertex 0 follows the
  // component recursion
  for (size_t ai = 0; ai < sys.G.size(); ++ai) {
    const auto& a = sys.G[ai];
    if (a.empty() || a.connected()) CHECK(sys.Hcomp[ai] == 2);
  }
  // bound tables
  auto rep = conditional_bounds_report(sys);
  CHECK(rep.denom_hypothesis);
  CHECK(rep.all_hold);
  CHECK(rep.h_vs_w_ok);
}

TEST_CASE("complexity recursion on a two-component example") {
  auto p = base_params(5, 2);
  EventSpec sp{Rational(2, 5), Rational(1, 2), Rational(1, 10), p.D};
  auto sys = build_conditional_system(p, sp);
  // alpha = {1,2} + {3,4}: two components, vertex 0 absent ->
  // H = 2 + 2(H(0) + H(c1) + H(c2)) = 2 + 2(2 + 2 + 2) = 14 <= 2*2!*9 = 36
  MultiHypergraph a = MultiHypergraph::from_edges({{1, 2}, {3, 4}});
  auto it = sys.index.find(a);
  REQUIRE(it != sys.index.end());
  CHECK(sys.Hcomp[size_t(it->second)] == 14);
  // with vertex 0 inside one component: C_alpha keeps the 0-component ->
  // H = 2 + 2 H(c0) = 6
  MultiHypergraph b = MultiHypergraph::from_edges({{0, 1}, {3, 4}});
  auto it2 = sys.index.find(b);
  REQUIRE(it2 != sys.index.end());
  CHECK(sys.Hcomp[size_t(it2->second)] == 6);
}

TEST_CASE("multiple event specs") {
  auto p = base_params(5, 3);
  std::vector<EventSpec> specs = {
      {Rational(2, 5), Rational(1, 2), Rational(1, 10), p.D},   // tau = 0.9
      {Rational(1, 2), Rational(1, 2), Rational(1, 10), p.D},   // tau = 1.1
      {Rational(3, 10), Rational(1, 2), Rational(1, 20), p.D},  // tau = 0.65
  };
  for (auto& sp : specs) {
    auto sys = build_conditional_system(p, sp);
    Rng g(23);
    for (int t = 0; t < 60; ++t) {
      int ai = int(g.next_u64() % sys.G.size());
      int bi = int(g.next_u64() % sys.G.size());
      bool in_c = std::binary_search(sys.comp_union_ids[size_t(ai)].begin(),
                                     sys.comp_union_ids[size_t(ai)].end(), bi);
      Surd lhs = key_identity_lhs(sys, bi, ai);
      if (!in_c) CHECK(lhs.is_zero());
    }
    for (size_t ai = 0; ai < sys.G.size(); ai += 23)
      CHECK(conditional_residual(sys, int(ai)).is_zero());
  }
}

TEST_CASE("event probability monte carlo") {
  // spec making every graph sparse -> estimate 0
  EventSpec all{Rational(10), Rational(1), Rational(0), 3};
  auto rep = event_probability_mc(PdsParams{14, 2, 0.4, 0.2, 0.8}, all, 60, 5);
  CHECK(rep.p_hat == 0.0);
  // D = 0 -> vacuous
  EventSpec d0{Rational(2, 5), Rational(1, 2), Rational(0), 0};
  CHECK(event_probability_mc(PdsParams{14, 2, 0.4, 0.2, 0.8}, d0, 40, 5).p_hat == 0.0);
  // binding event at a dense planted instance: nonzero estimate with CI
  EventSpec tight{Rational(2, 5), Rational(1, 2), Rational(0), 3};  // tau = 0.8
  auto rep2 = event_probability_mc(PdsParams{16, 2, 0.6, 0.3, 0.95}, tight, 300, 5);
  CHECK(rep2.p_hat > 0.1);
  CHECK(rep2.stderr_hat > 0);
  CHECK_THROWS_AS(event_probability_mc(PdsParams{14, 2, 0.4, 0.2, 0.8}, all, 0, 5),
                  std::invalid_argument);
}
