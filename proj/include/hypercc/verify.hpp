#pragma once

// One-shot verification suites: every closed form against its enumeration
// oracle, every certificate against its system, the conditional machinery,
// and the cumulant identities, at a fast or full level.  Used by the CLI
// `verify` subcommand; the acceptance tests exercise the same machinery at
// pinned sizes.

#include <chrono>

#include "harness.hpp"

namespace hypercc {
namespace verify {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
  double secs = 0;
};

namespace detail {

template <typename F>
CheckResult timed(const std::string& name, F&& body) {
  CheckResult res;
  res.name = name;
  auto t0 = std::chrono::steady_clock::now();
  try {
    auto [ok, detail] = body();
    res.pass = ok;
    res.detail = detail;
  } catch (const std::exception& e) {
    res.pass = false;
    res.detail = std::string("exception: ") + e.what();
  }
  res.secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

inline std::pair<bool, std::string> check_counting(bool full) {
  for (int r : {2, 3}) {
    int kmax = full ? 7 : (r == 2 ? 6 : 5);
    for (int k = 1; k <= kmax; ++k) {
      for (int t = 1; t <= k; ++t) {
        if ((k - t) % (r - 1) != 0) continue;
        BigInt formula = count_rooted_forests(k, t, r);
        BigInt brute = enumerate_rooted_forest_count(k, t, r);
        if (formula != brute)
          return {false, "R mismatch at k=" + std::to_string(k) + " t=" + std::to_string(t) +
                             " r=" + std::to_string(r)};
      }
      if (r == 2 && k >= 2) {
        if (count_hypertrees(k, 2) != big_pow(k, k - 2))
          return {false, "Cayley mismatch at k=" + std::to_string(k)};
      }
      if ((k - 1) % (r - 1) == 0) {
        auto trees = enumerate_labeled_hypertrees(k, r);
        if (BigInt(trees.size()) != count_hypertrees(k, r))
          return {false, "N_k enum mismatch at k=" + std::to_string(k) + " r=" + std::to_string(r)};
      }
    }
  }
  return {true, "closed forms equal enumeration"};
}

inline std::pair<bool, std::string> check_class_tables(bool full) {
  for (int r : {2, 3}) {
    int lmax = full ? (r == 2 ? 3 : 2) : (r == 2 ? 2 : 1);
    for (int ell = 0; ell <= lmax; ++ell) {
      auto table = build_class_table(ell, r);
      int kp = table.total_vertices();
      // embedding counts reproduce the closed-form family count at n = k'
      Rational total = 0;
      BigInt fall = 1;
      for (int i = 2; i <= kp - 1; ++i) fall *= i;  // (k'-1)!
      for (auto& c : table.classes) total += Rational(fall, c.aut);
      BigInt expected = count_tree_family(kp, ell, r);
      if (boost::multiprecision::denominator(total) != 1 ||
          boost::multiprecision::numerator(total) != expected)
        return {false, "family count mismatch at ell=" + std::to_string(ell) +
                           " r=" + std::to_string(r)};
      // brute-force automorphism counts where feasible
      if (kp <= 9) {
        for (auto& c : table.classes)
          if (brute_force_aut(c.rep) != c.aut) return {false, "Aut mismatch"};
      }
    }
  }
  return {true, "class tables complete with exact Aut"};
}

inline std::pair<bool, std::string> check_dp_oracle(bool full) {
  Rng g(20240);
  int trials = full ? 60 : 24;
  for (int t = 0; t < trials; ++t) {
    int r = (t % 2) ? 3 : 2;
    int ell = t % 3 == 2 && r == 2 ? 2 : t % 2 == 0 ? 1 : (t % 3);
    if (r == 3) ell = std::min(ell, 1);
    auto table = build_class_table(ell, r);
    int k = table.total_vertices();
    int n = std::min(12, k + 1 + int(g.next_u64() % 3));
    if (n < k) n = k;
    auto in = DenseSubsets<double>::zeros(n, r);
    for (auto& v : in.vals) v = g.normal();
    Coloring c(n);
    for (int i = 0; i < n; ++i) c[i] = int(g.next_u64() % k);
    for (auto& cls : table.classes) {
      auto dp = color_coded_score<double>(in, c, cls.rep);
      for (int i = 0; i < n; i += 2) {
        double nv = naive_colorful_score<double>(in, &c, cls.rep, i);
        double rel =
            std::abs(dp[i] - nv) / std::max({1.0, std::abs(dp[i]), std::abs(nv)});
        if (rel > 1e-9) return {false, "DP/naive mismatch at trial " + std::to_string(t)};
      }
    }
  }
  return {true, std::to_string(trials) + " randomized instances agree"};
}

inline std::pair<bool, std::string> check_unbiasedness(bool) {
  // n = 5, r = 2, ell = 0 (k = 3): average over all k^n colorings in exact
  // rationals equals the full tree polynomial
  int n = 5, r = 2, ell = 0;
  auto table = build_class_table(ell, r);
  int k = table.total_vertices();
  auto in = DenseSubsets<Rational>::zeros(n, r);
  Rng g(77);
  for (auto& v : in.vals) v = Rational(long(g.next_u64() % 19) - 9, 7);
  long kn = 1;
  for (int i = 0; i < n; ++i) kn *= k;
  std::vector<Rational> avg(n, 0);
  Coloring c(n);
  for (long code = 0; code < kn; ++code) {
    long x = code;
    for (int i = 0; i < n; ++i) {
      c[i] = int(x % k);
      x /= k;
    }
    for (auto& cls : table.classes) {
      auto a = color_coded_score<Rational>(in, c, cls.rep);
      Rational inv_aut = Rational(1, BigInt(cls.aut));
      for (int i = 0; i < n; ++i) avg[i] += a[i] * inv_aut;
    }
  }
  // q = k!/k^k; average / (k^n q) must equal the tree polynomial
  Rational q(big_factorial(k), big_pow(k, k));
  for (int i = 0; i < n; ++i) {
    Rational lhs = avg[i] / (Rational(kn) * q);
    Rational rhs = full_tree_polynomial<Rational>(in, table, i);
    if (lhs != rhs) return {false, "unbiasedness mismatch at i=" + std::to_string(i)};
  }
  return {true, "coloring average equals tree polynomial exactly"};
}

inline lowdeg::ExactParams small_params(lowdeg::Model model, int n, int r, int D) {
  lowdeg::ExactParams p;
  p.model = model;
  p.n = n;
  p.r = r;
  p.D = D;
  p.rho = Rational(1, 4);
  p.q0 = Rational(1, 5);
  p.q1 = Rational(2, 5);
  p.lambda = Rational(3, 7);
  return p;
}

inline std::pair<bool, std::string> check_certificates(bool full) {
  std::vector<lowdeg::ExactParams> cases = {
      small_params(lowdeg::Model::pds, 4, 2, 2),
      small_params(lowdeg::Model::stpca, 4, 2, 2),
  };
  if (full) {
    cases.push_back(small_params(lowdeg::Model::pds, 5, 2, 3));
    cases.push_back(small_params(lowdeg::Model::stpca, 5, 3, 2));
    cases.push_back(small_params(lowdeg::Model::pds, 5, 3, 3));
  }
  for (auto& p : cases) {
    auto sys = lowdeg::MomentSystem::build(p);
    auto cert = lowdeg::build_certificate(sys);
    for (size_t ai = 0; ai < sys.G.size(); ++ai) {
      Surd res = lowdeg::certificate_residual(sys, cert, sys.G[ai], sys.c[ai]);
      if (!res.is_zero()) return {false, "nonzero residual"};
    }
  }
  return {true, std::to_string(cases.size()) + " systems solved exactly"};
}

inline std::pair<bool, std::string> check_oracle_agreement(bool full) {
  for (auto model : {lowdeg::Model::pds, lowdeg::Model::stpca}) {
    auto p = small_params(model, 4, 2, 2);
    auto sys = lowdeg::MomentSystem::build(p);
    for (size_t i = 0; i < sys.G.size(); ++i)
      if (!(oracles::c_oracle(p, sys.G[i]) == sys.c[i])) return {false, "c oracle mismatch"};
    Rng g(5);
    int trials = full ? 150 : 50;
    for (int t = 0; t < trials; ++t) {
      size_t ai = g.next_u64() % sys.G.size();
      size_t bi = g.next_u64() % sys.G.size();
      uint32_t gamma = uint32_t(g.next_u64() % 16);
      Surd cf = lowdeg::m_entry(p, sys.G[bi], gamma, sys.G[ai]);
      Surd oo = oracles::m_oracle(p, sys.G[bi], gamma, sys.G[ai]);
      if (!(cf == oo)) return {false, "M oracle mismatch"};
    }
  }
  return {true, "closed forms equal enumerated expectations"};
}

inline std::pair<bool, std::string> check_corr_duality(bool full) {
  std::vector<lowdeg::ExactParams> cases = {
      small_params(lowdeg::Model::pds, 4, 2, 2),
      small_params(lowdeg::Model::stpca, 4, 2, 2),
  };
  if (full) cases.push_back(small_params(lowdeg::Model::pds, 5, 2, 2));
  for (auto& p : cases) {
    auto sys = lowdeg::MomentSystem::build(p);
    auto rep = lowdeg::duality_gap(sys);
    if (!rep.bound_holds) return {false, "duality bound violated"};
    // D = 0 sanity: corr^2 = rho
    auto p0 = p;
    p0.D = 0;
    auto rep0 = lowdeg::exact_corr(lowdeg::MomentSystem::build(p0));
    if (rep0.corr2 != p.rho) return {false, "D=0 corr mismatch"};
  }
  return {true, "corr <= certificate bound on all cases"};
}

inline std::pair<bool, std::string> check_mutation(bool) {
  // perturbing one M entry by 1e-6 must break the exact residual
  auto p = small_params(lowdeg::Model::pds, 4, 2, 2);
  auto sys = lowdeg::MomentSystem::build(p);
  auto cert = lowdeg::build_certificate(sys);
  // pick an alpha and an entry with nonzero u
  const auto& entry = cert.entries[1];
  size_t ai = 3;
  Surd res = lowdeg::certificate_residual(sys, cert, sys.G[ai], sys.c[ai]);
  Surd m = lowdeg::m_entry(p, sys.G[entry.beta], entry.gamma, sys.G[ai]);
  // simulate M + eps at that entry: residual gains eps * u
  Surd perturbed = res + Surd(Rational(1, 1000000)) * entry.val;
  if (!res.is_zero()) return {false, "baseline residual nonzero"};
  if (perturbed.is_zero()) return {false, "perturbation not detected"};
  (void)m;
  return {true, "perturbed system detected"};
}

inline std::pair<bool, std::string> check_conditional(bool full) {
  auto p = small_params(lowdeg::Model::pds, full ? 5 : 4, 2, full ? 3 : 2);
  conditional::EventSpec spec{Rational(2, 5), Rational(1, 2), Rational(1, 10), p.D};
  auto sys = conditional::build_conditional_system(p, spec);
  Rng g(9);
  int pairs = full ? 150 : 60;
  for (int t = 0; t < pairs; ++t) {
    int ai = int(g.next_u64() % sys.G.size());
    int bi = int(g.next_u64() % sys.G.size());
    Surd lhs = conditional::key_identity_lhs(sys, bi, ai);
    bool in_c = std::binary_search(sys.comp_union_ids[size_t(ai)].begin(),
                                   sys.comp_union_ids[size_t(ai)].end(), bi);
    if (!in_c && !lhs.is_zero()) return {false, "key identity nonzero off C_alpha"};
    if (in_c) {
      Rational h = (bi == ai) ? sys.denom[size_t(ai)] : conditional::h_entry(sys, bi, ai);
      Surd rhs = Surd::sqrt_pow(p.q0 * (1 - p.q0), sys.G[size_t(bi)].total_edges()) * Surd(h);
      if (!(lhs == rhs)) return {false, "key identity value mismatch"};
    }
  }
  int stride = full ? 5 : 3;
  for (size_t ai = 0; ai < sys.G.size(); ai += size_t(stride)) {
    if (!conditional::conditional_residual(sys, int(ai)).is_zero())
      return {false, "conditional residual nonzero"};
  }
  auto rep = conditional::conditional_bounds_report(sys);
  if (!rep.all_hold) return {false, "conditional bound table violated"};
  return {true, "key identity, residuals, bound tables verified"};
}

inline std::pair<bool, std::string> check_cumulants(bool full) {
  for (auto kind : {PriorKind::rademacher, PriorKind::gaussian}) {
    cumulants::CumulantParams p;
    p.r = 3;
    p.m = 3;
    p.lambda = Rational(2, 3);
    p.prior = kind == PriorKind::rademacher ? PriorSpec::rademacher() : PriorSpec::gaussian();
    cumulants::CumulantTable tab(p);
    int ncap = full ? 6 : 5;
    int dcap = full ? 3 : 2;
    auto graphs = lowdeg::enumerate_multigraphs(ncap, p.r, dcap);
    for (auto& a : graphs) {
      if (a.empty()) continue;
      if (!cumulants::is_good_general(a, p.m)) {
        if (tab.kappa(a) != 0) return {false, "nonvanishing cumulant on a non-good graph"};
      } else {
        if (!tab.envelope_check(a)) return {false, "cumulant envelope violated"};
        if (!cumulants::h_exponent_bound_holds(tab, a)) return {false, "H exponent bound violated"};
        if (!cumulants::delta_bound_holds(p, a)) return {false, "delta(bar) bound violated"};
      }
    }
  }
  return {true, "vanishing + envelopes over enumerated graphs"};
}

inline std::pair<bool, std::string> check_multi_to_simple(bool full) {
  // N^mult_{k,l} <= sum_m N_{k,m} C(l+k-1, l-m), exact integers
  int kmax = full ? 5 : 4;
  for (int r : {2, 3}) {
    for (int k = r; k <= kmax; ++k) {
      int lk = int(std::ceil(double(k - 1) / (r - 1)));
      for (int ell = lk; ell <= lk + 2; ++ell) {
        BigInt lhs = count_connected_multi_hypergraphs(k, ell, r, kmax);
        BigInt rhs = 0;
        for (int m = lk; m <= ell; ++m)
          rhs += count_connected_hypergraphs(k, m, r) * big_binomial(ell + k - 1, ell - m);
        if (lhs > rhs) return {false, "multigraph count bound violated"};
      }
    }
  }
  return {true, "multigraph-to-simple bound holds"};
}

inline std::pair<bool, std::string> check_mmse_monotone(bool) {
  // exact MMSE non-increasing in q1 on a 3-point grid
  auto base = small_params(lowdeg::Model::pds, 4, 2, 2);
  std::vector<Rational> q1s = {Rational(3, 10), Rational(2, 5), Rational(1, 2)};
  Rational prev = 1;
  for (size_t i = 0; i < q1s.size(); ++i) {
    auto p = base;
    p.q1 = q1s[i];
    auto rep = lowdeg::exact_corr(lowdeg::MomentSystem::build(p));
    if (i > 0 && rep.mmse > prev) return {false, "MMSE increased in q1"};
    prev = rep.mmse;
  }
  return {true, "MMSE non-increasing in q1"};
}

inline std::pair<bool, std::string> check_bessel(bool) {
  // random rational coefficient vectors: ||M fhat||^2 <= E[f^2], equality
  // under the full effective support
  auto p = small_params(lowdeg::Model::stpca, 4, 2, 2);
  auto sys = lowdeg::MomentSystem::build(p);
  Rng g(3);
  size_t m = sys.G.size();
  for (int t = 0; t < 3; ++t) {
    std::vector<Rational> fhat(m, 0);
    for (auto& v : fhat) v = Rational(long(g.next_u64() % 9) - 4, 5);
    // E[f^2] via the rescaled Gram; carries the Hermite surd normalizations
    Surd ef2;
    for (size_t i = 0; i < m; ++i)
      for (size_t j = 0; j < m; ++j) {
        if (fhat[i] == 0 || fhat[j] == 0) continue;
        Rational gij = lowdeg::gram_entry_stpca_rescaled(p, sys.G[i], sys.G[j]);
        ef2 += Surd(gij * fhat[i] * fhat[j]) /
               Surd::sqrt_of(Rational(sys.G[i].edge_factorial() * sys.G[j].edge_factorial()));
      }
    // sum over (beta, gamma) of (sum_alpha M fhat)^2 over the effective support
    Surd bessel;
    for (size_t bi = 0; bi < m; ++bi) {
      uint32_t uni = 0;
      for (size_t ai = 0; ai < m; ++ai)
        if (submultigraph_of(sys.G[bi], sys.G[ai]))
          uni |= lowdeg::vset_mask(sys.G[ai].vertices());
      for_each_submask(uni, [&](uint32_t gamma) {
        Surd dot;
        for (size_t ai = 0; ai < m; ++ai) {
          if (fhat[ai] == 0) continue;
          Surd mv = lowdeg::m_entry(p, sys.G[bi], gamma, sys.G[ai]);
          if (mv.is_zero()) continue;
          dot += mv * Surd(fhat[ai]);
        }
        bessel += dot * dot;
      });
    }
    if (!(bessel == ef2)) return {false, "Bessel equality missed under full support"};
  }
  return {true, "Bessel equality holds on random vectors"};
}

inline std::pair<bool, std::string> check_reduction(bool) {
  for (auto model : {lowdeg::Model::pds, lowdeg::Model::stpca}) {
    auto p = small_params(model, 4, 2, 2);
    auto sys = lowdeg::MomentSystem::build(p);
    for (size_t ai = 0; ai < sys.G.size(); ++ai) {
      if (lowdeg::is_good(sys.G[ai])) continue;
      auto red = lowdeg::reduce_to_good(p, sys.G[ai]);
      Surd cs = lowdeg::c_entry(p, red.alpha_star);
      if (!(sys.c[ai] == red.mu * cs)) return {false, "reduction c mismatch"};
      // all good pairs
      for (size_t bi = 0; bi < sys.G.size(); ++bi) {
        if (!lowdeg::is_good(sys.G[bi])) continue;
        uint32_t support = lowdeg::vset_mask(sys.G[bi].vertices()) | 1u;
        bool ok = true;
        for_each_submask(support, [&](uint32_t gamma) {
          Surd lhs = lowdeg::m_entry(p, sys.G[bi], gamma, sys.G[ai]);
          Surd rhs = red.mu * lowdeg::m_entry(p, sys.G[bi], gamma, red.alpha_star);
          if (!(lhs == rhs)) ok = false;
        });
        if (!ok) return {false, "reduction M mismatch"};
      }
    }
  }
  return {true, "reduction to good graphs exact"};
}

}  // namespace detail

inline std::vector<CheckResult> verify_all(bool full) {
  using namespace detail;
  std::vector<CheckResult> out;
  out.push_back(timed("counting-formulas", [&] { return check_counting(full); }));
  out.push_back(timed("class-tables", [&] { return check_class_tables(full); }));
  out.push_back(timed("dp-vs-naive", [&] { return check_dp_oracle(full); }));
  out.push_back(timed("coloring-unbiasedness", [&] { return check_unbiasedness(full); }));
  out.push_back(timed("certificates", [&] { return check_certificates(full); }));
  out.push_back(timed("moment-oracles", [&] { return check_oracle_agreement(full); }));
  out.push_back(timed("corr-duality", [&] { return check_corr_duality(full); }));
  out.push_back(timed("fault-injection", [&] { return check_mutation(full); }));
  out.push_back(timed("conditional-system", [&] { return check_conditional(full); }));
  out.push_back(timed("cumulants", [&] { return check_cumulants(full); }));
  out.push_back(timed("multigraph-counts", [&] { return check_multi_to_simple(full); }));
  out.push_back(timed("mmse-monotonicity", [&] { return check_mmse_monotone(full); }));
  out.push_back(timed("bessel-consistency", [&] { return check_bessel(full); }));
  out.push_back(timed("reduction-lemma", [&] { return check_reduction(full); }));
  return out;
}

}  // namespace verify
}  // namespace hypercc
