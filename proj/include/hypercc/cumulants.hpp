#pragma once

// Joint cumulants of (x, X^alpha) for tensor PCA with a general product
// prior: the subtraction recursion, goodness classification, the complexity
// recursion, the degree-excess statistic, the moment envelope, and the
// summed correlation bound.

#include <map>

#include "multigraph.hpp"
#include "models.hpp"
#include "lowdeg.hpp"

namespace hypercc {
namespace cumulants {

using lowdeg::rat_pow;

struct CumulantParams {
  int r = 3;        // tensor order
  int m = 2;        // estimand x = prod_{i < m} theta_i
  Rational lambda = 1;
  PriorSpec prior;
};

// alpha with the estimand edge {0..m-1} added
inline MultiHypergraph bar(const MultiHypergraph& alpha, int m) {
  Edge e(m);
  std::iota(e.begin(), e.end(), 0);
  return alpha.plus_edge(e);
}

// good: alpha = 0, or bar(alpha) connected with minimum degree 2
inline bool is_good_general(const MultiHypergraph& alpha, int m) {
  if (alpha.empty()) return true;
  MultiHypergraph b = bar(alpha, m);
  if (!b.connected()) return false;
  for (auto& [v, d] : b.degrees())
    if (d < 2) return false;
  return true;
}

// delta(alpha) = sum of degrees at vertices of degree >= 3
inline long excess_delta(const MultiHypergraph& alpha) {
  long s = 0;
  for (auto& [v, d] : alpha.degrees())
    if (d >= 3) s += d;
  return s;
}

// E[X^beta] = lambda^{|beta|} prod_v E[pi^{deg_beta(v)}]
inline Rational signal_moment(const CumulantParams& p, const MultiHypergraph& beta) {
  Rational val = rat_pow(p.lambda, beta.total_edges());
  for (auto& [v, d] : beta.degrees()) val *= p.prior.moment(d);
  return val;
}

class CumulantTable {
 public:
  explicit CumulantTable(CumulantParams p) : p_(std::move(p)) {}

  const CumulantParams& params() const { return p_; }

  // kappa_alpha = E[x X^alpha] - sum_{beta < alpha} binom(alpha,beta)
  //               E[X^{alpha-beta}] kappa_beta
  Rational kappa(const MultiHypergraph& alpha) {
    auto it = kappa_memo_.find(alpha);
    if (it != kappa_memo_.end()) return it->second;
    // E[x X^alpha] = lambda^{|alpha|} prod_v E[pi^{deg_{bar alpha}(v)}]
    // (the estimand edge adds degrees but no lambda factor)
    Rational acc = rat_pow(p_.lambda, alpha.total_edges());
    for (auto& [v, d] : bar(alpha, p_.m).degrees()) acc *= p_.prior.moment(d);
    for_each_submultigraph(alpha, [&](const MultiHypergraph& beta) {
      if (beta == alpha) return;
      Rational kb = kappa(beta);
      if (kb == 0) return;
      acc -= Rational(multigraph_binomial(alpha, beta)) *
             signal_moment(p_, multigraph_minus(alpha, beta)) * kb;
    });
    kappa_memo_[alpha] = acc;
    return acc;
  }

  // script-H recursion: H(alpha) = sum_{beta < alpha good} binom(alpha,beta)
  // H(beta), H(0) = 1
  BigInt complexity_H(const MultiHypergraph& alpha) {
    if (alpha.empty()) return 1;
    auto it = h_memo_.find(alpha);
    if (it != h_memo_.end()) return it->second;
    BigInt acc = 0;
    for_each_submultigraph(alpha, [&](const MultiHypergraph& beta) {
      if (beta == alpha) return;
      if (!is_good_general(beta, p_.m)) return;
      acc += multigraph_binomial(alpha, beta) * complexity_H(beta);
    });
    h_memo_[alpha] = acc;
    return acc;
  }

  // independent evaluation of the same recursion: sum over strictly
  // increasing chains 0 = b_0 < b_1 < ... < b_t = alpha of good subgraphs,
  // weighting consecutive binomials
  BigInt complexity_H_chain_sum(const MultiHypergraph& alpha) {
    if (alpha.empty()) return 1;
    BigInt total = 0;
    for_each_submultigraph(alpha, [&](const MultiHypergraph& beta) {
      if (beta == alpha) return;
      if (!is_good_general(beta, p_.m)) return;
      total += multigraph_binomial(alpha, beta) * complexity_H_chain_sum(beta);
    });
    return total;  // no memo: independent recomputation path
  }

  // M(t) = max_{s <= t} E[|pi|^s], as a rational enclosure
  std::pair<Rational, Rational> envelope_M(long t) const {
    Rational lo = 1, hi = 1;
    for (long s = 1; s <= t; ++s) {
      auto [l, h] = p_.prior.abs_moment_bounds(int(s));
      if (l > lo) lo = l;
      if (h > hi) hi = h;
    }
    return {lo, hi};
  }

  // Lemma-style envelope: |kappa_alpha| <= lambda^{|alpha|} M(delta(bar))
  // H(alpha); checked against the conservative (lower) end of M
  bool envelope_check(const MultiHypergraph& alpha) {
    if (!is_good_general(alpha, p_.m))
      throw std::domain_error("envelope_check: alpha must be good");
    Rational lhs = boost::multiprecision::abs(kappa(alpha));
    long d = excess_delta(bar(alpha, p_.m));
    auto [mlo, mhi] = envelope_M(d);
    Rational rhs = rat_pow(p_.lambda, alpha.total_edges()) * mlo * Rational(complexity_H(alpha));
    if (lhs <= rhs) return true;
    // retry against the upper end: if it passes only there, the check is
    // inconclusive at this enclosure width; treat as failure
    return false;
  }

 private:
  CumulantParams p_;
  std::map<MultiHypergraph, Rational> kappa_memo_;
  std::map<MultiHypergraph, BigInt> h_memo_;
};

// ----------------------------------------------------- summed Corr bound

struct CorrBoundReport {
  Rational bound = 0;   // sum over good alpha of kappa^2 / alpha!
  long contributing = 0;
  long enumerated = 0;
};

inline CorrBoundReport cumulant_corr_bound(int n, const CumulantParams& p, int D,
                                           long cap = 500000) {
  if (D > 3 || n > 8) throw std::length_error("cumulant_corr_bound: D <= 3, n <= 8 only");
  auto graphs = lowdeg::enumerate_multigraphs(n, p.r, D, cap);
  CumulantTable table(p);
  CorrBoundReport rep;
  rep.enumerated = long(graphs.size());
  for (auto& alpha : graphs) {
    if (alpha.empty()) continue;  // kappa_0 = E[x] = 0 for centered priors
    if (!is_good_general(alpha, p.m)) continue;
    Rational k = table.kappa(alpha);
    if (k == 0) continue;
    rep.bound += k * k / Rational(alpha.edge_factorial());
    ++rep.contributing;
  }
  return rep;
}

// upper bound on the goodness exponent: H(alpha) <= (2|alpha|)^{r|a|-2|V|+m}
inline bool h_exponent_bound_holds(CumulantTable& table, const MultiHypergraph& alpha) {
  const auto& p = table.params();
  if (alpha.empty()) return true;
  long expn = long(p.r) * alpha.total_edges() - 2 * long(alpha.vertices().size()) + p.m;
  if (expn < 0) return false;  // goodness implies r|a| + m >= 2|V|
  Rational rhs = rat_pow(Rational(2 * alpha.total_edges()), expn);
  return Rational(table.complexity_H(alpha)) <= rhs;
}

// delta(bar alpha) <= 3 (r|alpha| - 2|V(alpha)| + m) for good alpha
inline bool delta_bound_holds(const CumulantParams& p, const MultiHypergraph& alpha) {
  if (alpha.empty()) return true;
  long lhs = excess_delta(bar(alpha, p.m));
  long rhs = 3 * (long(p.r) * alpha.total_edges() - 2 * long(alpha.vertices().size()) + p.m);
  return lhs <= rhs;
}

}  // namespace cumulants
}  // namespace hypercc
