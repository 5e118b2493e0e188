#pragma once

// The event-conditioned moment system for the planted dense subhypergraph
// model at exhaustive scale: the sparsity event E, exact c~ and M~, the
// key gamma-sum identity, the component recursion for F, the complexity
// function script-H, and the bound tables (s_alpha, d_alpha envelopes).
//
// Only the planted-edge configurations are enumerated; edges outside K_S
// are conditionally independent of E given theta and integrate analytically.

#include <unordered_map>

#include "lowdeg.hpp"

namespace hypercc {
namespace conditional {

using lowdeg::ExactParams;
using lowdeg::rat_pow;

inline int popcount64(uint64_t x) { return __builtin_popcountll(x); }

struct EventSpec {
  Rational xi, a, delta;  // sparsity slope tau = xi/a + delta
  int D = 1;              // subgraph edge budget

  Rational tau() const { return xi / a + delta; }
  long m_of(long k) const {
    Rational v = tau() * k;
    BigInt num = boost::multiprecision::numerator(v);
    BigInt den = boost::multiprecision::denominator(v);
    return (num / den).convert_to<long>();  // floor for nonnegative v
  }
  bool is_sparse(int edges, int verts) const { return edges <= m_of(verts); }
};

// E(X) for a standalone edge list, no ambient universe needed
inline bool event_holds_on(const std::vector<Edge>& x, const EventSpec& spec,
                           uint64_t budget = 50000000ull) {
  int xe = int(x.size());
  bool ok = true;
  uint64_t steps = 0;
  int picked = 0;
  std::function<void(int, std::map<int, int>&)> rec = [&](int start, std::map<int, int>& vcount) {
    if (!ok) return;
    if (++steps > budget) throw std::length_error("event check: budget exceeded");
    if (picked > 0 && !spec.is_sparse(picked, int(vcount.size()))) {
      ok = false;
      return;
    }
    if (picked == spec.D) return;
    for (int i = start; i < xe; ++i) {
      ++picked;
      for (int v : x[size_t(i)]) vcount[v]++;
      rec(i + 1, vcount);
      for (int v : x[size_t(i)]) {
        if (--vcount[v] == 0) vcount.erase(v);
      }
      --picked;
      if (!ok) return;
    }
  };
  std::map<int, int> vcount;
  rec(0, vcount);
  return ok;
}

// E(X): every edge subset of X with at most D edges induces a sparse graph
class EventChecker {
 public:
  EventChecker(int n, int r, EventSpec spec, uint64_t budget = 50000000ull)
      : spec_(spec), budget_(budget) {
    for_each_subset(n, r, [&](const std::vector<int>& e) { universe_.push_back(e); });
    if (universe_.size() > 63) throw std::length_error("event checker: edge universe too large");
  }

  const std::vector<Edge>& universe() const { return universe_; }

  bool holds(uint64_t xmask) {
    auto it = memo_.find(xmask);
    if (it != memo_.end()) return it->second;
    bool ok = check(xmask);
    memo_[xmask] = ok;
    return ok;
  }

  bool holds_edges(const std::vector<Edge>& edges) {
    uint64_t m = 0;
    for (auto e : edges) {
      std::sort(e.begin(), e.end());
      auto it = std::find(universe_.begin(), universe_.end(), e);
      if (it == universe_.end()) throw std::invalid_argument("event: edge outside universe");
      m |= 1ull << (it - universe_.begin());
    }
    return holds(m);
  }

 private:
  bool check(uint64_t xmask) {
    std::vector<int> xs;
    for (size_t i = 0; i < universe_.size(); ++i)
      if ((xmask >> i) & 1) xs.push_back(int(i));
    int xe = int(xs.size());
    bool ok = true;
    uint64_t steps = 0;
    std::vector<int> pick;
    std::function<void(int, uint32_t)> rec = [&](int start, uint32_t vmask) {
      if (!ok) return;
      if (++steps > budget_) throw std::length_error("event checker: budget exceeded");
      int sz = int(pick.size());
      if (sz > 0 && !spec_.is_sparse(sz, popcount32(vmask))) {
        ok = false;
        return;
      }
      if (sz == spec_.D) return;
      for (int i = start; i < xe; ++i) {
        pick.push_back(xs[i]);
        uint32_t vm = vmask;
        for (int v : universe_[xs[i]]) vm |= 1u << v;
        rec(i + 1, vm);
        pick.pop_back();
        if (!ok) return;
      }
    };
    rec(0, 0);
    return ok;
  }

  EventSpec spec_;
  uint64_t budget_;
  std::vector<Edge> universe_;
  std::unordered_map<uint64_t, bool> memo_;
};

// -------------------------------------------------------------- the system

struct ConditionalSystem {
  ExactParams params;
  EventSpec spec;
  std::vector<MultiHypergraph> G;
  std::map<MultiHypergraph, int> index;

  std::vector<Rational> c_tilde;
  std::vector<Rational> F;      // recursion values
  std::vector<Rational> Kcal;   // F^2 / ((q0(1-q0))^{|a|} (1-rho)^{|V u 0|})
  std::vector<BigInt> Hcomp;    // complexity recursion (2 on connected)
  std::vector<Rational> denom;  // P(E | theta_{V(alpha) u {0}} = 0)
  Rational denom_min = 1;
  Rational p_event_uncond = 0;  // P(E)

  struct ThetaSlice {
    uint32_t smask = 0;        // planted vertex set
    Rational ptheta = 0;       // prior weight
    std::vector<int> ks;       // universe edge ids inside K_S
    std::vector<Rational> mu;  // zeta moments over subsets of ks (local masks)
  };
  std::vector<ThetaSlice> slices;
  std::vector<Edge> universe;
  std::vector<uint64_t> emask;  // per alpha, universe edge mask
  std::vector<uint32_t> vmask;  // per alpha, vertex mask

  std::vector<std::vector<int>> comp_union_ids;  // C_alpha as G-indices (incl. alpha)
};

namespace detail {

inline uint64_t edge_mask_of(const MultiHypergraph& g, const std::vector<Edge>& universe) {
  uint64_t m = 0;
  for (auto& [e, mult] : g.edges) {
    auto it = std::find(universe.begin(), universe.end(), e);
    if (it == universe.end()) throw std::invalid_argument("edge outside universe");
    m |= 1ull << (it - universe.begin());
  }
  return m;
}

// E_theta[ 1_E prod_{e in A}(Y_e - q0) ] for A inside K_S: expansion of the
// product over the zeta moments; zero when some edge of A is outside K_S
inline Rational inside_plain(const ConditionalSystem::ThetaSlice& sl, uint64_t amask,
                             const Rational& q0) {
  std::vector<int> pos;
  for (size_t j = 0; j < sl.ks.size(); ++j)
    if ((amask >> sl.ks[j]) & 1) pos.push_back(int(j));
  if (int(pos.size()) != popcount64(amask)) return 0;
  int t = int(pos.size());
  Rational total = 0;
  for (uint32_t r = 0; r < (1u << t); ++r) {
    uint32_t rmask = 0;
    for (int j = 0; j < t; ++j)
      if ((r >> j) & 1) rmask |= 1u << pos[j];
    total += rat_pow(-q0, t - popcount32(r)) * sl.mu[rmask];
  }
  return total;
}

}  // namespace detail

// H_{beta alpha} = E[1_E 1_{theta_{V(alpha-beta)}=1} (Y-q0)^{alpha-beta}
//                    | theta_{V(beta) u {0}} = 0]
inline Rational h_entry(const ConditionalSystem& sys, int bi, int ai) {
  const auto& p = sys.params;
  MultiHypergraph diff = multigraph_minus(sys.G[ai], sys.G[bi]);
  uint64_t dmask = detail::edge_mask_of(diff, sys.universe);
  uint32_t dverts = lowdeg::vset_mask(diff.vertices());
  uint32_t forbid = sys.vmask[size_t(bi)] | 1u;
  Rational num = 0, pz = 0;
  for (auto& sl : sys.slices) {
    if (sl.smask & forbid) continue;
    pz += sl.ptheta;
    if ((dverts & ~sl.smask) != 0) continue;  // theta_{V(diff)} != 1
    num += sl.ptheta * detail::inside_plain(sl, dmask, p.q0);
  }
  return num / pz;
}

inline ConditionalSystem build_conditional_system(const ExactParams& p, const EventSpec& spec) {
  p.validate();
  if (p.n > 6 || p.D > 3) throw std::length_error("conditional system: n <= 6, D <= 3 only");
  ConditionalSystem sys;
  sys.params = p;
  sys.spec = spec;
  sys.G = lowdeg::enumerate_simple_graphs(p.n, p.r, p.D);
  for (size_t i = 0; i < sys.G.size(); ++i) sys.index[sys.G[i]] = int(i);

  EventChecker ev(p.n, p.r, spec);
  sys.universe = ev.universe();
  int N = int(sys.universe.size());

  for (uint32_t th = 0; th < (1u << p.n); ++th) {
    ConditionalSystem::ThetaSlice sl;
    sl.smask = th;
    sl.ptheta = 1;
    for (int i = 0; i < p.n; ++i) sl.ptheta *= (th & (1u << i)) ? p.rho : (1 - p.rho);
    for (int ei = 0; ei < N; ++ei) {
      bool inside = true;
      for (int v : sys.universe[ei]) inside = inside && ((th >> v) & 1);
      if (inside) sl.ks.push_back(ei);
    }
    int m = int(sl.ks.size());
    sl.mu.assign(1u << m, 0);
    Rational e_theta = 0;
    for (uint32_t w = 0; w < (1u << m); ++w) {
      uint64_t xmask = 0;
      Rational pw = 1;
      for (int j = 0; j < m; ++j) {
        if ((w >> j) & 1) {
          xmask |= 1ull << sl.ks[j];
          pw *= p.q1;
        } else {
          pw *= 1 - p.q1;
        }
      }
      if (ev.holds(xmask)) {
        sl.mu[w] = pw;
        e_theta += pw;
      }
    }
    sys.p_event_uncond += sl.ptheta * e_theta;
    // in-place upper zeta transform: mu[R] = sum_{W >= R} nu(W)
    for (int j = 0; j < m; ++j)
      for (uint32_t w = 0; w < (1u << m); ++w)
        if (!((w >> j) & 1)) sl.mu[w] += sl.mu[w | (1u << j)];
    sys.slices.push_back(std::move(sl));
  }

  size_t m = sys.G.size();
  sys.emask.resize(m);
  sys.vmask.resize(m);
  for (size_t i = 0; i < m; ++i) {
    sys.emask[i] = detail::edge_mask_of(sys.G[i], sys.universe);
    sys.vmask[i] = lowdeg::vset_mask(sys.G[i].vertices());
  }

  // c~
  sys.c_tilde.assign(m, 0);
  for (auto& sl : sys.slices) {
    if (!(sl.smask & 1u)) continue;  // theta_0 = 0 kills the estimand
    for (size_t i = 0; i < m; ++i) {
      if ((sys.vmask[i] & ~sl.smask) != 0) continue;
      sys.c_tilde[i] += sl.ptheta * detail::inside_plain(sl, sys.emask[i], p.q0);
    }
  }

  // denominators
  sys.denom.assign(m, 0);
  for (size_t i = 0; i < m; ++i) {
    uint32_t forbid = sys.vmask[i] | 1u;
    Rational pe = 0, pz = 0;
    for (auto& sl : sys.slices) {
      if (sl.smask & forbid) continue;
      pz += sl.ptheta;
      pe += sl.ptheta * sl.mu[0];  // zeta at the empty set = E_theta[1_E]
    }
    sys.denom[i] = pe / pz;
    if (sys.denom[i] < sys.denom_min) sys.denom_min = sys.denom[i];
  }

  // C_alpha as unions of connected components, vertex-0 membership matching
  sys.comp_union_ids.assign(m, {});
  for (size_t i = 0; i < m; ++i) {
    const auto& alpha = sys.G[i];
    auto groups = alpha.component_edge_groups();
    int w = int(groups.size());
    int zero_comp = -1;
    for (int gi = 0; gi < w; ++gi)
      for (int ei : groups[gi])
        if (std::binary_search(alpha.edges[ei].first.begin(), alpha.edges[ei].first.end(), 0))
          zero_comp = gi;
    bool has0 = alpha.contains_vertex(0);
    for (uint32_t sub = 0; sub < (1u << w); ++sub) {
      if (has0 && !((sub >> zero_comp) & 1)) continue;
      MultiHypergraph beta;
      for (int gi = 0; gi < w; ++gi)
        if ((sub >> gi) & 1)
          for (int ei : groups[gi]) beta.edges.push_back(alpha.edges[ei]);
      std::sort(beta.edges.begin(), beta.edges.end());
      auto it = sys.index.find(beta);
      if (it == sys.index.end()) throw std::logic_error("C_alpha member missing from G");
      sys.comp_union_ids[i].push_back(it->second);
    }
    std::sort(sys.comp_union_ids[i].begin(), sys.comp_union_ids[i].end());
  }

  // F recursion (descends strictly in component count) and the complexity
  sys.F.assign(m, 0);
  sys.Hcomp.assign(m, 0);
  std::vector<char> done(m, 0);
  std::function<void(int)> compute_F = [&](int ai) {
    if (done[ai]) return;
    done[ai] = 1;  // safe: recursion only visits strictly smaller unions
    Rational acc = sys.c_tilde[size_t(ai)];
    BigInt hacc = 2;
    for (int bi : sys.comp_union_ids[size_t(ai)]) {
      if (bi == ai) continue;
      compute_F(bi);
      acc -= h_entry(sys, bi, ai) * sys.F[size_t(bi)];
      hacc += 2 * sys.Hcomp[size_t(bi)];
    }
    if (sys.G[size_t(ai)].empty() || sys.G[size_t(ai)].connected()) hacc = 2;
    sys.F[size_t(ai)] = acc / sys.denom[size_t(ai)];
    sys.Hcomp[size_t(ai)] = hacc;
  };
  for (size_t i = 0; i < m; ++i) compute_F(int(i));

  sys.Kcal.assign(m, 0);
  for (size_t i = 0; i < m; ++i) {
    Rational d = rat_pow(p.q0 * (1 - p.q0), sys.G[i].total_edges()) *
                 rat_pow(1 - p.rho, lowdeg::vertices_with_root(sys.G[i]));
    sys.Kcal[i] = sys.F[i] * sys.F[i] / d;
  }
  return sys;
}

// M~ entry by direct expectation: conditionally on theta, edges outside K_S
// force alpha and beta to agree there; inside K_S the joint moment expands
// over the zeta table of the slice.
inline Surd m_tilde_entry(const ConditionalSystem& sys, const MultiHypergraph& beta,
                          uint32_t gamma, const MultiHypergraph& alpha) {
  const auto& p = sys.params;
  uint64_t am = detail::edge_mask_of(alpha, sys.universe);
  uint64_t bm = detail::edge_mask_of(beta, sys.universe);
  Rational q01 = p.q0 * (1 - p.q0);
  Rational q11 = p.q1 * (1 - p.q1);
  Surd total;
  for (auto& sl : sys.slices) {
    uint64_t ksmask = 0;
    for (int ei : sl.ks) ksmask |= 1ull << ei;
    if (((am ^ bm) & ~ksmask) != 0) continue;  // mismatch outside K_S
    Surd chis(Rational(1));
    uint32_t g = gamma;
    while (g) {
      int v = __builtin_ctz(g);
      g &= g - 1;
      chis *= lowdeg::chi_value(p, (sl.smask >> v) & 1);
    }
    uint64_t amask = am & ksmask;
    uint64_t bmask = bm & ksmask;
    int b_out = popcount64(bm & ~ksmask);
    int b_in = popcount64(bmask);
    std::vector<int> pos;
    std::vector<std::pair<Rational, Rational>> f0d;  // (f(0), f(1) - f(0))
    for (size_t j = 0; j < sl.ks.size(); ++j) {
      uint64_t bit = 1ull << sl.ks[j];
      bool ina = (amask & bit) != 0, inb = (bmask & bit) != 0;
      if (!ina && !inb) continue;
      pos.push_back(int(j));
      Rational v0 = (ina ? -p.q0 : Rational(1)) * (inb ? -p.q1 : Rational(1));
      Rational v1 = (ina ? 1 - p.q0 : Rational(1)) * (inb ? 1 - p.q1 : Rational(1));
      f0d.push_back({v0, v1 - v0});
    }
    int t = int(pos.size());
    Rational val = 0;
    for (uint32_t r = 0; r < (1u << t); ++r) {
      Rational coef = 1;
      uint32_t rmask = 0;
      for (int j = 0; j < t; ++j) {
        if ((r >> j) & 1) {
          coef *= f0d[j].second;
          rmask |= 1u << pos[j];
        } else {
          coef *= f0d[j].first;
        }
      }
      val += coef * sl.mu[rmask];
    }
    Surd term = Surd(sl.ptheta * val) * chis;
    if (b_in) term = term / Surd::sqrt_pow(q11, b_in);
    if (b_out) term *= Surd::sqrt_pow(q01, b_out);
    total += term;
  }
  return total;
}

// key identity LHS: sum_{gamma <= V(beta) u {0}} (-sqrt(rho/(1-rho)))^{|gamma|} M~
inline Surd key_identity_lhs(const ConditionalSystem& sys, int bi, int ai) {
  const auto& p = sys.params;
  Surd minus_s = -Surd::sqrt_of(p.rho / (1 - p.rho));
  uint32_t support = sys.vmask[size_t(bi)] | 1u;
  Surd acc;
  for_each_submask(support, [&](uint32_t gamma) {
    Surd mt = m_tilde_entry(sys, sys.G[size_t(bi)], gamma, sys.G[size_t(ai)]);
    if (mt.is_zero()) return;
    acc += surd_pow(minus_s, popcount32(gamma)) * mt;
  });
  return acc;
}

// conditional certificate u_{beta gamma}
inline Surd conditional_u(const ConditionalSystem& sys, int bi, uint32_t gamma) {
  const auto& p = sys.params;
  Surd minus_s = -Surd::sqrt_of(p.rho / (1 - p.rho));
  Surd v = surd_pow(minus_s, popcount32(gamma));
  v = v / Surd::sqrt_pow(p.q0 * (1 - p.q0), sys.G[size_t(bi)].total_edges());
  v *= Surd(sys.F[size_t(bi)]);
  return v;
}

// residual of M~^T u = c~ at alpha over the support {(beta, gamma <= V(beta) u {0})}
inline Surd conditional_residual(const ConditionalSystem& sys, int ai) {
  Surd acc;
  for (size_t bi = 0; bi < sys.G.size(); ++bi) {
    uint32_t support = sys.vmask[bi] | 1u;
    for_each_submask(support, [&](uint32_t gamma) {
      Surd mt = m_tilde_entry(sys, sys.G[bi], gamma, sys.G[size_t(ai)]);
      if (mt.is_zero()) return;
      acc += mt * conditional_u(sys, int(bi), gamma);
    });
  }
  return acc - Surd(sys.c_tilde[size_t(ai)]);
}

// ------------------------------------------------------------ bound tables

inline Rational s_alpha(const ExactParams& p, const MultiHypergraph& a) {
  return rat_pow(p.rho, int(a.vertices().size())) * rat_pow(2 * p.q1, a.total_edges());
}
inline Rational d_alpha(const ExactParams& p, const EventSpec& spec, const MultiHypergraph& a) {
  long mk = spec.m_of(long(a.vertices().size()));
  return rat_pow(p.rho, int(a.vertices().size())) * rat_pow(Rational(spec.D), mk) *
         rat_pow(p.q0, a.total_edges()) * rat_pow(2 * p.q1 / p.q0, mk);
}

struct BoundRow {
  int alpha = 0;
  bool sparse = true;
  bool c_ok = false, f_ok = false, h_ok = false, sd_ok = true;
  Rational c_abs, c_bound, f_abs, f_bound;
};

struct BoundsReport {
  std::vector<BoundRow> rows;
  bool all_hold = true;
  bool denom_hypothesis = false;  // every denominator >= 1/2 (lemma hypothesis)
  Rational denom_min;
  bool h_vs_w_ok = true;  // Hcomp <= 2 w! 3^w
};

inline BoundsReport conditional_bounds_report(const ConditionalSystem& sys) {
  const auto& p = sys.params;
  BoundsReport rep;
  rep.denom_min = sys.denom_min;
  rep.denom_hypothesis = sys.denom_min >= Rational(1, 2);
  for (size_t i = 0; i < sys.G.size(); ++i) {
    const auto& alpha = sys.G[i];
    BoundRow row;
    row.alpha = int(i);
    row.sparse = sys.spec.is_sparse(alpha.total_edges(), int(alpha.vertices().size()));
    Rational rho_extra = alpha.contains_vertex(0) ? Rational(1) : p.rho;
    Rational sa = s_alpha(p, alpha);
    Rational da = d_alpha(p, sys.spec, alpha);
    row.c_abs = boost::multiprecision::abs(sys.c_tilde[i]);
    row.c_bound = rho_extra * sa;
    row.c_ok = row.c_abs <= row.c_bound;
    if (!row.sparse) row.c_ok = row.c_ok && (row.c_abs <= rho_extra * da);
    row.f_abs = boost::multiprecision::abs(sys.F[i]);
    row.f_bound = Rational(sys.Hcomp[i]) * rho_extra * sa;
    row.f_ok = row.f_abs <= row.f_bound;
    if (!row.sparse) row.f_ok = row.f_ok && (row.f_abs <= Rational(sys.Hcomp[i]) * rho_extra * da);
    row.h_ok = true;
    for (int bi : sys.comp_union_ids[i]) {
      if (bi == int(i)) continue;
      Rational h = boost::multiprecision::abs(h_entry(sys, bi, int(i)));
      MultiHypergraph diff = multigraph_minus(alpha, sys.G[size_t(bi)]);
      if (h > s_alpha(p, diff)) row.h_ok = false;
      bool diff_sparse = sys.spec.is_sparse(diff.total_edges(), int(diff.vertices().size()));
      if (!diff_sparse && h > d_alpha(p, sys.spec, diff)) row.h_ok = false;
    }
    if (row.sparse) row.sd_ok = sa <= da;
    int w = alpha.empty() ? 0 : alpha.component_count();
    if (Rational(sys.Hcomp[i]) > Rational(2 * big_factorial(w) * big_pow(3, w)))
      rep.h_vs_w_ok = false;
    bool f_counts = rep.denom_hypothesis ? row.f_ok : true;
    if (!(row.c_ok && f_counts && row.h_ok && row.sd_ok)) rep.all_hold = false;
    rep.rows.push_back(std::move(row));
  }
  if (!rep.h_vs_w_ok) rep.all_hold = false;
  return rep;
}

// ------------------------------------------------------------- Monte Carlo

struct EventMcReport {
  double p_hat = 0;
  double stderr_hat = 0;
  long trials = 0;
};

// P(E^c | theta_0 = 1) by simulation
inline EventMcReport event_probability_mc(const PdsParams& params, const EventSpec& spec,
                                          long trials, uint64_t seed) {
  params.validate();
  if (trials < 1) throw std::invalid_argument("event_probability_mc: trials >= 1");
  BinomTable bt(params.n + params.r, params.r + 1);
  long bad = 0;
  for (long t = 0; t < trials; ++t) {
    uint64_t s = seed + uint64_t(t) * 7919;
    Signal sig = sample_theta_bernoulli(params.n, params.rho, s);
    sig.theta[0] = 1.0;  // condition on theta_0 = 1
    std::vector<Edge> planted_present;
    for_each_subset(params.n, params.r, [&](const std::vector<int>& e) {
      bool planted = true;
      for (int v : e) planted = planted && (sig.theta[v] == 1.0);
      if (!planted) return;
      uint64_t rank = colex_rank(e, bt);
      Rng g = Rng::substream(s, stream::kEdge, rank);
      if (g.bernoulli(params.q1)) planted_present.push_back(e);
    });
    if (!event_holds_on(planted_present, spec)) ++bad;
  }
  EventMcReport rep;
  rep.trials = trials;
  rep.p_hat = double(bad) / double(trials);
  rep.stderr_hat = std::sqrt(std::max(rep.p_hat * (1 - rep.p_hat), 1e-12) / double(trials));
  return rep;
}

}  // namespace conditional
}  // namespace hypercc
