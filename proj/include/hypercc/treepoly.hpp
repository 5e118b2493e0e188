#pragma once

// Exact tree polynomials at tiny n, strongly balanced patterns, and the
// sparse-regime pattern-counting estimator.

#include <vector>
#include <set>

#include "colorcode.hpp"

namespace hypercc {

// f^{(i)}(Ytilde) = sum over labeled trees of the family rooted at i of the
// edge product; computed as sum over classes of embedding sums / |Aut|.
template <typename Scalar, typename Input>
Scalar full_tree_polynomial(const Input& in, const TreeClassTable& table, int i, int cap = 14) {
  Scalar total(0);
  for (const auto& cls : table.classes) {
    Scalar s = naive_colorful_score<Scalar>(in, nullptr, cls.rep, i, cap);
    total += s / Scalar(Rational(cls.aut));
  }
  return total;
}

template <typename Input>
double full_tree_polynomial_d(const Input& in, const TreeClassTable& table, int i, int cap = 14) {
  double total = 0;
  for (const auto& cls : table.classes) {
    double s = naive_colorful_score<double>(in, nullptr, cls.rep, i, cap);
    total += s / cls.aut.convert_to<double>();
  }
  return total;
}

// every nonempty sub-edge-set beta satisfies
// |beta| / (|V(beta)|-1) <= |alpha| / (|V(alpha)|-1)
inline bool is_strongly_balanced(const MultiHypergraph& alpha, int cap = 14) {
  if (alpha.empty()) throw std::invalid_argument("is_strongly_balanced: empty pattern");
  for (auto& [e, m] : alpha.edges)
    if (m != 1) throw std::invalid_argument("is_strongly_balanced: pattern must be simple");
  int ea = alpha.total_edges();
  if (ea > cap) throw std::length_error("is_strongly_balanced: too many edges");
  long va = long(alpha.vertices().size());
  bool ok = true;
  for_each_submultigraph(alpha, [&](const MultiHypergraph& beta) {
    if (beta.empty() || !ok) return;
    long vb = long(beta.vertices().size());
    long eb = beta.total_edges();
    // eb/(vb-1) <= ea/(va-1)  <=>  eb*(va-1) <= ea*(vb-1)
    if (eb * (va - 1) > long(ea) * (vb - 1)) ok = false;
  });
  return ok;
}

// full (not root-preserving) automorphism count of a small simple pattern
inline BigInt pattern_aut(const MultiHypergraph& alpha) {
  auto vs = alpha.vertices();
  std::set<Edge> eset;
  for (auto& [e, m] : alpha.edges) eset.insert(e);
  std::vector<int> perm(vs.begin(), vs.end());
  std::sort(perm.begin(), perm.end());
  BigInt count = 0;
  std::vector<int> base = perm;
  do {
    std::map<int, int> map;
    for (size_t i = 0; i < base.size(); ++i) map[base[i]] = perm[i];
    bool ok = true;
    for (auto& [e, m] : alpha.edges) {
      Edge img;
      for (int v : e) img.push_back(map[v]);
      std::sort(img.begin(), img.end());
      if (!eset.count(img)) { ok = false; break; }
    }
    if (ok) ++count;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return count;
}

// For each i, the number of copies of the pattern in Y containing vertex i
// (raw 0/1 edges).  Each embedding contributes 1/|Aut| to every vertex of
// its image, so each copy is counted exactly once per covered vertex.
inline std::vector<double> pattern_count_estimator(const Observation& y,
                                                   const MultiHypergraph& pattern,
                                                   uint64_t budget = 200000000ull) {
  if (y.kind != ObsKind::hypergraph)
    throw std::invalid_argument("pattern_count_estimator: hypergraph observations only");
  if (!is_strongly_balanced(pattern))
    throw std::invalid_argument("pattern_count_estimator: pattern must be strongly balanced");
  auto vs = pattern.vertices();
  int pk = int(vs.size());
  std::map<int, int> vidx;
  for (int i = 0; i < pk; ++i) vidx[vs[i]] = i;
  std::vector<Edge> pedges;
  for (auto& [e, m] : pattern.edges) {
    Edge f;
    for (int v : e) f.push_back(vidx[v]);
    std::sort(f.begin(), f.end());
    pedges.push_back(f);
  }
  // order pattern vertices so each new vertex touches an already-placed edge
  // when possible (simple connectivity-driven order for pruning)
  std::vector<int> order;
  std::vector<char> placed(pk, 0);
  order.push_back(0);
  placed[0] = 1;
  while (int(order.size()) < pk) {
    int pick = -1;
    for (auto& e : pedges) {
      bool touches = false;
      for (int v : e) touches = touches || placed[v];
      if (!touches) continue;
      for (int v : e)
        if (!placed[v]) { pick = v; break; }
      if (pick >= 0) break;
    }
    if (pick < 0)
      for (int v = 0; v < pk; ++v)
        if (!placed[v]) { pick = v; break; }
    placed[pick] = 1;
    order.push_back(pick);
  }
  // edges fully determined after position p
  std::vector<std::vector<int>> check_after(pk);
  {
    std::vector<int> pos(pk);
    for (int p = 0; p < pk; ++p) pos[order[p]] = p;
    for (size_t ei = 0; ei < pedges.size(); ++ei) {
      int last = 0;
      for (int v : pedges[ei]) last = std::max(last, pos[v]);
      check_after[last].push_back(int(ei));
    }
  }

  double inv_aut = 1.0 / pattern_aut(pattern).convert_to<double>();
  std::vector<double> out(y.n, 0.0);
  std::vector<int> assign(pk, -1);
  std::vector<char> used(y.n, 0);
  uint64_t visited = 0;

  std::function<void(int)> rec = [&](int p) {
    if (++visited > budget) throw std::length_error("pattern_count_estimator: budget exceeded");
    if (p == pk) {
      for (int v = 0; v < pk; ++v) out[assign[v]] += inv_aut;
      return;
    }
    int pv = order[p];
    for (int cand = 0; cand < y.n; ++cand) {
      if (used[cand]) continue;
      assign[pv] = cand;
      bool ok = true;
      for (int ei : check_after[p]) {
        Edge img;
        for (int v : pedges[ei]) img.push_back(assign[v]);
        std::sort(img.begin(), img.end());
        if (!y.edge_present(img)) { ok = false; break; }
      }
      if (ok) {
        used[cand] = 1;
        rec(p + 1);
        used[cand] = 0;
      }
      assign[pv] = -1;
    }
  };
  rec(0);
  return out;
}

}  // namespace hypercc
