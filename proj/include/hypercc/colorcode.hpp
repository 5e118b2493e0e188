#pragma once

// Color-coded tree scoring: the vertex/edge dynamic program over the
// bipartite incidence tree, a naive embedding-sum oracle, score aggregation
// over colorings and tree classes, preprocessing, and top-|S| selection.
//
// Color sets are k-bit masks.  A vertex-node table A_v(i, Q) is nonzero only
// when c(i) is in Q, which makes every vertex-collision term in the edge
// recursion vanish; the two-valued (standardized hypergraph) fast path
// exploits this to split the edge sum into a rank-one background part plus
// sparse corrections on present edges.

#include <vector>
#include <thread>
#include <atomic>
#include <chrono>
#include <cmath>

#include "models.hpp"
#include "hypertree.hpp"

namespace hypercc {

// ------------------------------------------------------------------- inputs

// Standardized two-valued hypergraph: value w1 on present edges, w0 on
// absent ones (both defined on distinct sorted r-subsets).
struct StdHypergraph {
  const Observation* obs = nullptr;
  double w0 = 0, w1 = 0;
  int n = 0, r = 2;
  static constexpr bool two_valued = true;
  double value(const std::vector<int>& sorted) const {
    return obs->bits[obs->subset_rank(sorted)] ? w1 : w0;
  }
};

// Generic dense input over distinct sorted r-subsets.
template <typename Scalar>
struct DenseSubsets {
  int n = 0, r = 2;
  BinomTable bt;
  std::vector<Scalar> vals;
  static constexpr bool two_valued = false;

  static DenseSubsets zeros(int n, int r) {
    DenseSubsets d;
    d.n = n;
    d.r = r;
    d.bt = BinomTable(n + r, r + 1);
    d.vals.assign(d.bt(n, r), Scalar(0));
    return d;
  }
  // tensor observations: values at distinct multisets are subset values
  static DenseSubsets from_tensor(const Observation& o) {
    DenseSubsets d = zeros(o.n, o.r);
    for_each_subset(o.n, o.r, [&](const std::vector<int>& e) {
      d.vals[colex_rank(e, d.bt)] = Scalar(o.tensor_value(e));
    });
    return d;
  }
  static DenseSubsets from_std_hypergraph(const Observation& o, Scalar w0, Scalar w1) {
    DenseSubsets d = zeros(o.n, o.r);
    for_each_subset(o.n, o.r, [&](const std::vector<int>& e) {
      d.vals[colex_rank(e, d.bt)] = o.edge_present(e) ? w1 : w0;
    });
    return d;
  }
  Scalar& at(const std::vector<int>& sorted) { return vals[colex_rank(sorted, bt)]; }
  Scalar value(const std::vector<int>& sorted) const { return vals[colex_rank(sorted, bt)]; }
};

using Coloring = std::vector<int>;  // vertex -> color in [0,k)

inline Coloring sample_coloring(int n, int k, uint64_t seed, uint64_t index) {
  Rng g = Rng::substream(seed, stream::kColoring, index);
  Coloring c(n);
  for (int i = 0; i < n; ++i) c[i] = int(g.next_u64() % uint64_t(k));
  return c;
}

// ------------------------------------------------------------------ DP core

namespace dpdetail {

struct MaskLists {
  int k;
  std::vector<std::vector<uint32_t>> by_pc;  // popcount -> masks
  // by color and popcount: masks containing that color
  std::vector<std::vector<std::vector<uint32_t>>> by_color_pc;
  explicit MaskLists(int k) : k(k) {
    by_pc.assign(k + 1, {});
    for (uint32_t m = 0; m < (1u << k); ++m) by_pc[popcount32(m)].push_back(m);
    by_color_pc.assign(k, std::vector<std::vector<uint32_t>>(k + 1));
    for (int c = 0; c < k; ++c)
      for (int p = 1; p <= k; ++p)
        for (uint32_t m : by_pc[p])
          if (m & (1u << c)) by_color_pc[c][p].push_back(m);
  }
};

}  // namespace dpdetail

template <typename Scalar>
class TreeScorer {
 public:
  // in: any input with .n, .r, .value(sorted r-subset); H rooted, k = |V(H)|
  template <typename Input>
  static std::vector<Scalar> score(const Input& in, const Coloring& coloring,
                                   const RootedHypertree& H) {
    TreeScorer s(in.n, H);
    for (int v : coloring)
      if (v < 0 || v >= s.k_) throw std::domain_error("coloring color out of range");
    if (int(coloring.size()) != in.n) throw std::domain_error("coloring size != n");
    s.run(in, coloring);
    return std::move(s.root_out_);
  }

 private:
  TreeScorer(int n, const RootedHypertree& H)
      : n_(n), k_(H.k), tree_(incidence_tree(H)), masks_(H.k) {
    if (k_ > 22) throw std::length_error("tree scorer: k too large for mask tables");
    tables_.resize(tree_.nodes.size());
  }

  size_t idx(int i, uint32_t mask) const { return size_t(i) * (1u << k_) + mask; }

  template <typename Input>
  void run(const Input& in, const Coloring& c) {
    compute_node(in, c, tree_.root);
    const auto& root_tab = tables_[tree_.root];
    uint32_t full = (1u << k_) - 1;
    root_out_.resize(n_);
    for (int i = 0; i < n_; ++i) root_out_[i] = root_tab[idx(i, full)];
  }

  template <typename Input>
  void compute_node(const Input& in, const Coloring& c, int node) {
    const IncNode& nd = tree_.nodes[node];
    for (int ch : nd.children) compute_node(in, c, ch);
    if (!nd.is_edge) compute_vertex_node(c, node);
    else compute_edge_node(in, c, node);
    for (int ch : nd.children) {  // child tables are dead now
      tables_[ch].clear();
      tables_[ch].shrink_to_fit();
    }
  }

  void compute_vertex_node(const Coloring& c, int node) {
    const IncNode& nd = tree_.nodes[node];
    auto& tab = tables_[node];
    tab.assign(size_t(n_) * (1u << k_), Scalar(0));
    if (nd.children.empty()) {
      for (int i = 0; i < n_; ++i) tab[idx(i, 1u << c[i])] = Scalar(1);
      return;
    }
    // h-chain of subset convolutions over child edge tables
    std::vector<Scalar> h(size_t(n_) * (1u << k_), Scalar(0));
    for (int i = 0; i < n_; ++i) h[idx(i, 0)] = Scalar(1);
    int pc_acc = 0;
    for (int ch : nd.children) {
      int s = tree_.nodes[ch].vtx_count;
      const auto& btab = tables_[ch];
      std::vector<Scalar> next(size_t(n_) * (1u << k_), Scalar(0));
      const auto& prev_masks = masks_.by_pc[pc_acc];
      const auto& add_masks = masks_.by_pc[s];
      for (int i = 0; i < n_; ++i) {
        size_t base = size_t(i) * (1u << k_);
        for (uint32_t mp : prev_masks) {
          const Scalar& hv = h[base + mp];
          if (hv == Scalar(0)) continue;
          for (uint32_t ma : add_masks) {
            if (ma & mp) continue;
            const Scalar& bv = btab[base + ma];
            if (bv == Scalar(0)) continue;
            next[base + (mp | ma)] += hv * bv;
          }
        }
      }
      h.swap(next);
      pc_acc += s;
    }
    // A_v(i, Q) = [c(i) in Q] h(i, Q \ {c(i)}), |Q| = vtx_count
    for (int i = 0; i < n_; ++i) {
      uint32_t cb = 1u << c[i];
      size_t base = size_t(i) * (1u << k_);
      for (uint32_t q : masks_.by_color_pc[c[i]][nd.vtx_count])
        tab[base + q] = h[base + (q & ~cb)];
    }
  }

  template <typename Input>
  void compute_edge_node(const Input& in, const Coloring& c, int node) {
    const IncNode& nd = tree_.nodes[node];
    auto& tab = tables_[node];
    tab.assign(size_t(n_) * (1u << k_), Scalar(0));
    const int slots = int(nd.children.size());

    if constexpr (Input::two_valued) {
      edge_node_two_valued(in, c, node);
    } else {
      // reference path: iterate (r-1)-subsets and their slot assignments
      std::vector<int> tuple;
      std::vector<int> edge_sorted(slots + 1);
      std::vector<std::pair<uint32_t, Scalar>> cur, nxt;
      for (int i = 0; i < n_; ++i) {
        size_t base = size_t(i) * (1u << k_);
        for_each_subset(n_ - 1, slots, [&](const std::vector<int>& uraw) {
          // map {0..n-2} -> [n] \ {i}
          std::vector<int> u(uraw);
          for (auto& v : u)
            if (v >= i) ++v;
          std::vector<int> e = u;
          e.push_back(i);
          std::sort(e.begin(), e.end());
          Scalar w = in.value(e);
          if (w == Scalar(0)) return;
          std::sort(u.begin(), u.end());
          do {
            cur.assign(1, {0u, Scalar(1)});
            for (int j = 0; j < slots; ++j) {
              int ch = nd.children[j];
              int s = tree_.nodes[ch].vtx_count;
              const auto& atab = tables_[ch];
              size_t abase = size_t(u[j]) * (1u << k_);
              nxt.clear();
              for (auto& [m, v] : cur)
                for (uint32_t ma : masks_.by_color_pc[c[u[j]]][s]) {
                  if (ma & m) continue;
                  const Scalar& av = atab[abase + ma];
                  if (av == Scalar(0)) continue;
                  nxt.push_back({m | ma, v * av});
                }
              cur.swap(nxt);
              if (cur.empty()) break;
            }
            for (auto& [m, v] : cur) tab[base + m] += w * v;
          } while (std::next_permutation(u.begin(), u.end()));
        });
      }
      apply_gate(c, node);
    }
  }

  template <typename Input>
  void edge_node_two_valued(const Input& in, const Coloring& c, int node) {
    const IncNode& nd = tree_.nodes[node];
    auto& tab = tables_[node];
    const int slots = int(nd.children.size());
    const double w0 = in.w0, dw = in.w1 - in.w0;

    // nonzero (mask, value) lists per child slot and vertex; also the
    // per-slot vertex sums S_j(Q)
    std::vector<std::vector<std::pair<uint32_t, Scalar>>> nz(size_t(slots) * n_);
    std::vector<std::vector<Scalar>> svec(slots);
    for (int j = 0; j < slots; ++j) {
      int ch = nd.children[j];
      const auto& atab = tables_[ch];
      svec[j].assign(1u << k_, Scalar(0));
      int s = tree_.nodes[ch].vtx_count;
      for (int u = 0; u < n_; ++u) {
        size_t abase = size_t(u) * (1u << k_);
        auto& lst = nz[size_t(j) * n_ + u];
        for (uint32_t m : masks_.by_color_pc[c[u]][s]) {
          const Scalar& av = atab[abase + m];
          if (av == Scalar(0)) continue;
          svec[j][m] += av;
          lst.push_back({m, av});
        }
      }
    }

    // background: w0 * convolution of the S_j; vertex collisions contribute
    // zero because the A tables force disjoint colors
    std::vector<Scalar> conv(1u << k_, Scalar(0));
    conv[0] = Scalar(1);
    int pc_acc = 0;
    for (int j = 0; j < slots; ++j) {
      int s = tree_.nodes[nd.children[j]].vtx_count;
      std::vector<Scalar> next(1u << k_, Scalar(0));
      for (uint32_t mp : masks_.by_pc[pc_acc]) {
        if (conv[mp] == Scalar(0)) continue;
        for (uint32_t ma : masks_.by_pc[s]) {
          if (ma & mp) continue;
          next[mp | ma] += conv[mp] * svec[j][ma];
        }
      }
      conv.swap(next);
      pc_acc += s;
    }
    for (int i = 0; i < n_; ++i) {
      size_t base = size_t(i) * (1u << k_);
      for (uint32_t m : masks_.by_pc[pc_acc]) tab[base + m] = Scalar(w0) * conv[m];
    }

    // sparse corrections on present edges; edges with at most one non-leaf
    // child collapse the slot-assignment loop into a multiplicity factor
    int nonleaf = -1, nonleaf_count = 0;
    for (int j = 0; j < slots; ++j)
      if (tree_.nodes[nd.children[j]].vtx_count > 1) {
        nonleaf = j;
        ++nonleaf_count;
      }
    const Scalar leaf_perms(double(big_factorial(slots - nonleaf_count).convert_to<double>()));

    std::vector<std::pair<uint32_t, Scalar>> cur, nxt;
    cur.reserve(256);
    nxt.reserve(256);
    std::vector<int> u(slots);
    for_each_subset(in.n, in.r, [&](const std::vector<int>& e) {
      if (!in.obs->bits[in.obs->subset_rank(e)]) return;
      for (int pi = 0; pi < int(e.size()); ++pi) {
        int i = e[pi];
        size_t base = size_t(i) * (1u << k_);
        int t = 0;
        for (int j = 0; j < int(e.size()); ++j)
          if (j != pi) u[t++] = e[j];
        if (nonleaf_count == 0) {
          // all-leaf edge: one update if the sibling colors are distinct
          uint32_t leafmask = 0;
          int pc = 0;
          for (int j = 0; j < slots; ++j) {
            leafmask |= 1u << c[u[j]];
            ++pc;
          }
          if (popcount32(leafmask) == pc) tab[base + leafmask] += Scalar(dw) * leaf_perms;
          continue;
        }
        if (nonleaf_count == 1) {
          // each sibling takes the non-leaf slot in turn, the rest fill the
          // leaf slots in any of (slots-1)! interchangeable orders
          for (int pick = 0; pick < slots; ++pick) {
            uint32_t leafmask = 0;
            bool ok = true;
            for (int j = 0; j < slots; ++j) {
              if (j == pick) continue;
              uint32_t b = 1u << c[u[j]];
              if (leafmask & b) { ok = false; break; }
              leafmask |= b;
            }
            if (!ok) continue;
            for (auto& [ma, av] : nz[size_t(nonleaf) * n_ + u[pick]]) {
              if (ma & leafmask) continue;
              tab[base + (ma | leafmask)] += Scalar(dw) * leaf_perms * av;
            }
          }
          continue;
        }
        // general: iterate slot assignments
        std::sort(u.begin(), u.end());
        do {
          cur.assign(1, {0u, Scalar(1)});
          for (int j = 0; j < slots && !cur.empty(); ++j) {
            nxt.clear();
            for (auto& [m, v] : cur)
              for (auto& [ma, av] : nz[size_t(j) * n_ + u[j]]) {
                if (ma & m) continue;
                nxt.push_back({m | ma, v * av});
              }
            cur.swap(nxt);
          }
          for (auto& [m, v] : cur) tab[base + m] += Scalar(dw) * v;
        } while (std::next_permutation(u.begin(), u.end()));
      }
    });
    apply_gate(c, node);
  }

  void apply_gate(const Coloring& c, int node) {  // zero masks containing c(i)
    const IncNode& nd = tree_.nodes[node];
    auto& tab = tables_[node];
    for (int i = 0; i < n_; ++i) {
      size_t base = size_t(i) * (1u << k_);
      for (uint32_t m : masks_.by_color_pc[c[i]][nd.vtx_count]) tab[base + m] = Scalar(0);
    }
  }

  int n_, k_;
  IncidenceTree tree_;
  dpdetail::MaskLists masks_;
  std::vector<std::vector<Scalar>> tables_;
  std::vector<Scalar> root_out_;
};

template <typename Scalar, typename Input>
std::vector<Scalar> color_coded_score(const Input& in, const Coloring& coloring,
                                      const RootedHypertree& H) {
  return TreeScorer<Scalar>::score(in, coloring, H);
}

// --------------------------------------------------------------naive oracle

// Direct sum over injective embeddings phi: V(H) -> [n], phi(root) = i, of
// prod_e Ytilde_{phi(e)}, restricted to embeddings colorful under c.  With
// |V(H)| = k colors, colorful means bijective onto [k].
template <typename Scalar, typename Input>
Scalar naive_colorful_score(const Input& in, const Coloring* coloring,
                            const RootedHypertree& H, int i, int cap = 14) {
  if (in.n > cap) throw std::length_error("naive_colorful_score: n exceeds cap");
  IncidenceTree tree = incidence_tree(H);
  std::vector<int> assign(H.k, -1);
  std::vector<char> used(in.n, 0);
  std::vector<char> used_color(H.k, 0);
  Scalar total(0);

  // flatten edge-nodes in DFS order; assign their child vertex-nodes
  std::vector<int> edge_nodes;
  std::function<void(int)> collect = [&](int node) {
    if (tree.nodes[node].is_edge) edge_nodes.push_back(node);
    for (int ch : tree.nodes[node].children) collect(ch);
  };
  collect(tree.root);

  std::function<void(size_t, Scalar)> rec = [&](size_t eidx, Scalar acc) {
    if (eidx == edge_nodes.size()) {
      total += acc;
      return;
    }
    const IncNode& en = tree.nodes[edge_nodes[eidx]];
    const Edge& edge = H.edges[en.id];
    // child vertex-nodes to assign
    std::vector<int> child_vertices;
    for (int ch : en.children) child_vertices.push_back(tree.nodes[ch].id);
    // iterate assignments of distinct unused vertices to the children
    std::function<void(size_t)> assign_child = [&](size_t ci) {
      if (ci == child_vertices.size()) {
        std::vector<int> img;
        for (int v : edge) img.push_back(assign[v]);
        std::sort(img.begin(), img.end());
        Scalar w = in.value(img);
        if (w != Scalar(0)) rec(eidx + 1, acc * w);
        return;
      }
      int hv = child_vertices[ci];
      for (int cand = 0; cand < in.n; ++cand) {
        if (used[cand]) continue;
        if (coloring && used_color[(*coloring)[cand]]) continue;
        assign[hv] = cand;
        used[cand] = 1;
        if (coloring) used_color[(*coloring)[cand]] = 1;
        assign_child(ci + 1);
        used[cand] = 0;
        if (coloring) used_color[(*coloring)[cand]] = 0;
        assign[hv] = -1;
      }
    };
    assign_child(0);
  };

  assign[H.root] = i;
  used[i] = 1;
  if (coloring) used_color[(*coloring)[i]] = 1;
  rec(0, Scalar(1));
  return total;
}

// ------------------------------------------------------------- aggregation

struct ScoreVector {
  std::vector<double> z;
  int ell = 0, k = 0;
  long t = 0;
  double lambda_star = 0;
  uint64_t seed = 0;
  bool preprocessed = false;
  double secs_preprocess = 0, secs_dp = 0;
};

struct RecoveryConfig {
  double eps = 0.2;
  int ell_override = -1;
  long t_override = -1;
  uint64_t seed = 1;
  bool disable_preprocessing = false;
  long t_cap = 4000;   // hard cap on coloring trials
  int k_cap = 16;      // hard cap on color count (mask width)
  int workers = 0;     // 0: hardware_concurrency
};

inline int default_ell(double eps, double rho, int r, int k_cap) {
  int ell_paper = int(std::ceil((4.0 / eps) * std::log(1.0 / std::max(rho, 1e-12))));
  int ell_mem = std::max(0, ((k_cap - 1) / (r - 1) - 2) / 2);
  return std::max(0, std::min(ell_paper, ell_mem));
}

inline long default_trials(int k, int n, long t_cap) {
  double logq = 0;  // log(k^k / k!)
  for (int j = 1; j <= k; ++j) logq += std::log(double(k)) - std::log(double(j));
  double logt = logq + std::log(std::log(std::max(n, 3)));
  if (logt > std::log(double(t_cap))) return t_cap;
  return std::max(1L, long(std::ceil(std::exp(logt))));
}

// z = sum_s sum_H A_H(s) / |Aut(H)|, reduced in fixed (s, class) order
template <typename Input>
ScoreVector aggregate_scores(const Input& in, const TreeClassTable& table, long t, uint64_t seed,
                             int workers = 0) {
  int n = in.n;
  int k = table.total_vertices();
  ScoreVector out;
  out.z.assign(n, 0.0);
  out.ell = table.ell;
  out.k = k;
  out.t = t;
  out.seed = seed;
  auto start = std::chrono::steady_clock::now();

  std::vector<std::vector<double>> per_trial;
  per_trial.resize(size_t(t));
  std::atomic<long> next(0);
  int nw = workers > 0 ? workers : int(std::thread::hardware_concurrency());
  nw = std::max(1, int(std::min<long>(nw, t)));
  auto work = [&]() {
    while (true) {
      long s = next.fetch_add(1);
      if (s >= t) break;
      Coloring c = sample_coloring(n, k, seed, uint64_t(s));
      std::vector<double> acc(n, 0.0);
      for (size_t hi = 0; hi < table.classes.size(); ++hi) {
        auto a = color_coded_score<double>(in, c, table.classes[hi].rep);
        double inv_aut = 1.0 / table.classes[hi].aut.convert_to<double>();
        for (int i = 0; i < n; ++i) acc[i] += a[i] * inv_aut;
      }
      per_trial[size_t(s)] = std::move(acc);
    }
  };
  std::vector<std::thread> threads;
  for (int w = 0; w < nw; ++w) threads.emplace_back(work);
  for (auto& th : threads) th.join();
  for (long s = 0; s < t; ++s)
    for (int i = 0; i < n; ++i) out.z[i] += per_trial[size_t(s)][i];

  out.secs_dp = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

// ------------------------------------------------------------ preprocessing

struct PreprocessResult {
  Observation ystar;
  double lambda_star = 0;
  bool applied = false;  // false: p > 1 (or lambda = 0), step skipped
};

inline double lambda_star_target(int n, int r, double rho, double eps) {
  return std::sqrt(factorial_d(r - 2) * (1 + eps) /
                   (kE * std::pow(double(n), r - 1) * std::pow(rho, 2 * r - 2)));
}

inline PreprocessResult preprocess_pds(const Observation& y, const PdsParams& p, double eps,
                                       uint64_t seed) {
  p.validate();
  PreprocessResult res{y, 0.0, false};
  double lam = p.lambda();
  double ls = lambda_star_target(p.n, p.r, p.rho, eps);
  if (lam <= 0 || ls >= lam) {
    res.lambda_star = lam;  // p > 1: recorded and skipped
    return res;
  }
  double keep = ls / lam;
  for (uint64_t rank = 0; rank < y.bits.size(); ++rank) {
    Rng g = Rng::substream(seed, stream::kPreprocess, rank);
    if (!g.bernoulli(keep)) res.ystar.bits[rank] = g.bernoulli(p.q0) ? 1 : 0;
  }
  res.lambda_star = ls;
  res.applied = true;
  return res;
}

inline StdHypergraph standardize_pds(const Observation& ystar, const PdsParams& p) {
  StdHypergraph s;
  s.obs = &ystar;
  s.n = p.n;
  s.r = p.r;
  double sd = std::sqrt(p.q0 * (1 - p.q0));
  s.w0 = (0 - p.q0) / sd;
  s.w1 = (1 - p.q0) / sd;
  return s;
}

inline PreprocessResult preprocess_tpca(const Observation& y, const TpcaParams& p, double eps,
                                        uint64_t seed) {
  p.validate();
  PreprocessResult res{y, 0.0, false};
  double rho = p.rho();
  double ls = lambda_star_target(p.n, p.r, rho, eps);
  if (p.lambda <= 0 || ls >= p.lambda) {
    res.lambda_star = p.lambda;
    return res;
  }
  double keep = ls / p.lambda;
  double mixing = std::sqrt(1 - keep * keep);
  std::vector<int> e(p.r);
  for (uint64_t rank = 0; rank < y.vals.size(); ++rank) {
    Rng g = Rng::substream(seed, stream::kFreshNoise, rank);
    double sd = 1.0;
    if (p.noise_mode == NoiseMode::symmetrized) {
      colex_unrank(rank, p.r, e, y.bt);
      for (int j = p.r - 1; j >= 0; --j) e[j] -= j;  // multiset from subset map
      sd = std::sqrt(multiplicity_factorial(e).convert_to<double>());
    }
    res.ystar.vals[rank] = keep * y.vals[rank] + mixing * sd * g.normal();
  }
  res.lambda_star = ls;
  res.applied = true;
  return res;
}

// --------------------------------------------------------------- selection

// the floor(n rho) largest entries, ties broken by largest index
inline std::vector<int> select_top(const std::vector<double>& z, int count) {
  std::vector<int> idx(z.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    if (z[a] != z[b]) return z[a] > z[b];
    return a > b;
  });
  count = std::max(0, std::min<int>(count, int(z.size())));
  std::vector<int> out(idx.begin(), idx.begin() + count);
  std::sort(out.begin(), out.end());
  return out;
}

struct RecoveryResult {
  std::vector<int> s_hat;
  ScoreVector score;
};

inline RecoveryResult recover_pds(const Observation& y, const PdsParams& p,
                                  const RecoveryConfig& cfg) {
  p.validate();
  auto t0 = std::chrono::steady_clock::now();
  PreprocessResult pre;
  if (cfg.disable_preprocessing) {
    pre.ystar = y;
    pre.lambda_star = p.lambda();
    pre.applied = false;
  } else {
    pre = preprocess_pds(y, p, cfg.eps, cfg.seed);
  }
  double secs_pre = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  int ell = cfg.ell_override >= 0 ? cfg.ell_override : default_ell(cfg.eps, p.rho, p.r, cfg.k_cap);
  int k = (p.r - 1) * (2 * ell + 2) + 1;
  if (k > cfg.k_cap) throw std::length_error("recover: k exceeds mask budget; lower ell");
  TreeClassTable table = build_class_table(ell, p.r);
  long t = cfg.t_override >= 1 ? cfg.t_override : default_trials(k, p.n, cfg.t_cap);

  StdHypergraph in = standardize_pds(pre.ystar, p);
  ScoreVector score = aggregate_scores(in, table, t, cfg.seed, cfg.workers);
  score.lambda_star = pre.lambda_star;
  score.preprocessed = pre.applied;
  score.secs_preprocess = secs_pre;

  RecoveryResult res;
  res.s_hat = select_top(score.z, int(std::floor(p.n * p.rho)));
  res.score = std::move(score);
  return res;
}

inline RecoveryResult recover_stpca(const Observation& y, const TpcaParams& p,
                                    const RecoveryConfig& cfg) {
  p.validate();
  auto t0 = std::chrono::steady_clock::now();
  PreprocessResult pre;
  if (cfg.disable_preprocessing) {
    pre.ystar = y;
    pre.lambda_star = p.lambda;
    pre.applied = false;
  } else {
    pre = preprocess_tpca(y, p, cfg.eps, cfg.seed);
  }
  double secs_pre = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  double rho = p.rho();
  int ell = cfg.ell_override >= 0 ? cfg.ell_override : default_ell(cfg.eps, rho, p.r, cfg.k_cap);
  int k = (p.r - 1) * (2 * ell + 2) + 1;
  if (k > cfg.k_cap) throw std::length_error("recover: k exceeds mask budget; lower ell");
  TreeClassTable table = build_class_table(ell, p.r);
  long t = cfg.t_override >= 1 ? cfg.t_override : default_trials(k, p.n, cfg.t_cap);

  auto in = DenseSubsets<double>::from_tensor(pre.ystar);
  ScoreVector score = aggregate_scores(in, table, t, cfg.seed, cfg.workers);
  score.lambda_star = pre.lambda_star;
  score.preprocessed = pre.applied;
  score.secs_preprocess = secs_pre;

  RecoveryResult res;
  res.s_hat = select_top(score.z, int(std::floor(p.n * rho)));
  res.score = std::move(score);
  return res;
}

}  // namespace hypercc
