#pragma once

// r-uniform rooted hypertrees: enumeration and counting oracles, the
// closed-form labeled forest counts, AHU canonical forms on the bipartite
// incidence tree, automorphism counts, and the class table for the
// root-degree-two tree family driving the recovery score.

#include <vector>
#include <string>
#include <map>
#include <set>
#include <algorithm>
#include <numeric>
#include <functional>
#include <stdexcept>
#include <fstream>
#include <sstream>

#include "comb.hpp"
#include "multigraph.hpp"

namespace hypercc {

struct RootedHypertree {
  int r = 2;
  int k = 0;       // vertices are 0..k-1
  int root = -1;   // -1 = unrooted
  std::vector<Edge> edges;

  int edge_target() const { return (k - 1) / (r - 1); }
};

inline bool spans_and_connected(int k, const std::vector<Edge>& edges) {
  if (k == 1 && edges.empty()) return true;
  std::vector<int> parent(k);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::vector<char> seen(k, 0);
  for (auto& e : edges) {
    for (int v : e) seen[v] = 1;
    for (size_t j = 1; j < e.size(); ++j) parent[find(e[0])] = find(e[j]);
  }
  for (int v = 0; v < k; ++v)
    if (!seen[v]) return false;
  int root = find(0);
  for (int v = 1; v < k; ++v)
    if (find(v) != root) return false;
  return true;
}

inline bool is_hypertree(const RootedHypertree& t) {
  if (t.k < 1 || (t.k - 1) % (t.r - 1) != 0) return false;
  if (int(t.edges.size()) != t.edge_target()) return false;
  return spans_and_connected(t.k, t.edges);
}

// ------------------------------------------------------------- enumeration

inline int hypertree_enum_cap(int r) { return r == 2 ? 9 : 7; }

// all labeled hypertrees on {0..k-1}; unrooted output (root unset)
inline std::vector<RootedHypertree> enumerate_labeled_hypertrees(int k, int r, int cap = -1) {
  if (cap < 0) cap = hypertree_enum_cap(r);
  if (k > cap) throw std::length_error("enumerate_labeled_hypertrees: k exceeds cap");
  std::vector<RootedHypertree> out;
  if (k < 1 || (k - 1) % (r - 1) != 0) return out;
  int ell = (k - 1) / (r - 1);
  std::vector<Edge> all;
  for_each_subset(k, r, [&](const std::vector<int>& e) { all.push_back(e); });
  std::vector<Edge> cur;
  std::function<void(int, int)> rec = [&](int start, int left) {
    if (left == 0) {
      if (spans_and_connected(k, cur)) out.push_back({r, k, -1, cur});
      return;
    }
    for (int i = start; i + left <= int(all.size()); ++i) {
      cur.push_back(all[i]);
      rec(i + 1, left - 1);
      cur.pop_back();
    }
  };
  if (ell == 0) {
    if (k == 1) out.push_back({r, 1, -1, {}});
    return out;
  }
  rec(0, ell);
  return out;
}

// Brute-force count of labeled rooted r-uniform hyperforests on [k] with t
// components (isolated vertices count as components, every component gets a
// distinguished root).  Oracle for the closed form below.
inline BigInt enumerate_rooted_forest_count(int k, int t, int r, int cap = -1) {
  if (cap < 0) cap = hypertree_enum_cap(r);
  if (k > cap) throw std::length_error("enumerate_rooted_forest_count: k exceeds cap");
  if (t < 1 || t > k || (k - t) % (r - 1) != 0) return 0;
  int ell = (k - t) / (r - 1);
  std::vector<Edge> all;
  for_each_subset(k, r, [&](const std::vector<int>& e) { all.push_back(e); });
  BigInt total = 0;
  std::vector<Edge> cur;
  auto component_sizes = [&](const std::vector<Edge>& es) {
    std::vector<int> parent(k);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    for (auto& e : es)
      for (size_t j = 1; j < e.size(); ++j) parent[find(e[0])] = find(e[j]);
    std::map<int, int> size;
    for (int v = 0; v < k; ++v) size[find(v)]++;
    return size;
  };
  std::function<void(int, int)> rec = [&](int start, int left) {
    if (left == 0) {
      auto sizes = component_sizes(cur);
      if (int(sizes.size()) != t) return;
      // t components with the right total edge count forces each component
      // to be a hypertree; roots multiply as component sizes
      BigInt ways = 1;
      for (auto& [root, s] : sizes) ways *= s;
      total += ways;
      return;
    }
    for (int i = start; i + left <= int(all.size()); ++i) {
      cur.push_back(all[i]);
      rec(i + 1, left - 1);
      cur.pop_back();
    }
  };
  rec(0, ell);
  return total;
}

// ------------------------------------------------------------ closed forms

// R_{k,t} = k!/(t-1)! * k^(l-1) / (l! (r-1)!^l) with l = (k-t)/(r-1)
inline BigInt count_rooted_forests(int k, int t, int r) {
  if (t < 1 || t > k) throw std::domain_error("count_rooted_forests: need 1 <= t <= k");
  if ((k - t) % (r - 1) != 0)
    throw std::domain_error("count_rooted_forests: (k-t) not divisible by r-1");
  long ell = (k - t) / (r - 1);
  if (ell == 0) return 1;  // empty forest, roots forced
  Rational v = Rational(big_factorial(k), big_factorial(t - 1)) *
               Rational(big_pow(k, ell - 1),
                        big_factorial(ell) * big_pow(big_factorial(r - 1), ell));
  if (boost::multiprecision::denominator(v) != 1)
    throw std::logic_error("count_rooted_forests: non-integer closed form");
  return boost::multiprecision::numerator(v);
}

// N_k = (k-1)! k^(l_k - 1) / (l_k! (r-1)!^{l_k}); satisfies R_{k,1} = k N_k
inline BigInt count_hypertrees(int k, int r) {
  if ((k - 1) % (r - 1) != 0)
    throw std::domain_error("count_hypertrees: (k-1) not divisible by r-1");
  BigInt rk1 = count_rooted_forests(k, 1, r);
  if (rk1 % k != 0) throw std::logic_error("count_hypertrees: R_{k,1} not divisible by k");
  return rk1 / k;
}

// Brute-force count of connected r-uniform simple hypergraphs on [k] with
// exactly ell edges (all k vertices covered).
inline BigInt count_connected_hypergraphs(int k, int ell, int r, int cap = -1) {
  if (cap < 0) cap = hypertree_enum_cap(r);
  if (k > cap) throw std::length_error("count_connected_hypergraphs: k exceeds cap");
  std::vector<Edge> all;
  for_each_subset(k, r, [&](const std::vector<int>& e) { all.push_back(e); });
  if (ell < 0 || ell > int(all.size())) return 0;
  BigInt total = 0;
  std::vector<Edge> cur;
  std::function<void(int, int)> rec = [&](int start, int left) {
    if (left == 0) {
      if (spans_and_connected(k, cur)) ++total;
      return;
    }
    for (int i = start; i + left <= int(all.size()); ++i) {
      cur.push_back(all[i]);
      rec(i + 1, left - 1);
      cur.pop_back();
    }
  };
  rec(0, ell);
  return total;
}

// Same with multi-edges and self-loops allowed: edge types are the simple
// r-subsets plus the k full self-loops (i,...,i), each with unbounded
// multiplicity (tiny k only).
inline BigInt count_connected_multi_hypergraphs(int k, int ell, int r, int cap = 5) {
  if (k > cap) throw std::length_error("count_connected_multi_hypergraphs: k exceeds cap");
  std::vector<Edge> types;
  for_each_subset(k, r, [&](const std::vector<int>& e) { types.push_back(e); });
  for (int v = 0; v < k; ++v) types.push_back(Edge(size_t(r), v));
  BigInt total = 0;
  std::vector<Edge> cur;
  std::function<void(int, int)> rec = [&](int start, int left) {
    if (left == 0) {
      if (spans_and_connected(k, cur)) ++total;
      return;
    }
    for (int i = start; i < int(types.size()); ++i) {
      cur.push_back(types[i]);
      rec(i, left - 1);  // multisets: same type may repeat
      cur.pop_back();
    }
  };
  if (ell == 0) return k == 1 ? 1 : 0;
  rec(0, ell);
  return total;
}

// ---------------------------------------------------------- incidence tree

struct IncNode {
  bool is_edge = false;
  int id = -1;  // vertex id, or index into edges
  int parent = -1;
  std::vector<int> children;  // node indices, ordered by canonical key
  int vtx_count = 0;          // |vtx(H_a)| (excludes parent vertex for edge nodes)
};

struct IncidenceTree {
  std::vector<IncNode> nodes;
  int root = -1;
};

// builds the bipartite incidence tree rooted at t.root, child lists ordered
// by canonical subtree key; also reports the canonical key and |Aut|
struct CanonicalForm {
  IncidenceTree tree;
  std::string key;
  BigInt aut = 1;
};

inline CanonicalForm canonical_form(const RootedHypertree& t) {
  if (t.root < 0) throw std::invalid_argument("canonical_form: tree must be rooted");
  CanonicalForm cf;
  auto& nodes = cf.tree.nodes;
  std::vector<std::vector<int>> vertex_edges(t.k);
  for (size_t ei = 0; ei < t.edges.size(); ++ei)
    for (int v : t.edges[ei]) vertex_edges[v].push_back(int(ei));

  // returns node index; fills key and aut per subtree
  std::vector<std::string> keys;
  std::vector<BigInt> auts;
  std::function<int(int, int)> build_vertex = [&](int v, int parent_edge) -> int {
    int me = int(nodes.size());
    nodes.push_back({});
    nodes[me].is_edge = false;
    nodes[me].id = v;
    std::vector<std::pair<std::string, int>> ch;
    BigInt aut = 1;
    int vtx = 1;
    for (int ei : vertex_edges[v]) {
      if (ei == parent_edge) continue;
      // build edge node
      int en = int(nodes.size());
      nodes.push_back({});
      nodes[en].is_edge = true;
      nodes[en].id = ei;
      nodes[en].parent = me;
      std::vector<std::pair<std::string, int>> ech;
      BigInt eaut = 1;
      int evtx = 0;
      for (int u : t.edges[ei]) {
        if (u == v) continue;
        int un = build_vertex(u, ei);
        nodes[un].parent = en;
        ech.push_back({keys[un], un});
        eaut *= auts[un];
        evtx += nodes[un].vtx_count;
      }
      std::sort(ech.begin(), ech.end());
      std::string ekey = "(e";
      for (size_t i = 0; i < ech.size(); ++i) {
        ekey += ech[i].first;
        nodes[en].children.push_back(ech[i].second);
      }
      ekey += ")";
      // factorial of runs of identical child keys
      for (size_t i = 0; i < ech.size();) {
        size_t j = i;
        while (j < ech.size() && ech[j].first == ech[i].first) ++j;
        eaut *= big_factorial(long(j - i));
        i = j;
      }
      nodes[en].vtx_count = evtx;
      keys.resize(nodes.size());
      auts.resize(nodes.size());
      keys[en] = ekey;
      auts[en] = eaut;
      ch.push_back({ekey, en});
      vtx += evtx;
    }
    std::sort(ch.begin(), ch.end());
    std::string key = "(v";
    for (auto& [ck, cn] : ch) {
      key += ck;
      nodes[me].children.push_back(cn);
      aut *= auts[cn];
    }
    key += ")";
    for (size_t i = 0; i < ch.size();) {
      size_t j = i;
      while (j < ch.size() && ch[j].first == ch[i].first) ++j;
      aut *= big_factorial(long(j - i));
      i = j;
    }
    nodes[me].vtx_count = vtx;
    keys.resize(nodes.size());
    auts.resize(nodes.size());
    keys[me] = key;
    auts[me] = aut;
    return me;
  };
  cf.tree.root = build_vertex(t.root, -1);
  cf.key = keys[cf.tree.root];
  cf.aut = auts[cf.tree.root];
  return cf;
}

inline IncidenceTree incidence_tree(const RootedHypertree& t) { return canonical_form(t).tree; }
inline std::string canonical_key(const RootedHypertree& t) { return canonical_form(t).key; }

// brute-force |Aut|: root-preserving, edge-set-preserving vertex bijections
inline BigInt brute_force_aut(const RootedHypertree& t) {
  std::set<Edge> eset(t.edges.begin(), t.edges.end());
  std::vector<int> perm(t.k);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> others;
  for (int v = 0; v < t.k; ++v)
    if (v != t.root) others.push_back(v);
  BigInt count = 0;
  std::sort(others.begin(), others.end());
  do {
    std::vector<int> map(t.k);
    map[t.root] = t.root;
    int idx = 0;
    for (int v = 0; v < t.k; ++v)
      if (v != t.root) map[v] = others[idx++];
    bool ok = true;
    for (auto& e : t.edges) {
      Edge img;
      for (int v : e) img.push_back(map[v]);
      std::sort(img.begin(), img.end());
      if (!eset.count(img)) { ok = false; break; }
    }
    if (ok) ++count;
  } while (std::next_permutation(others.begin(), others.end()));
  return count;
}

// --------------------------------------------------- rooted class generation

struct RootedClass {
  int edge_count = 0;
  std::string key;
  BigInt aut = 1;
  RootedHypertree rep;  // root = 0
};

// all isomorphism classes of rooted r-uniform hypertrees with <= max_edges
// edges, generated bottom-up from multisets of child classes
inline std::vector<std::vector<RootedClass>> rooted_classes_by_edges(int max_edges, int r,
                                                                     long class_cap = 200000) {
  std::vector<std::vector<RootedClass>> by_edges(max_edges + 1);
  RootedClass single;
  single.edge_count = 0;
  single.rep = {r, 1, 0, {}};
  auto cf0 = canonical_form(single.rep);
  single.key = cf0.key;
  single.aut = cf0.aut;
  by_edges[0].push_back(single);

  struct Branch {  // one root-incident edge plus the r-1 subtrees below it
    int edge_count;              // 1 + subtree edges
    std::vector<std::pair<int, int>> subtrees;  // (edge budget, class index)
  };

  // graft: attach subtree rep at vertex `at` of base (subtree root -> at)
  auto graft = [&](RootedHypertree& base, const RootedHypertree& sub, int at) {
    std::vector<int> map(sub.k);
    int next = base.k;
    for (int v = 0; v < sub.k; ++v) map[v] = (v == sub.root) ? at : next++;
    base.k = next;
    for (auto e : sub.edges) {
      for (auto& v : e) v = map[v];
      std::sort(e.begin(), e.end());
      base.edges.push_back(e);
    }
  };

  for (int j = 1; j <= max_edges; ++j) {
    // enumerate branch multisets with total edge count j; a branch with
    // budget b holds a multiset of r-1 subtree classes totalling b-1 edges
    std::vector<Branch> branches;  // all branches with edge_count <= j
    std::function<void(int, int, long long, std::vector<std::pair<int, int>>&)> gen_branch =
        [&](int slots, int budget, long long max_item, std::vector<std::pair<int, int>>& acc) {
          if (slots == 0) {
            if (budget == 0) branches.push_back({0, acc});
            return;
          }
          // items ordered by (edge budget, class index), non-increasing
          for (int eb = std::min(budget, j - 1); eb >= 0; --eb) {
            if ((long long)eb * slots < budget) continue;  // cannot reach budget
            for (int ci = int(by_edges[eb].size()) - 1; ci >= 0; --ci) {
              long long code = (long long)eb * 1000000 + ci;
              if (code > max_item) continue;
              acc.push_back({eb, ci});
              gen_branch(slots - 1, budget - eb, code, acc);
              acc.pop_back();
            }
          }
        };
    for (int b = 1; b <= j; ++b) {
      std::vector<std::pair<int, int>> acc;
      size_t before = branches.size();
      gen_branch(r - 1, b - 1, INT64_MAX, acc);
      for (size_t i = before; i < branches.size(); ++i) branches[i].edge_count = b;
    }
    // canonical key per branch for multiset dedup at the root level
    std::vector<std::string> branch_keys(branches.size());
    for (size_t i = 0; i < branches.size(); ++i) {
      std::vector<std::string> ks;
      for (auto& [eb, ci] : branches[i].subtrees) ks.push_back(by_edges[eb][ci].key);
      std::sort(ks.begin(), ks.end());
      std::string bk = "(e";
      for (auto& s : ks) bk += s;
      bk += ")";
      branch_keys[i] = bk;
    }
    // order branches so multisets can be enumerated as non-increasing tuples
    std::vector<int> order(branches.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return branch_keys[a] < branch_keys[b]; });

    std::vector<int> chosen;
    std::function<void(int, int)> gen_root = [&](int max_pos, int budget) {
      if (budget == 0 && !chosen.empty()) {
        // assemble representative
        RootedHypertree rep{r, 1, 0, {}};
        for (int pos : chosen) {
          const Branch& br = branches[order[pos]];
          Edge e = {0};
          std::vector<int> child_vertices;
          for (int s = 0; s < r - 1; ++s) {
            e.push_back(rep.k);
            child_vertices.push_back(rep.k);
            rep.k++;
          }
          std::sort(e.begin(), e.end());
          rep.edges.push_back(e);
          for (int s = 0; s < r - 1; ++s) {
            auto& [eb, ci] = br.subtrees[s];
            graft(rep, by_edges[eb][ci].rep, child_vertices[s]);
          }
        }
        auto cf = canonical_form(rep);
        RootedClass rc;
        rc.edge_count = j;
        rc.key = cf.key;
        rc.aut = cf.aut;
        rc.rep = rep;
        by_edges[j].push_back(rc);
        if (long(by_edges[j].size()) > class_cap)
          throw std::length_error("rooted_classes_by_edges: class cap exceeded");
        return;
      }
      if (budget == 0) return;
      for (int pos = max_pos; pos >= 0; --pos) {
        int bc = branches[order[pos]].edge_count;
        if (bc > budget) continue;
        chosen.push_back(pos);
        gen_root(pos, budget - bc);
        chosen.pop_back();
      }
    };
    gen_root(int(branches.size()) - 1, j);
    // classes generated from distinct child multisets are distinct, but sort
    // them by key for deterministic downstream order
    std::sort(by_edges[j].begin(), by_edges[j].end(),
              [](const RootedClass& a, const RootedClass& b) { return a.key < b.key; });
  }
  return by_edges;
}

// ----------------------------------------------------------- tree class table

// One representative per root-preserving isomorphism class of the tree
// family: root of degree two, each root-incident edge carrying one attach
// vertex of degree >= 2 (for ell >= 1) and r-2 pendant leaves, with an
// ell-edge hypertree hanging below each attach vertex.
struct TreeClass {
  RootedHypertree rep;
  BigInt aut = 1;
  std::string key;
};

struct TreeClassTable {
  int ell = 0;
  int r = 2;
  std::vector<TreeClass> classes;
  int total_vertices() const { return (r - 1) * (2 * ell + 2) + 1; }
};

inline TreeClassTable build_class_table(int ell, int r, long class_cap = 200000) {
  if (ell < 0 || r < 2) throw std::invalid_argument("build_class_table: need ell >= 0, r >= 2");
  TreeClassTable table;
  table.ell = ell;
  table.r = r;
  auto by_edges = rooted_classes_by_edges(ell, r, class_cap);
  const auto& subs = by_edges[ell];
  for (size_t i = 0; i < subs.size(); ++i) {
    for (size_t j = i; j < subs.size(); ++j) {
      RootedHypertree rep{r, 1, 0, {}};
      auto add_side = [&](const RootedClass& rc) {
        Edge e = {0};
        int attach = rep.k++;
        e.push_back(attach);
        for (int s = 0; s < r - 2; ++s) e.push_back(rep.k++);
        std::sort(e.begin(), e.end());
        rep.edges.push_back(e);
        // graft subtree at attach
        int base_k = rep.k;
        std::vector<int> map(rc.rep.k);
        int next = base_k;
        for (int v = 0; v < rc.rep.k; ++v)
          map[v] = (v == rc.rep.root) ? attach : next++;
        rep.k = next;
        for (auto se : rc.rep.edges) {
          for (auto& v : se) v = map[v];
          std::sort(se.begin(), se.end());
          rep.edges.push_back(se);
        }
      };
      add_side(subs[i]);
      add_side(subs[j]);
      TreeClass tc;
      tc.rep = rep;
      if (ell == 0) {
        // attach vertex merges into the leaf orbit: (r-1)! per edge, side swap
        tc.aut = 2 * big_pow(big_factorial(r - 1), 2);
      } else {
        tc.aut = subs[i].aut * subs[j].aut * big_pow(big_factorial(r - 2), 2);
        if (i == j) tc.aut *= 2;
      }
      tc.key = canonical_key(rep);
      table.classes.push_back(std::move(tc));
      if (long(table.classes.size()) > class_cap)
        throw std::length_error("build_class_table: class cap exceeded");
    }
  }
  std::sort(table.classes.begin(), table.classes.end(),
            [](const TreeClass& a, const TreeClass& b) { return a.key < b.key; });
  return table;
}

// |T_ell| at ambient size n: closed-form labeled count of the tree family,
// root fixed at one vertex (exact big integer).  The ell = 0 family is the
// degenerate one (two pendant root edges): unordered pairs of disjoint
// (r-1)-subsets, counted directly since the attach vertex is then not
// distinguished from the pendant leaves.
inline BigInt count_tree_family(int n, int ell, int r) {
  int k = (r - 1) * ell + 1;  // vertices in each hanging subtree
  int kp = 2 * k + 2 * r - 3; // total vertices per tree
  if (n < kp) return 0;
  if (ell == 0) return big_binomial(n - 1, r - 1) * big_binomial(n - r, r - 1) / 2;
  BigInt falling = 1;  // (n-1)!/(n-kp)!
  for (int i = n - 1; i >= n - kp + 1; --i) falling *= i;
  BigInt rk1 = count_rooted_forests(k, 1, r);
  Rational v = Rational(falling, 2 * big_pow(big_factorial(r - 2), 2)) *
               Rational(rk1 * rk1, big_factorial(k) * big_factorial(k));
  if (boost::multiprecision::denominator(v) != 1)
    throw std::logic_error("count_tree_family: non-integer");
  return boost::multiprecision::numerator(v);
}

// ------------------------------------------------------------ table (de)ser

inline void save_class_table(const TreeClassTable& t, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  f << "# hypercc-treeclasses v1 ell=" << t.ell << " r=" << t.r << "\n";
  for (auto& c : t.classes) {
    f << "aut=" << c.aut << " k=" << c.rep.k << " root=" << c.rep.root << " edges=";
    for (size_t i = 0; i < c.rep.edges.size(); ++i) {
      if (i) f << ";";
      for (size_t j = 0; j < c.rep.edges[i].size(); ++j) {
        if (j) f << ",";
        f << c.rep.edges[i][j];
      }
    }
    f << " key=" << c.key << "\n";
  }
}

inline TreeClassTable load_class_table(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::string header;
  std::getline(f, header);
  TreeClassTable t;
  if (header.rfind("# hypercc-treeclasses v1", 0) != 0)
    throw std::runtime_error("bad class table header");
  std::sscanf(header.c_str(), "# hypercc-treeclasses v1 ell=%d r=%d", &t.ell, &t.r);
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    TreeClass c;
    std::istringstream is(line);
    std::string tok;
    while (is >> tok) {
      auto eq = tok.find('=');
      std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
      if (key == "aut") c.aut = BigInt(val);
      else if (key == "k") c.rep.k = std::stoi(val);
      else if (key == "root") c.rep.root = std::stoi(val);
      else if (key == "key") c.key = val;
      else if (key == "edges") {
        std::istringstream es(val);
        std::string epart;
        while (std::getline(es, epart, ';')) {
          Edge e;
          std::istringstream vs(epart);
          std::string vpart;
          while (std::getline(vs, vpart, ',')) e.push_back(std::stoi(vpart));
          c.rep.edges.push_back(e);
        }
      }
    }
    c.rep.r = t.r;
    t.classes.push_back(std::move(c));
  }
  return t;
}

}  // namespace hypercc
