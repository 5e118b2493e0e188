#pragma once

// Labeled multi-hypergraphs: finitely many edges (sorted vertex tuples,
// possibly with repeated vertices) carrying integer multiplicities.  This is
// the alpha/beta/gamma object of the moment systems and cumulant recursions.

#include <vector>
#include <map>
#include <set>
#include <algorithm>
#include <numeric>
#include <functional>

#include "comb.hpp"

namespace hypercc {

using Edge = std::vector<int>;  // sorted vertex ids

struct MultiHypergraph {
  // sorted unique edge tuples with positive multiplicities
  std::vector<std::pair<Edge, int>> edges;

  static MultiHypergraph from_edges(std::vector<Edge> es) {
    std::map<Edge, int> m;
    for (auto& e : es) {
      std::sort(e.begin(), e.end());
      m[e]++;
    }
    MultiHypergraph g;
    g.edges.assign(m.begin(), m.end());
    return g;
  }

  bool empty() const { return edges.empty(); }

  // |alpha|: edge count with multiplicity
  int total_edges() const {
    int t = 0;
    for (auto& [e, m] : edges) t += m;
    return t;
  }

  std::vector<int> vertices() const {
    std::set<int> s;
    for (auto& [e, m] : edges) s.insert(e.begin(), e.end());
    return std::vector<int>(s.begin(), s.end());
  }

  std::map<int, int> degrees() const {
    std::map<int, int> d;
    for (auto& [e, m] : edges)
      for (int v : e) d[v] += m;
    return d;
  }

  // alpha! = prod over edge types of multiplicity!
  BigInt edge_factorial() const {
    BigInt f = 1;
    for (auto& [e, m] : edges) f *= big_factorial(m);
    return f;
  }

  bool connected() const {
    auto vs = vertices();
    if (vs.empty()) return true;
    std::map<int, int> idx;
    for (size_t i = 0; i < vs.size(); ++i) idx[vs[i]] = int(i);
    std::vector<int> parent(vs.size());
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    for (auto& [e, m] : edges)
      for (size_t j = 1; j < e.size(); ++j)
        parent[find(idx[e[0]])] = find(idx[e[j]]);
    int root = find(0);
    for (size_t i = 0; i < vs.size(); ++i)
      if (find(int(i)) != root) return false;
    return true;
  }

  // connected components as index lists into `edges` (isolated vertices
  // cannot occur: vertices() only reports covered vertices)
  std::vector<std::vector<int>> component_edge_groups() const {
    auto vs = vertices();
    std::map<int, int> idx;
    for (size_t i = 0; i < vs.size(); ++i) idx[vs[i]] = int(i);
    std::vector<int> parent(vs.size());
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    for (auto& [e, m] : edges)
      for (size_t j = 1; j < e.size(); ++j)
        parent[find(idx[e[0]])] = find(idx[e[j]]);
    std::map<int, std::vector<int>> groups;
    for (size_t i = 0; i < edges.size(); ++i)
      groups[find(idx[edges[i].first[0]])].push_back(int(i));
    std::vector<std::vector<int>> out;
    for (auto& [root, g] : groups) out.push_back(g);
    return out;
  }

  int component_count() const { return int(component_edge_groups().size()); }

  bool contains_vertex(int v) const {
    for (auto& [e, m] : edges)
      if (std::binary_search(e.begin(), e.end(), v)) return true;
    return false;
  }

  MultiHypergraph plus_edge(Edge e, int mult = 1) const {
    MultiHypergraph g = *this;
    std::sort(e.begin(), e.end());
    for (auto& [f, m] : g.edges)
      if (f == e) {
        m += mult;
        return g;
      }
    g.edges.emplace_back(std::move(e), mult);
    std::sort(g.edges.begin(), g.edges.end());
    return g;
  }

  bool operator==(const MultiHypergraph& o) const { return edges == o.edges; }
  bool operator<(const MultiHypergraph& o) const { return edges < o.edges; }
};

// beta <= alpha as multiplicity vectors (beta's support inside alpha's)
inline bool submultigraph_of(const MultiHypergraph& beta, const MultiHypergraph& alpha) {
  for (auto& [e, m] : beta.edges) {
    bool ok = false;
    for (auto& [f, mm] : alpha.edges)
      if (f == e) {
        if (m > mm) return false;
        ok = true;
        break;
      }
    if (!ok) return false;
  }
  return true;
}

inline MultiHypergraph multigraph_minus(const MultiHypergraph& alpha, const MultiHypergraph& beta) {
  MultiHypergraph g;
  for (auto& [e, m] : alpha.edges) {
    int sub = 0;
    for (auto& [f, mm] : beta.edges)
      if (f == e) { sub = mm; break; }
    if (m - sub > 0) g.edges.emplace_back(e, m - sub);
  }
  return g;
}

inline MultiHypergraph multigraph_plus(const MultiHypergraph& a, const MultiHypergraph& b) {
  MultiHypergraph g = a;
  for (auto& [e, m] : b.edges) g = g.plus_edge(e, m);
  return g;
}

// binom(alpha, beta) = prod over edge types of C(alpha_e, beta_e)
inline BigInt multigraph_binomial(const MultiHypergraph& alpha, const MultiHypergraph& beta) {
  BigInt b = 1;
  for (auto& [e, m] : beta.edges) {
    int am = 0;
    for (auto& [f, mm] : alpha.edges)
      if (f == e) { am = mm; break; }
    b *= big_binomial(am, m);
  }
  return b;
}

// visit all beta <= alpha (including 0 and alpha)
template <typename F>
void for_each_submultigraph(const MultiHypergraph& alpha, F&& f) {
  size_t ne = alpha.edges.size();
  std::vector<int> mult(ne, 0);
  while (true) {
    MultiHypergraph beta;
    for (size_t i = 0; i < ne; ++i)
      if (mult[i] > 0) beta.edges.emplace_back(alpha.edges[i].first, mult[i]);
    f(const_cast<const MultiHypergraph&>(beta));
    size_t i = 0;
    while (i < ne && mult[i] == alpha.edges[i].second) mult[i++] = 0;
    if (i == ne) break;
    ++mult[i];
  }
}

}  // namespace hypercc
