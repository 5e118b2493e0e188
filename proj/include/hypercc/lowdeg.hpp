#pragma once

// Moment systems (c, M), dual certificates, Gram matrices and exact
// low-degree correlation / MMSE for the two exactly-tractable models:
// planted dense subhypergraph (binary edges) and noise-reduced sparse
// tensor PCA (Gaussian entries, Hermite basis).  The estimand is theta_0
// (vertex ids are 0-based; the distinguished vertex of the formulas is 0).
//
// Exact mode works in the ring Q[sqrt(.)]; every identity verified here
// reduces to a rational.  Verified quantities with square roots of
// factorials are rescaled by sqrt(alpha!) where a linear solve is needed.

#include <vector>
#include <map>
#include <optional>

#include "surd.hpp"
#include "multigraph.hpp"
#include "models.hpp"

namespace hypercc {
namespace lowdeg {

enum class Model { pds, stpca };

struct ExactParams {
  Model model = Model::pds;
  int n = 0, r = 2, D = 1;
  Rational rho, q0, q1, lambda;

  void validate() const {
    if (n < r || r < 2 || D < 0) throw std::invalid_argument("lowdeg: bad n/r/D");
    if (!(rho > 0 && rho < 1)) throw std::invalid_argument("lowdeg: rho must be in (0,1)");
    if (model == Model::pds) {
      if (!(q0 > 0 && q0 < 1)) throw std::invalid_argument("lowdeg: q0 outside (0,1)");
      if (q1 == 1) throw std::domain_error("lowdeg: q1 = 1 makes the edge normalization singular");
      if (!(q1 >= q0 && q1 < 1)) throw std::invalid_argument("lowdeg: need q0 <= q1 < 1");
    }
  }
};

// ------------------------------------------------------------ index sets

// all simple r-uniform hypergraphs on [n] with at most D edges
inline std::vector<MultiHypergraph> enumerate_simple_graphs(int n, int r, int D,
                                                            long cap = 50000) {
  std::vector<Edge> universe;
  for_each_subset(n, r, [&](const std::vector<int>& e) { universe.push_back(e); });
  std::vector<MultiHypergraph> out;
  out.push_back(MultiHypergraph{});
  std::vector<Edge> cur;
  std::function<void(int, int)> rec = [&](int start, int left) {
    if (left == 0) return;
    for (int i = start; i < int(universe.size()); ++i) {
      cur.push_back(universe[i]);
      MultiHypergraph g;
      for (auto& e : cur) g.edges.emplace_back(e, 1);
      out.push_back(g);
      if (long(out.size()) > cap) throw std::length_error("index set exceeds exact-mode cap");
      rec(i + 1, left - 1);
      cur.pop_back();
    }
  };
  rec(0, D);
  return out;
}

// all r-uniform multi-hypergraphs (multiset edges allowed) with |alpha| <= D
inline std::vector<MultiHypergraph> enumerate_multigraphs(int n, int r, int D, long cap = 50000) {
  std::vector<Edge> types;
  for_each_multiset(n, r, [&](const std::vector<int>& e) { types.push_back(e); });
  std::vector<MultiHypergraph> out;
  out.push_back(MultiHypergraph{});
  std::vector<std::pair<Edge, int>> cur;
  std::function<void(int, int)> rec = [&](int start, int left) {
    if (left == 0) return;
    for (int i = start; i < int(types.size()); ++i) {
      if (!cur.empty() && cur.back().first == types[i]) {
        cur.back().second++;
      } else {
        cur.emplace_back(types[i], 1);
      }
      MultiHypergraph g;
      g.edges = cur;
      out.push_back(g);
      if (long(out.size()) > cap) throw std::length_error("index set exceeds exact-mode cap");
      rec(i, left - 1);
      if (cur.back().second > 1) cur.back().second--;
      else cur.pop_back();
    }
  };
  rec(0, D);
  return out;
}

inline std::vector<MultiHypergraph> enumerate_index_set(const ExactParams& p, long cap = 50000) {
  return p.model == Model::pds ? enumerate_simple_graphs(p.n, p.r, p.D, cap)
                               : enumerate_multigraphs(p.n, p.r, p.D, cap);
}

// good: alpha = 0, or alpha connected containing vertex 0
inline bool is_good(const MultiHypergraph& alpha) {
  if (alpha.empty()) return true;
  return alpha.contains_vertex(0) && alpha.connected();
}

inline int vertices_with_root(const MultiHypergraph& g) {  // |V(alpha) u {0}|
  auto vs = g.vertices();
  return int(vs.size()) + (g.contains_vertex(0) ? 0 : 1);
}

// gamma sets are vertex masks over [n]
inline int mask_pc(uint32_t m) { return popcount32(m); }
inline uint32_t vset_mask(const std::vector<int>& vs) {
  uint32_t m = 0;
  for (int v : vs) m |= 1u << v;
  return m;
}

// ------------------------------------------------------- closed-form c, M

inline Rational rat_pow(const Rational& b, long e) {
  Rational r = 1;
  for (long i = 0; i < e; ++i) r *= b;
  return r;
}

inline Rational c_entry_pds(const ExactParams& p, const MultiHypergraph& alpha) {
  return rat_pow(p.rho, vertices_with_root(alpha)) * rat_pow(p.q1 - p.q0, alpha.total_edges());
}

inline Surd c_entry_stpca(const ExactParams& p, const MultiHypergraph& alpha) {
  Rational num = rat_pow(p.lambda, alpha.total_edges()) * rat_pow(p.rho, vertices_with_root(alpha));
  return Surd(num) / Surd::sqrt_of(Rational(alpha.edge_factorial()));
}

inline Surd c_entry(const ExactParams& p, const MultiHypergraph& alpha) {
  return p.model == Model::pds ? Surd(c_entry_pds(p, alpha)) : c_entry_stpca(p, alpha);
}

// chi_i(theta) = (theta_i - rho)/sqrt(rho(1-rho)) at theta_i in {0,1}
inline Surd chi_value(const ExactParams& p, bool planted) {
  // theta=1: sqrt((1-rho)/rho); theta=0: -sqrt(rho/(1-rho))
  if (planted) return Surd::sqrt_of((1 - p.rho) / p.rho);
  return -Surd::sqrt_of(p.rho / (1 - p.rho));
}

// M for noise-reduced sparse tensor PCA, Lemma-form
inline Surd m_entry_stpca(const ExactParams& p, const MultiHypergraph& beta, uint32_t gamma,
                          const MultiHypergraph& alpha) {
  if (!submultigraph_of(beta, alpha)) return Surd();
  MultiHypergraph diff = multigraph_minus(alpha, beta);
  uint32_t vdiff = vset_mask(diff.vertices());
  if ((gamma & ~vdiff) != 0) return Surd();
  Surd val = Surd::sqrt_of(Rational(beta.edge_factorial(), alpha.edge_factorial()));
  val *= Surd(Rational(multigraph_binomial(alpha, beta)));
  val *= Surd::sqrt_pow((1 - p.rho) / p.rho, mask_pc(gamma));
  val *= Surd(rat_pow(p.lambda, diff.total_edges()) * rat_pow(p.rho, int(diff.vertices().size())));
  return val;
}

// M for planted dense subhypergraph: expectation over the planted statuses
// of V(alpha) (edges outside the planted set integrate to zero unless
// alpha - beta is planted; the |beta cap K_S| exponent depends on theta)
inline Surd m_entry_pds(const ExactParams& p, const MultiHypergraph& beta, uint32_t gamma,
                        const MultiHypergraph& alpha) {
  if (!submultigraph_of(beta, alpha)) return Surd();
  for (auto& [e, m] : alpha.edges)
    if (m > 1) throw std::invalid_argument("pds index set must be simple");
  MultiHypergraph diff = multigraph_minus(alpha, beta);
  auto va = alpha.vertices();
  uint32_t vmask = vset_mask(va);
  if ((gamma & ~vmask) != 0) return Surd();  // lone chi factor integrates to 0
  uint32_t vdiff = vset_mask(diff.vertices());

  Surd total;
  Rational q01 = p.q0 * (1 - p.q0);
  Rational q11 = p.q1 * (1 - p.q1);
  int nv = int(va.size());
  for (uint32_t s = 0; s < (1u << nv); ++s) {
    uint32_t smask = 0;
    for (int j = 0; j < nv; ++j)
      if (s & (1u << j)) smask |= 1u << va[j];
    if ((vdiff & ~smask) != 0) continue;  // theta^{V(alpha-beta)} vanishes
    Rational prob = 1;
    for (int j = 0; j < nv; ++j) prob *= (s & (1u << j)) ? p.rho : (1 - p.rho);
    // |beta cap K_S|: edges of beta fully inside the planted vertices
    int bks = 0;
    for (auto& [e, m] : beta.edges) {
      bool inside = true;
      for (int v : e) inside = inside && ((smask >> v) & 1);
      if (inside) bks += m;
    }
    Surd term(prob);
    term *= Surd::sqrt_pow(q11 / q01, bks);
    // chi^gamma at this theta assignment
    uint32_t g = gamma;
    while (g) {
      int v = __builtin_ctz(g);
      g &= g - 1;
      term *= chi_value(p, (smask >> v) & 1);
    }
    total += term;
  }
  total *= Surd::sqrt_pow(q01, beta.total_edges());
  total *= Surd(rat_pow(p.q1 - p.q0, diff.total_edges()));
  return total;
}

inline Surd m_entry(const ExactParams& p, const MultiHypergraph& beta, uint32_t gamma,
                    const MultiHypergraph& alpha) {
  return p.model == Model::pds ? m_entry_pds(p, beta, gamma, alpha)
                               : m_entry_stpca(p, beta, gamma, alpha);
}

// --------------------------------------------------------- moment system

struct MomentSystem {
  ExactParams params;
  std::vector<MultiHypergraph> G;
  std::vector<Surd> c;

  static MomentSystem build(const ExactParams& p, long cap = 50000) {
    p.validate();
    MomentSystem s;
    s.params = p;
    s.G = enumerate_index_set(p, cap);
    s.c.reserve(s.G.size());
    for (auto& a : s.G) s.c.push_back(c_entry(p, a));
    return s;
  }
};

// -------------------------------------------------------- dual certificate

struct CertEntry {
  int beta = 0;           // index into G
  uint32_t gamma = 0;     // vertex mask, subset of V(beta) u {0}
  Surd val;
};

struct DualCertificate {
  std::vector<CertEntry> entries;
  Rational norm2 = 0;  // ||u||^2, always rational
};

// Eq-(4.2)/(5.1)-style certificate supported on good pairs
inline DualCertificate build_certificate(const MomentSystem& sys) {
  const auto& p = sys.params;
  DualCertificate cert;
  Surd minus_s = -Surd::sqrt_of(p.rho / (1 - p.rho));
  for (size_t bi = 0; bi < sys.G.size(); ++bi) {
    const auto& beta = sys.G[bi];
    if (!is_good(beta)) continue;
    uint32_t support = vset_mask(beta.vertices()) | 1u;
    for_each_submask(support, [&](uint32_t gamma) {
      Surd v = surd_pow(minus_s, mask_pc(gamma));
      if (p.model == Model::pds)
        v = v / Surd::sqrt_pow(p.q0 * (1 - p.q0), beta.total_edges());
      v *= sys.c[bi];
      CertEntry e;
      e.beta = int(bi);
      e.gamma = gamma;
      e.val = v;
      cert.entries.push_back(std::move(e));
    });
  }
  for (auto& e : cert.entries) {
    Surd sq = e.val * e.val;
    cert.norm2 += sq.as_rational();
  }
  return cert;
}

// residual (M^T u - c)_alpha; exact zero required
inline Surd certificate_residual(const MomentSystem& sys, const DualCertificate& cert,
                                 const MultiHypergraph& alpha, const Surd& c_alpha) {
  Surd acc;
  for (const auto& e : cert.entries) {
    Surd m = m_entry(sys.params, sys.G[e.beta], e.gamma, alpha);
    if (m.is_zero()) continue;
    acc += m * e.val;
  }
  return acc - c_alpha;
}

// ------------------------------------------------------------ Gram matrix

// PDS: E[(Y-q0)^alpha (Y-q0)^alpha'] by enumerating planted statuses of
// V(alpha u alpha')
inline Rational gram_entry_pds(const ExactParams& p, const MultiHypergraph& a,
                               const MultiHypergraph& b) {
  MultiHypergraph uni = multigraph_plus(a, b);
  auto vs = uni.vertices();
  int nv = int(vs.size());
  // split union edges into symmetric difference and intersection
  std::vector<std::pair<Edge, int>> sym, both;
  for (auto& [e, m] : uni.edges) {
    int ma = 0, mb = 0;
    for (auto& [f, mm] : a.edges)
      if (f == e) ma = mm;
    for (auto& [f, mm] : b.edges)
      if (f == e) mb = mm;
    if (ma + mb != m) throw std::logic_error("gram_entry_pds: bad union");
    if (ma > 0 && mb > 0) both.emplace_back(e, 1);
    else sym.emplace_back(e, 1);
  }
  Rational total = 0;
  for (uint32_t s = 0; s < (1u << nv); ++s) {
    Rational prob = 1;
    uint32_t smask = 0;
    for (int j = 0; j < nv; ++j) {
      prob *= (s & (1u << j)) ? p.rho : (1 - p.rho);
      if (s & (1u << j)) smask |= 1u << vs[j];
    }
    auto edge_p = [&](const Edge& e) {
      for (int v : e)
        if (!((smask >> v) & 1)) return p.q0;
      return p.q1;
    };
    Rational term = prob;
    bool zero = false;
    for (auto& [e, m] : sym) {
      Rational pe = edge_p(e);
      if (pe == p.q0) { zero = true; break; }  // mean-zero factor
      term *= pe - p.q0;
    }
    if (zero) continue;
    for (auto& [e, m] : both) {
      Rational pe = edge_p(e);
      term *= pe * (1 - pe) + (pe - p.q0) * (pe - p.q0);
    }
    total += term;
  }
  return total;
}

// stpca, rescaled by sqrt(alpha! alpha'!):
// Ghat = sum_{beta <= a ^ b} binom(a,beta) binom(b,beta) beta!
//        lambda^{|a|+|b|-2|beta|} rho^{|V(a + b - 2 beta)|}
inline Rational gram_entry_stpca_rescaled(const ExactParams& p, const MultiHypergraph& a,
                                          const MultiHypergraph& b) {
  // beta <= min(a, b) edgewise
  MultiHypergraph cap;
  for (auto& [e, m] : a.edges)
    for (auto& [f, mm] : b.edges)
      if (f == e) cap.edges.emplace_back(e, std::min(m, mm));
  Rational total = 0;
  for_each_submultigraph(cap, [&](const MultiHypergraph& beta) {
    MultiHypergraph da = multigraph_minus(a, beta);
    MultiHypergraph db = multigraph_minus(b, beta);
    MultiHypergraph rest = multigraph_plus(da, db);
    Rational term(multigraph_binomial(a, beta) * multigraph_binomial(b, beta) *
                  beta.edge_factorial());
    term *= rat_pow(p.lambda, da.total_edges() + db.total_edges());
    term *= rat_pow(p.rho, int(rest.vertices().size()));
    total += term;
  });
  return total;
}

// ------------------------------------------------- exact linear algebra

// solve A w = y for symmetric PSD rational A (Gaussian elimination with
// exact pivoting); returns nullopt if inconsistent
inline std::optional<std::vector<Rational>> solve_psd(std::vector<std::vector<Rational>> A,
                                                      std::vector<Rational> y) {
  size_t m = A.size();
  std::vector<int> piv;
  size_t row = 0;
  std::vector<int> col_of_row;
  for (size_t col = 0; col < m && row < m; ++col) {
    size_t sel = row;
    while (sel < m && A[sel][col] == 0) ++sel;
    if (sel == m) continue;
    std::swap(A[sel], A[row]);
    std::swap(y[sel], y[row]);
    Rational inv = Rational(1) / A[row][col];
    for (size_t j = col; j < m; ++j) A[row][j] *= inv;
    y[row] *= inv;
    for (size_t i = 0; i < m; ++i) {
      if (i == row || A[i][col] == 0) continue;
      Rational f = A[i][col];
      for (size_t j = col; j < m; ++j) A[i][j] -= f * A[row][j];
      y[i] -= f * y[row];
    }
    col_of_row.push_back(int(col));
    ++row;
  }
  for (size_t i = row; i < m; ++i)
    if (y[i] != 0) return std::nullopt;  // inconsistent
  std::vector<Rational> w(m, 0);
  for (size_t i = 0; i < row; ++i) w[size_t(col_of_row[i])] = y[i];
  return w;
}

struct CorrReport {
  Rational corr2;  // Corr_{<=D}^2
  Rational mmse;   // (1 - corr2) E[x^2]
  Rational ex2;    // E[x^2] = rho
};

// exact Corr via the Gram solve: Corr^2 = c^T G^+ c / E[x^2]
inline CorrReport exact_corr(const MomentSystem& sys) {
  const auto& p = sys.params;
  size_t m = sys.G.size();
  std::vector<std::vector<Rational>> G(m, std::vector<Rational>(m));
  std::vector<Rational> chat(m);
  for (size_t i = 0; i < m; ++i) {
    for (size_t j = i; j < m; ++j) {
      Rational g = p.model == Model::pds ? gram_entry_pds(p, sys.G[i], sys.G[j])
                                         : gram_entry_stpca_rescaled(p, sys.G[i], sys.G[j]);
      G[i][j] = g;
      G[j][i] = g;
    }
    if (p.model == Model::pds) {
      chat[i] = sys.c[i].as_rational();
    } else {
      // rescale: chat = c * sqrt(alpha!)
      chat[i] = (sys.c[i] * Surd::sqrt_of(Rational(sys.G[i].edge_factorial()))).as_rational();
    }
  }
  auto w = solve_psd(G, chat);
  if (!w) throw std::logic_error("exact_corr: c not in the range of the Gram matrix");
  Rational corr2 = 0;
  for (size_t i = 0; i < m; ++i) corr2 += chat[i] * (*w)[i];
  corr2 /= p.rho;
  CorrReport rep;
  rep.corr2 = corr2;
  rep.ex2 = p.rho;
  rep.mmse = (1 - corr2) * p.rho;
  return rep;
}

struct DualityReport {
  Rational corr2;
  Rational cert_bound2;  // ||u||^2 / E[x^2]
  bool bound_holds = false;
};

inline DualityReport duality_gap(const MomentSystem& sys) {
  DualityReport rep;
  rep.corr2 = exact_corr(sys).corr2;
  DualCertificate cert = build_certificate(sys);
  rep.cert_bound2 = cert.norm2 / sys.params.rho;
  rep.bound_holds = rep.corr2 <= rep.cert_bound2;
  return rep;
}

// ------------------------------------------------------------- float mode

struct FloatCorrReport {
  double corr2 = 0, mmse = 0, ex2 = 0;
};

// float-mode Gram solve; entries from the same closed forms evaluated in
// doubles, pseudoinverse via eigendecomposition-free ridge-less SVD is
// overkill here: use Cholesky-style solve with a cutoff on tiny pivots
inline FloatCorrReport exact_corr_float(const MomentSystem& sys) {
  const auto& p = sys.params;
  size_t m = sys.G.size();
  std::vector<std::vector<double>> G(m, std::vector<double>(m));
  std::vector<double> chat(m);
  for (size_t i = 0; i < m; ++i) {
    for (size_t j = i; j < m; ++j) {
      Rational g = p.model == Model::pds ? gram_entry_pds(p, sys.G[i], sys.G[j])
                                         : gram_entry_stpca_rescaled(p, sys.G[i], sys.G[j]);
      G[i][j] = G[j][i] = g.convert_to<double>();
    }
    chat[i] = p.model == Model::pds
                  ? sys.c[i].to_double()
                  : (sys.c[i] * Surd::sqrt_of(Rational(sys.G[i].edge_factorial()))).to_double();
  }
  // Gaussian elimination with partial pivoting and relative cutoff
  double maxdiag = 0;
  for (size_t i = 0; i < m; ++i) maxdiag = std::max(maxdiag, std::abs(G[i][i]));
  double cutoff = 1e-10 * std::max(maxdiag, 1e-300);
  size_t row = 0;
  std::vector<int> col_of_row;
  std::vector<double> y = chat;
  for (size_t col = 0; col < m && row < m; ++col) {
    size_t sel = row;
    for (size_t i = row + 1; i < m; ++i)
      if (std::abs(G[i][col]) > std::abs(G[sel][col])) sel = i;
    if (std::abs(G[sel][col]) < cutoff) continue;
    std::swap(G[sel], G[row]);
    std::swap(y[sel], y[row]);
    double inv = 1.0 / G[row][col];
    for (size_t j = col; j < m; ++j) G[row][j] *= inv;
    y[row] *= inv;
    for (size_t i = 0; i < m; ++i) {
      if (i == row || G[i][col] == 0) continue;
      double f = G[i][col];
      for (size_t j = col; j < m; ++j) G[i][j] -= f * G[row][j];
      y[i] -= f * y[row];
    }
    col_of_row.push_back(int(col));
    ++row;
  }
  std::vector<double> w(m, 0.0);
  for (size_t i = 0; i < row; ++i) w[size_t(col_of_row[i])] = y[i];
  double corr2 = 0;
  for (size_t i = 0; i < m; ++i) corr2 += chat[i] * w[i];
  double ex2 = p.rho.convert_to<double>();
  corr2 /= ex2;
  FloatCorrReport rep;
  rep.corr2 = corr2;
  rep.ex2 = ex2;
  rep.mmse = (1 - corr2) * ex2;
  return rep;
}

// ------------------------------------------------- reduction lemma helper

// mu with c_alpha = mu c_{alpha_star}, alpha_star the component of vertex 0
// (or the empty graph); mu = E[phi_{alpha - alpha_star}]
struct Reduction {
  MultiHypergraph alpha_star;
  Surd mu;
};

inline Reduction reduce_to_good(const ExactParams& p, const MultiHypergraph& alpha) {
  Reduction red;
  MultiHypergraph rest = alpha;
  if (alpha.contains_vertex(0)) {
    auto groups = alpha.component_edge_groups();
    for (auto& g : groups) {
      MultiHypergraph comp;
      for (int ei : g) comp.edges.push_back(alpha.edges[ei]);
      if (comp.contains_vertex(0)) {
        red.alpha_star = comp;
        rest = multigraph_minus(alpha, comp);
        break;
      }
    }
  }
  if (p.model == Model::pds) {
    red.mu = Surd(rat_pow(p.rho, int(rest.vertices().size())) *
                  rat_pow(p.q1 - p.q0, rest.total_edges()));
  } else {
    Rational num =
        rat_pow(p.lambda, rest.total_edges()) * rat_pow(p.rho, int(rest.vertices().size()));
    red.mu = Surd(num) / Surd::sqrt_of(Rational(rest.edge_factorial()));
  }
  return red;
}

}  // namespace lowdeg
}  // namespace hypercc
