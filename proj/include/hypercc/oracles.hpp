#pragma once

// Exhaustive-expectation oracles for the moment systems, independent of the
// closed forms in lowdeg.hpp.  PDS: enumerate every (theta, Y) configuration.
// Sparse tensor PCA: enumerate theta; integrate the Gaussian coordinates via
// explicit polynomial expansion against Gaussian moments.

#include "lowdeg.hpp"

namespace hypercc {
namespace oracles {

using lowdeg::ExactParams;
using lowdeg::Model;
using lowdeg::rat_pow;

// ------------------------------------------------------------- PDS oracle

struct PdsUniverse {
  std::vector<Edge> edges;  // all r-subsets of [n]
  explicit PdsUniverse(int n, int r) {
    for_each_subset(n, r, [&](const std::vector<int>& e) { edges.push_back(e); });
  }
};

// E[ phi_alpha(Y) * theta_0^{use_x} * psi_{beta,gamma} ] enumerating theta
// and integrating each conditionally independent edge exactly
inline Surd pds_exhaustive(const ExactParams& p, const MultiHypergraph& alpha, bool use_x,
                           const MultiHypergraph* beta, uint32_t gamma) {
  PdsUniverse uni(p.n, p.r);
  int N = int(uni.edges.size());
  if (N > 20 || p.n > 10) throw std::length_error("pds_exhaustive: universe too large");
  std::vector<int> a_mult(N, 0), b_mult(N, 0);
  auto fill = [&](const MultiHypergraph& g, std::vector<int>& mult) {
    for (auto& [e, m] : g.edges) {
      auto it = std::find(uni.edges.begin(), uni.edges.end(), e);
      mult[it - uni.edges.begin()] = m;
    }
  };
  fill(alpha, a_mult);
  if (beta) fill(*beta, b_mult);

  Rational q01 = p.q0 * (1 - p.q0);
  Rational q11 = p.q1 * (1 - p.q1);
  Surd total;
  for (uint32_t th = 0; th < (1u << p.n); ++th) {
    Rational pth = 1;
    for (int i = 0; i < p.n; ++i) pth *= (th & (1u << i)) ? p.rho : (1 - p.rho);
    if (use_x && !(th & 1u)) continue;  // theta_0 = 0 kills the term
    std::vector<char> in_ks(N, 0);
    for (int ei = 0; ei < N; ++ei) {
      bool all = true;
      for (int v : uni.edges[ei]) all = all && ((th >> v) & 1);
      in_ks[ei] = all;
    }
    // chi^gamma(theta)
    Surd chis(Rational(1));
    uint32_t g = gamma;
    while (g) {
      int v = __builtin_ctz(g);
      g &= g - 1;
      chis *= lowdeg::chi_value(p, (th >> v) & 1);
    }
    // product over edges of E_{Y_e}[ (Y_e - q0)^{alpha_e} * std_e^{beta_e} ]
    // where std_e normalizes by the edge's own law (q1 inside K_S)
    Surd edgeprod(Rational(1));
    bool zero = false;
    for (int ei = 0; ei < N && !zero; ++ei) {
      int am = a_mult[ei], bm = b_mult[ei];
      if (am == 0 && bm == 0) continue;
      Rational pe = in_ks[ei] ? p.q1 : p.q0;
      Rational qe = in_ks[ei] ? q11 : q01;
      // E over Y_e in {0,1}: value at 1 with prob pe, at 0 with prob 1-pe
      Surd inv_norm = bm > 0 ? (Surd(Rational(1)) / Surd::sqrt_pow(qe, bm)) : Surd(Rational(1));
      Surd at1 = Surd(rat_pow(1 - p.q0, am) * rat_pow(1 - pe, bm)) * inv_norm;
      Surd at0 = Surd(rat_pow(-p.q0, am) * rat_pow(-pe, bm)) * inv_norm;
      Surd ev = Surd(pe) * at1 + Surd(1 - pe) * at0;
      if (ev.is_zero()) zero = true;
      edgeprod *= ev;
    }
    if (zero) continue;
    total += Surd(pth) * chis * edgeprod;
  }
  return total;
}

inline Surd pds_c_oracle(const ExactParams& p, const MultiHypergraph& alpha) {
  return pds_exhaustive(p, alpha, true, nullptr, 0);
}
inline Surd pds_m_oracle(const ExactParams& p, const MultiHypergraph& beta, uint32_t gamma,
                         const MultiHypergraph& alpha) {
  return pds_exhaustive(p, alpha, false, &beta, gamma);
}

// Fully joint enumeration over (theta, Y) in {0,1}^n x {0,1}^N; slower than
// pds_exhaustive but does not even use conditional edge independence.
inline Surd pds_exhaustive_joint(const ExactParams& p, const MultiHypergraph& alpha, bool use_x,
                                 const MultiHypergraph* beta, uint32_t gamma) {
  PdsUniverse uni(p.n, p.r);
  int N = int(uni.edges.size());
  if (N > 14 || p.n > 8) throw std::length_error("pds_exhaustive_joint: universe too large");
  std::vector<int> a_mult(N, 0), b_mult(N, 0);
  auto fill = [&](const MultiHypergraph& g, std::vector<int>& mult) {
    for (auto& [e, m] : g.edges) {
      auto it = std::find(uni.edges.begin(), uni.edges.end(), e);
      mult[it - uni.edges.begin()] = m;
    }
  };
  fill(alpha, a_mult);
  if (beta) fill(*beta, b_mult);
  Rational q01 = p.q0 * (1 - p.q0);
  Rational q11 = p.q1 * (1 - p.q1);
  Surd total;
  for (uint32_t th = 0; th < (1u << p.n); ++th) {
    Rational pth = 1;
    for (int i = 0; i < p.n; ++i) pth *= (th & (1u << i)) ? p.rho : (1 - p.rho);
    if (use_x && !(th & 1u)) continue;
    Surd chis(Rational(1));
    uint32_t g = gamma;
    while (g) {
      int v = __builtin_ctz(g);
      g &= g - 1;
      chis *= lowdeg::chi_value(p, (th >> v) & 1);
    }
    std::vector<char> in_ks(N, 0);
    for (int ei = 0; ei < N; ++ei) {
      bool all = true;
      for (int v : uni.edges[ei]) all = all && ((th >> v) & 1);
      in_ks[ei] = all;
    }
    for (uint32_t yy = 0; yy < (1u << N); ++yy) {
      Rational py = 1;
      Surd val(Rational(1));
      for (int ei = 0; ei < N; ++ei) {
        bool ye = (yy >> ei) & 1;
        Rational pe = in_ks[ei] ? p.q1 : p.q0;
        py *= ye ? pe : (1 - pe);
        if (a_mult[ei]) val *= Surd(rat_pow((ye ? 1 : 0) - p.q0, a_mult[ei]));
        if (b_mult[ei]) {
          Rational qe = in_ks[ei] ? p.q1 : p.q0;
          Rational qvar = in_ks[ei] ? q11 : q01;
          val *= Surd(rat_pow((ye ? 1 : 0) - qe, b_mult[ei])) / Surd::sqrt_pow(qvar, b_mult[ei]);
        }
      }
      if (py == 0) continue;
      total += Surd(pth * py) * chis * val;
    }
  }
  return total;
}

// ------------------------------------------------ sparse tensor PCA oracle

// probabilists' Hermite He_j, integer coefficients, via the three-term
// recurrence He_{j+1} = x He_j - j He_{j-1}
inline std::vector<std::vector<Rational>> hermite_he(int jmax) {
  std::vector<std::vector<Rational>> he(jmax + 1);
  he[0] = {1};
  if (jmax >= 1) he[1] = {0, 1};
  for (int j = 1; j < jmax; ++j) {
    std::vector<Rational> next(j + 2, 0);
    for (size_t t = 0; t < he[j].size(); ++t) next[t + 1] += he[j][t];
    for (size_t t = 0; t < he[j - 1].size(); ++t) next[t] -= Rational(j) * he[j - 1][t];
    he[j + 1] = next;
  }
  return he;
}

// E[G^t] for G ~ N(0,1): (t-1)!! for even t, else 0
inline Rational gaussian_moment(int t) {
  if (t % 2) return 0;
  Rational d = 1;
  for (int i = t - 1; i >= 1; i -= 2) d *= i;
  return d;
}

// E_z[ h_a(x + z) h_b(z) ] with z ~ N(0,1), x rational, h normalized
inline Surd hermite_pair_integral(int a, int b, const Rational& x,
                                  const std::vector<std::vector<Rational>>& he) {
  // He_a(x + z) = sum_t coeff_t z^t with coeff depending on x
  std::vector<Rational> shifted(a + 1, 0);
  for (int t = 0; t <= a; ++t) {
    if (he[a][t] == 0) continue;
    // (x+z)^t
    Rational xp = 1;
    for (int j = t; j >= 0; --j) {
      shifted[j] += he[a][t] * Rational(big_binomial(t, j)) * xp;
      xp *= x;
    }
  }
  Rational acc = 0;
  for (int s = 0; s <= a; ++s) {
    if (shifted[s] == 0) continue;
    for (int u = 0; u <= b; ++u) {
      if (he[b][u] == 0) continue;
      acc += shifted[s] * he[b][u] * gaussian_moment(s + u);
    }
  }
  return Surd(acc) / Surd::sqrt_of(Rational(big_factorial(a) * big_factorial(b)));
}

// E[ H_alpha(Y) * theta_0^{use_x} * H_beta(Z) chi^gamma ] by enumerating
// theta and integrating the per-entry Gaussians exactly
inline Surd stpca_exhaustive(const ExactParams& p, const MultiHypergraph& alpha, bool use_x,
                             const MultiHypergraph* beta, uint32_t gamma) {
  if (p.n > 10) throw std::length_error("stpca_exhaustive: n too large");
  // collect the multiset-edge types touched
  std::map<Edge, std::pair<int, int>> mult;  // edge -> (alpha_e, beta_e)
  for (auto& [e, m] : alpha.edges) mult[e].first = m;
  if (beta)
    for (auto& [e, m] : beta->edges) mult[e].second = m;
  int amax = 0;
  for (auto& [e, ab] : mult) amax = std::max({amax, ab.first, ab.second});
  auto he = hermite_he(amax);

  Surd total;
  for (uint32_t th = 0; th < (1u << p.n); ++th) {
    Rational pth = 1;
    for (int i = 0; i < p.n; ++i) pth *= (th & (1u << i)) ? p.rho : (1 - p.rho);
    if (use_x && !(th & 1u)) continue;
    Surd chis(Rational(1));
    uint32_t g = gamma;
    while (g) {
      int v = __builtin_ctz(g);
      g &= g - 1;
      chis *= lowdeg::chi_value(p, (th >> v) & 1);
    }
    Surd prod(Rational(1));
    bool zero = false;
    for (auto& [e, ab] : mult) {
      Rational x = p.lambda;
      for (int v : e) x *= ((th >> v) & 1) ? 1 : 0;
      Surd ev = hermite_pair_integral(ab.first, ab.second, x, he);
      if (ev.is_zero()) { zero = true; break; }
      prod *= ev;
    }
    if (zero) continue;
    total += Surd(pth) * chis * prod;
  }
  return total;
}

inline Surd stpca_c_oracle(const ExactParams& p, const MultiHypergraph& alpha) {
  return stpca_exhaustive(p, alpha, true, nullptr, 0);
}
inline Surd stpca_m_oracle(const ExactParams& p, const MultiHypergraph& beta, uint32_t gamma,
                           const MultiHypergraph& alpha) {
  return stpca_exhaustive(p, alpha, false, &beta, gamma);
}

inline Surd c_oracle(const ExactParams& p, const MultiHypergraph& alpha) {
  return p.model == Model::pds ? pds_c_oracle(p, alpha) : stpca_c_oracle(p, alpha);
}
inline Surd m_oracle(const ExactParams& p, const MultiHypergraph& beta, uint32_t gamma,
                     const MultiHypergraph& alpha) {
  return p.model == Model::pds ? pds_m_oracle(p, beta, gamma, alpha)
                               : stpca_m_oracle(p, beta, gamma, alpha);
}

}  // namespace oracles
}  // namespace hypercc
