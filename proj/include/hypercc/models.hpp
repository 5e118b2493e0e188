#pragma once

// Planted models: parameter bundles, priors, samplers, noise symmetrization,
// SNR formulas, and observation storage/serialization.

#include <vector>
#include <string>
#include <fstream>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <optional>

#include "comb.hpp"
#include "rng.hpp"

namespace hypercc {

constexpr double kE = 2.718281828459045235360287471353;

// ---------------------------------------------------------------- parameters

struct PdsParams {
  int n = 0;
  int r = 2;
  double rho = 0;
  double q0 = 0.5;
  double q1 = 0.5;

  void validate() const {
    if (r < 2) throw std::invalid_argument("pds: r must be >= 2");
    if (n < r) throw std::invalid_argument("pds: n must be >= r");
    if (!(rho >= 0 && rho <= 1)) throw std::invalid_argument("pds: rho outside [0,1]");
    if (!(q0 > 0 && q0 < 1)) throw std::invalid_argument("pds: q0 outside (0,1)");
    if (!(q1 >= q0 && q1 <= 1)) throw std::invalid_argument("pds: need q0 <= q1 <= 1");
  }
  double lambda() const { return (q1 - q0) / std::sqrt(q0 * (1 - q0)); }
};

enum class PriorKind { bernoulli, rademacher, gaussian, custom };
enum class NoiseMode { noise_reduced, symmetrized };

struct PriorSpec {
  PriorKind kind = PriorKind::bernoulli;
  double rho = 0;                        // bernoulli only
  Rational rho_exact = 0;                // bernoulli, exact mode
  std::vector<Rational> custom_moments;  // custom: E[pi^t], t = 0,1,...
  std::vector<Rational> custom_abs_moments;

  static PriorSpec bernoulli(double rho, Rational rho_exact = -1) {
    PriorSpec p;
    p.kind = PriorKind::bernoulli;
    p.rho = rho;
    p.rho_exact = (rho_exact >= 0) ? rho_exact : Rational(long(rho * (1 << 24)), 1 << 24);
    return p;
  }
  static PriorSpec rademacher() { return PriorSpec{PriorKind::rademacher}; }
  static PriorSpec gaussian() { return PriorSpec{PriorKind::gaussian}; }

  // E[pi^t], exact
  Rational moment(int t) const {
    if (t == 0) return 1;
    switch (kind) {
      case PriorKind::bernoulli:
        return rho_exact;
      case PriorKind::rademacher:
        return (t % 2 == 0) ? 1 : 0;
      case PriorKind::gaussian: {
        if (t % 2) return 0;
        Rational d = 1;  // (t-1)!!
        for (int i = t - 1; i >= 1; i -= 2) d *= i;
        return d;
      }
      case PriorKind::custom:
        if (t >= int(custom_moments.size()))
          throw std::domain_error("custom prior: moment order not provided");
        return custom_moments[t];
    }
    return 0;
  }

  // Rational enclosure [lo,hi] of E[|pi|^t].  Odd Gaussian absolute moments
  // carry a sqrt(2/pi) factor; everything else is exact (lo == hi).
  std::pair<Rational, Rational> abs_moment_bounds(int t) const {
    if (t == 0) return {1, 1};
    switch (kind) {
      case PriorKind::bernoulli:
        return {rho_exact, rho_exact};
      case PriorKind::rademacher:
        return {1, 1};
      case PriorKind::gaussian: {
        if (t % 2 == 0) {
          Rational m = moment(t);
          return {m, m};
        }
        // E|G|^(2j+1) = 2^j j! sqrt(2/pi)
        int j = (t - 1) / 2;
        Rational base = big_pow(2, j) * big_factorial(j);
        // sqrt(2/pi) in [lo, hi], 30 digits
        Rational lo(BigInt("797884560802865355879892119868"), big_pow(10, 30));
        Rational hi(BigInt("797884560802865355879892119869"), big_pow(10, 30));
        return {base * lo, base * hi};
      }
      case PriorKind::custom:
        if (t >= int(custom_abs_moments.size()))
          throw std::domain_error("custom prior: abs moment order not provided");
        return {custom_abs_moments[t], custom_abs_moments[t]};
    }
    return {0, 0};
  }

  void validate() const {
    if (kind == PriorKind::rademacher || kind == PriorKind::gaussian) {
      if (moment(0) != 1 || moment(1) != 0 || moment(2) != 1)
        throw std::invalid_argument("prior must be mean-0 variance-1");
    }
    if (kind == PriorKind::bernoulli && !(rho >= 0 && rho <= 1))
      throw std::invalid_argument("bernoulli prior: rho outside [0,1]");
  }

  bool sampleable() const { return kind != PriorKind::custom; }
  double sample(Rng& g) const {
    switch (kind) {
      case PriorKind::bernoulli:
        return g.bernoulli(rho) ? 1.0 : 0.0;
      case PriorKind::rademacher:
        return double(g.rademacher());
      case PriorKind::gaussian:
        return g.normal();
      case PriorKind::custom:
        throw std::domain_error("custom prior has no sampler");
    }
    return 0;
  }
};

struct TpcaParams {
  int n = 0;
  int r = 2;
  double lambda = 0;
  PriorSpec prior;
  NoiseMode noise_mode = NoiseMode::noise_reduced;

  void validate() const {
    if (r < 2) throw std::invalid_argument("tpca: r must be >= 2");
    if (n < 1) throw std::invalid_argument("tpca: n must be >= 1");
    if (lambda < 0) throw std::invalid_argument("tpca: lambda must be >= 0");
    prior.validate();
  }
  double rho() const {
    return prior.kind == PriorKind::bernoulli ? prior.rho : 1.0;
  }
};

struct Signal {
  std::vector<double> theta;
  std::vector<int> planted_set() const {
    std::vector<int> s;
    for (size_t i = 0; i < theta.size(); ++i)
      if (theta[i] == 1.0) s.push_back(int(i));
    return s;
  }
};

// --------------------------------------------------------------- observation

enum class ObsKind { hypergraph, tensor };

// Hypergraph payload: one bit per sorted r-subset at its colex rank.
// Tensor payload: one value per sorted r-multiset (symmetric storage).
struct Observation {
  ObsKind kind = ObsKind::hypergraph;
  int n = 0, r = 2;
  NoiseMode noise_mode = NoiseMode::noise_reduced;
  BinomTable bt;
  std::vector<uint8_t> bits;
  std::vector<double> vals;

  static Observation hypergraph(int n, int r) {
    Observation o;
    o.kind = ObsKind::hypergraph;
    o.n = n;
    o.r = r;
    o.bt = BinomTable(n + r, r + 1);
    o.bits.assign(o.bt(n, r), 0);
    return o;
  }
  static Observation tensor(int n, int r, NoiseMode mode) {
    Observation o;
    o.kind = ObsKind::tensor;
    o.n = n;
    o.r = r;
    o.noise_mode = mode;
    o.bt = BinomTable(n + r, r + 1);
    o.vals.assign(o.bt(n + r - 1, r), 0.0);
    return o;
  }

  uint64_t edge_count() const { return bt(n, r); }
  uint64_t subset_rank(const std::vector<int>& sorted) const { return colex_rank(sorted, bt); }
  uint64_t mset_rank(const std::vector<int>& sorted) const { return multiset_rank(sorted, bt); }

  bool edge_present(const std::vector<int>& sorted) const { return bits[subset_rank(sorted)] != 0; }
  double tensor_value(const std::vector<int>& sorted) const { return vals[mset_rank(sorted)]; }
};

// ------------------------------------------------------------------ samplers

namespace stream {
constexpr uint64_t kTheta = 0x11;
constexpr uint64_t kEdge = 0x22;
constexpr uint64_t kPreprocess = 0x33;
constexpr uint64_t kColoring = 0x44;
constexpr uint64_t kFreshNoise = 0x55;
}  // namespace stream

inline Signal sample_theta_bernoulli(int n, double rho, uint64_t seed) {
  Signal s;
  s.theta.resize(n);
  for (int i = 0; i < n; ++i)
    s.theta[i] = Rng::substream(seed, stream::kTheta, i).bernoulli(rho) ? 1.0 : 0.0;
  return s;
}

inline std::pair<Signal, Observation> sample_pds(const PdsParams& p, uint64_t seed) {
  p.validate();
  Signal sig = sample_theta_bernoulli(p.n, p.rho, seed);
  Observation obs = Observation::hypergraph(p.n, p.r);
  for_each_subset(p.n, p.r, [&](const std::vector<int>& e) {
    bool planted = true;
    for (int v : e) planted = planted && (sig.theta[v] == 1.0);
    double pe = planted ? p.q1 : p.q0;
    uint64_t rank = obs.subset_rank(e);
    obs.bits[rank] = Rng::substream(seed, stream::kEdge, rank).bernoulli(pe) ? 1 : 0;
  });
  return {std::move(sig), std::move(obs)};
}

inline BigInt multiplicity_factorial(const std::vector<int>& sorted) {
  BigInt f = 1;
  int run = 1;
  for (size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i] == sorted[i - 1]) ++run;
    else run = 1;
    f *= run;
  }
  return f;
}

inline std::pair<Signal, Observation> sample_general_tpca(const TpcaParams& p, uint64_t seed) {
  p.validate();
  if (!p.prior.sampleable()) throw std::domain_error("prior kind has no sampler");
  Signal sig;
  sig.theta.resize(p.n);
  for (int i = 0; i < p.n; ++i) {
    Rng g = Rng::substream(seed, stream::kTheta, i);
    sig.theta[i] = p.prior.sample(g);
  }
  Observation obs = Observation::tensor(p.n, p.r, p.noise_mode);
  for_each_multiset(p.n, p.r, [&](const std::vector<int>& e) {
    double x = p.lambda;
    for (int v : e) x *= sig.theta[v];
    uint64_t rank = obs.mset_rank(e);
    Rng g = Rng::substream(seed, stream::kEdge, rank);
    double sd = 1.0;
    if (p.noise_mode == NoiseMode::symmetrized) {
      // symmetrized noise at a multiset with multiplicities m_j is
      // N(0, prod m_j!) (the permutation sum collapses onto the distinct
      // rearrangements); entries at distinct multisets stay independent
      sd = std::sqrt(multiplicity_factorial(e).convert_to<double>());
    }
    obs.vals[rank] = x + sd * g.normal();
  });
  return {std::move(sig), std::move(obs)};
}

inline std::pair<Signal, Observation> sample_sparse_tpca(const TpcaParams& p, uint64_t seed) {
  if (p.prior.kind != PriorKind::bernoulli)
    throw std::invalid_argument("sparse tpca requires a bernoulli prior");
  return sample_general_tpca(p, seed);
}

// W given as a flat row-major order-r tensor with n^r entries.
inline Observation symmetrize(const std::vector<double>& w, int n, int r) {
  uint64_t expect = 1;
  for (int i = 0; i < r; ++i) expect *= uint64_t(n);
  if (w.size() != expect) throw std::invalid_argument("symmetrize: W must have n^r entries");
  Observation obs = Observation::tensor(n, r, NoiseMode::symmetrized);
  double scale = 1.0 / std::sqrt(big_factorial(r).convert_to<double>());
  std::vector<int> perm(r);
  for_each_multiset(n, r, [&](const std::vector<int>& e) {
    std::iota(perm.begin(), perm.end(), 0);
    double acc = 0;
    do {
      uint64_t idx = 0;
      for (int j = 0; j < r; ++j) idx = idx * n + e[perm[j]];
      acc += w[idx];
    } while (std::next_permutation(perm.begin(), perm.end()));
    obs.vals[obs.mset_rank(e)] = acc * scale;
  });
  return obs;
}

// ----------------------------------------------------------------------- SNR

struct SnrReport {
  double snr = 0;                  // e/(r-2)! (n rho^2)^(r-1) lambda^2
  double threshold_corrected = 0;  // same with the (1-rho)^(r-1) correction
};

inline double factorial_d(int n) { return big_factorial(n).convert_to<double>(); }

inline SnrReport snr(const PdsParams& p) {
  p.validate();
  double lam = p.lambda();
  double base = kE / factorial_d(p.r - 2) * std::pow(p.n * p.rho * p.rho, p.r - 1) * lam * lam;
  SnrReport rep;
  rep.snr = base;
  rep.threshold_corrected = base / std::pow(1 - p.rho, p.r - 1);
  return rep;
}

inline SnrReport snr(const TpcaParams& p) {
  p.validate();
  double rho = p.rho();
  double base =
      kE / factorial_d(p.r - 2) * std::pow(p.n * rho * rho, p.r - 1) * p.lambda * p.lambda;
  SnrReport rep;
  rep.snr = base;
  rep.threshold_corrected = base / std::pow(1 - rho, p.r - 1);
  return rep;
}

// ------------------------------------------------------------- serialization

// Binary container: magic "HCOB", u32 version, u8 kind, u8 noise, u32 n,
// u32 r, u64 count, payload (packed bits / raw little-endian doubles).
inline void save_observation(const Observation& o, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  const char magic[4] = {'H', 'C', 'O', 'B'};
  f.write(magic, 4);
  uint32_t ver = 1, n = o.n, r = o.r;
  uint8_t kind = o.kind == ObsKind::hypergraph ? 0 : 1;
  uint8_t noise = o.noise_mode == NoiseMode::noise_reduced ? 0 : 1;
  f.write(reinterpret_cast<char*>(&ver), 4);
  f.write(reinterpret_cast<char*>(&kind), 1);
  f.write(reinterpret_cast<char*>(&noise), 1);
  f.write(reinterpret_cast<char*>(&n), 4);
  f.write(reinterpret_cast<char*>(&r), 4);
  if (o.kind == ObsKind::hypergraph) {
    uint64_t cnt = o.bits.size();
    f.write(reinterpret_cast<char*>(&cnt), 8);
    std::vector<uint8_t> packed((cnt + 7) / 8, 0);
    for (uint64_t i = 0; i < cnt; ++i)
      if (o.bits[i]) packed[i >> 3] |= uint8_t(1u << (i & 7));
    f.write(reinterpret_cast<const char*>(packed.data()), std::streamsize(packed.size()));
  } else {
    uint64_t cnt = o.vals.size();
    f.write(reinterpret_cast<char*>(&cnt), 8);
    f.write(reinterpret_cast<const char*>(o.vals.data()), std::streamsize(cnt * 8));
  }
}

inline Observation load_observation(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  char magic[4];
  f.read(magic, 4);
  if (std::string(magic, 4) != "HCOB") throw std::runtime_error("bad observation magic");
  uint32_t ver, n, r;
  uint8_t kind, noise;
  f.read(reinterpret_cast<char*>(&ver), 4);
  if (ver != 1) throw std::runtime_error("unsupported observation version");
  f.read(reinterpret_cast<char*>(&kind), 1);
  f.read(reinterpret_cast<char*>(&noise), 1);
  f.read(reinterpret_cast<char*>(&n), 4);
  f.read(reinterpret_cast<char*>(&r), 4);
  uint64_t cnt;
  NoiseMode nm = noise == 0 ? NoiseMode::noise_reduced : NoiseMode::symmetrized;
  if (kind == 0) {
    Observation o = Observation::hypergraph(int(n), int(r));
    f.read(reinterpret_cast<char*>(&cnt), 8);
    if (cnt != o.bits.size()) throw std::runtime_error("observation size mismatch");
    std::vector<uint8_t> packed((cnt + 7) / 8);
    f.read(reinterpret_cast<char*>(packed.data()), std::streamsize(packed.size()));
    for (uint64_t i = 0; i < cnt; ++i) o.bits[i] = (packed[i >> 3] >> (i & 7)) & 1;
    o.noise_mode = nm;
    return o;
  }
  Observation o = Observation::tensor(int(n), int(r), nm);
  f.read(reinterpret_cast<char*>(&cnt), 8);
  if (cnt != o.vals.size()) throw std::runtime_error("observation size mismatch");
  f.read(reinterpret_cast<char*>(o.vals.data()), std::streamsize(cnt * 8));
  return o;
}

// Textual edge list: "# hypercc-edges v1 kind=<h|t> n=<n> r=<r>", then one
// line per present edge (hypergraph) or per multiset (tensor, with value),
// vertex ids 0-based ascending.
inline void save_edge_list(const Observation& o, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  f << "# hypercc-edges v1 kind=" << (o.kind == ObsKind::hypergraph ? 'h' : 't') << " n=" << o.n
    << " r=" << o.r << "\n";
  char buf[64];
  if (o.kind == ObsKind::hypergraph) {
    for_each_subset(o.n, o.r, [&](const std::vector<int>& e) {
      if (!o.edge_present(e)) return;
      for (size_t i = 0; i < e.size(); ++i) f << (i ? " " : "") << e[i];
      f << "\n";
    });
  } else {
    for_each_multiset(o.n, o.r, [&](const std::vector<int>& e) {
      for (size_t i = 0; i < e.size(); ++i) f << (i ? " " : "") << e[i];
      std::snprintf(buf, sizeof buf, " %.17g", o.tensor_value(e));
      f << buf << "\n";
    });
  }
}

inline void save_signal(const Signal& s, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  char buf[64];
  for (double v : s.theta) {
    if (v == 0.0 || v == 1.0) f << int(v) << "\n";
    else {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      f << buf << "\n";
    }
  }
}

inline Signal load_signal(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  Signal s;
  double v;
  while (f >> v) s.theta.push_back(v);
  return s;
}

}  // namespace hypercc
