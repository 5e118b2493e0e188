#include <catch2/catch_amalgamated.hpp>

#include <filesystem>

#include "hypercc/models.hpp"

using namespace hypercc;

TEST_CASE("pds sampler degenerate and deterministic") {
  // rho=1, q0=q1=1 -> complete hypergraph, theta all ones
  {
    PdsParams p{6, 3, 1.0, 0.999999, 1.0};
    p.q0 = 0.5;
    p.q1 = 1.0;
    auto [sig, obs] = sample_pds(p, 9);
    for (double t : sig.theta) CHECK(t == 1.0);
    for (auto b : obs.bits) CHECK(b == 1);
  }
  // rho=0 -> theta zero
  {
    PdsParams p{6, 2, 0.0, 0.3, 0.9};
    auto [sig, obs] = sample_pds(p, 9);
    for (double t : sig.theta) CHECK(t == 0.0);
  }
  // determinism: identical seeds give bitwise-identical draws
  PdsParams p{15, 2, 0.4, 0.2, 0.7};
  auto [s1, o1] = sample_pds(p, 1234);
  auto [s2, o2] = sample_pds(p, 1234);
  CHECK(s1.theta == s2.theta);
  CHECK(o1.bits == o2.bits);
  auto [s3, o3] = sample_pds(p, 1235);
  CHECK(o1.bits != o3.bits);

  CHECK_THROWS_AS(sample_pds(PdsParams{3, 2, 1.5, 0.2, 0.7}, 1), std::invalid_argument);
  CHECK_THROWS_AS(sample_pds(PdsParams{1, 2, 0.5, 0.2, 0.7}, 1), std::invalid_argument);
}

TEST_CASE("pds empirical edge frequency inside the planted block") {
  PdsParams p{8, 2, 0.5, 0.2, 0.8};
  long inside_present = 0, inside_total = 0;
  for (uint64_t seed = 0; seed < 4000; ++seed) {
    auto [sig, obs] = sample_pds(p, seed);
    for_each_subset(p.n, p.r, [&](const std::vector<int>& e) {
      bool planted = true;
      for (int v : e) planted = planted && (sig.theta[v] == 1.0);
      if (!planted) return;
      ++inside_total;
      inside_present += obs.edge_present(e);
    });
  }
  double freq = double(inside_present) / double(inside_total);
  double sigma = std::sqrt(p.q1 * (1 - p.q1) / double(inside_total));
  CHECK(std::abs(freq - p.q1) < 3 * sigma + 1e-12);
}

TEST_CASE("pds conditional edge independence") {
  // empirical covariance of two distinct edges given theta is ~0
  PdsParams p{6, 2, 0.5, 0.3, 0.8};
  std::vector<int> e1 = {0, 1}, e2 = {2, 3};
  long n11 = 0, n1 = 0, n2 = 0, total = 0;
  for (uint64_t seed = 0; seed < 20000; ++seed) {
    auto [sig, obs] = sample_pds(p, seed);
    // condition on a fixed theta pattern so the edge laws are fixed
    if (sig.theta[0] != 1 || sig.theta[1] != 1 || sig.theta[2] != 1 || sig.theta[3] != 0) continue;
    ++total;
    bool a = obs.edge_present(e1), b = obs.edge_present(e2);
    n11 += a && b;
    n1 += a;
    n2 += b;
  }
  REQUIRE(total > 500);
  double cov = double(n11) / total - double(n1) / total * double(n2) / total;
  CHECK(std::abs(cov) < 3.0 / std::sqrt(double(total)));
}

TEST_CASE("tpca samplers") {
  // lambda = 0: pure noise, mean ~ 0, variance ~ 1 on distinct entries
  TpcaParams p;
  p.n = 6;
  p.r = 3;
  p.lambda = 0;
  p.prior = PriorSpec::bernoulli(0.3);
  for (auto mode : {NoiseMode::noise_reduced, NoiseMode::symmetrized}) {
    p.noise_mode = mode;
    double s = 0, s2 = 0;
    long cnt = 0;
    for (uint64_t seed = 0; seed < 600; ++seed) {
      auto [sig, obs] = sample_sparse_tpca(p, seed);
      for_each_subset(p.n, p.r, [&](const std::vector<int>& e) {
        double v = obs.tensor_value(e);
        s += v;
        s2 += v * v;
        ++cnt;
      });
    }
    CHECK(std::abs(s / cnt) < 0.03);
    CHECK(std::abs(s2 / cnt - 1.0) < 0.05);
  }
  // all-equal-index entry variance r! in symmetrized mode
  {
    p.noise_mode = NoiseMode::symmetrized;
    double s2 = 0;
    long trials = 20000;
    std::vector<int> diag = {2, 2, 2};
    for (uint64_t seed = 0; seed < uint64_t(trials); ++seed) {
      auto [sig, obs] = sample_sparse_tpca(p, seed);
      double v = obs.tensor_value(diag);
      s2 += v * v;
    }
    double rf = 6.0;  // 3!
    CHECK(std::abs(s2 / trials - rf) < 5 * rf / std::sqrt(double(trials)) + 0.1);
  }
  // mean of an entry fully inside the planted set is ~ lambda at rho = 1
  {
    TpcaParams q = p;
    q.lambda = 1.5;
    q.prior = PriorSpec::bernoulli(1.0);
    q.noise_mode = NoiseMode::noise_reduced;
    double s = 0;
    long trials = 4000;
    std::vector<int> e = {0, 1, 2};
    for (uint64_t seed = 0; seed < uint64_t(trials); ++seed) {
      auto [sig, obs] = sample_sparse_tpca(q, seed);
      s += obs.tensor_value(e);
    }
    CHECK(std::abs(s / trials - q.lambda) < 3.0 / std::sqrt(double(trials)));
  }
  // rademacher prior: entries of theta in {-1, +1}, empirical moments
  {
    TpcaParams g;
    g.n = 400;
    g.r = 2;
    g.lambda = 0.5;
    g.prior = PriorSpec::rademacher();
    auto [sig, obs] = sample_general_tpca(g, 3);
    double m1 = 0, m2 = 0;
    for (double t : sig.theta) {
      CHECK((t == 1.0 || t == -1.0));
      m1 += t;
      m2 += t * t;
    }
    CHECK(std::abs(m1 / g.n) < 3.0 / std::sqrt(double(g.n)));
    CHECK(m2 / g.n == 1.0);
  }
  // custom prior has no sampler
  {
    TpcaParams c;
    c.n = 3;
    c.r = 2;
    c.lambda = 1;
    c.prior.kind = PriorKind::custom;
    c.prior.custom_moments = {1, 0, 1};
    CHECK_THROWS_AS(sample_general_tpca(c, 1), std::domain_error);
  }
}

TEST_CASE("symmetrize formula") {
  // r=2, W=[[0,1],[2,0]] -> off-diagonal (1+2)/sqrt(2)
  std::vector<double> w = {0, 1, 2, 0};
  auto obs = symmetrize(w, 2, 2);
  CHECK(obs.tensor_value({0, 1}) == Catch::Approx((1.0 + 2.0) / std::sqrt(2.0)));
  CHECK(obs.tensor_value({0, 0}) == Catch::Approx(0.0));
  // W = 0 -> 0
  std::vector<double> z(8, 0.0);
  auto zz = symmetrize(z, 2, 3);
  for (double v : zz.vals) CHECK(v == 0.0);
  // already-symmetric W with distinct indices scales by sqrt(r!)
  std::vector<double> sym(27);
  auto idx = [&](int a, int b, int c) { return (a * 3 + b) * 3 + c; };
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c) {
        std::array<int, 3> s{a, b, c};
        std::sort(s.begin(), s.end());
        sym[idx(a, b, c)] = 100 * s[0] + 10 * s[1] + s[2] + 1;
      }
  auto so = symmetrize(sym, 3, 3);
  CHECK(so.tensor_value({0, 1, 2}) == Catch::Approx(std::sqrt(6.0) * 13.0));
  // applying the permutation average twice equals applying it once
  std::vector<double> rnd(27);
  Rng g(4);
  for (auto& v : rnd) v = g.normal();
  auto once = symmetrize(rnd, 3, 3);
  // scale back by sqrt(r!) to make it the plain average P, then re-apply
  std::vector<double> pw(27);
  double isq = 1.0 / std::sqrt(6.0);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c) {
        std::vector<int> s{a, b, c};
        std::sort(s.begin(), s.end());
        pw[idx(a, b, c)] = once.tensor_value(s) * isq;  // P(rnd) entries
      }
  auto twice = symmetrize(pw, 3, 3);
  for_each_multiset(3, 3, [&](const std::vector<int>& e) {
    CHECK(twice.tensor_value(e) == Catch::Approx(once.tensor_value(e)).margin(1e-12));
  });
}

TEST_CASE("snr formulas") {
  // q1 = q0 -> SNR 0
  CHECK(snr(PdsParams{100, 2, 0.2, 0.5, 0.5}).snr == 0.0);
  // r=2, n=100, rho=0.2: SNR = e * (n rho^2) * lambda^2
  PdsParams p{100, 2, 0.2, 0.5, 0.6};
  double lam = p.lambda();
  CHECK(snr(p).snr == Catch::Approx(kE * 4.0 * lam * lam));
  CHECK(snr(p).threshold_corrected == Catch::Approx(kE * 4.0 * lam * lam / 0.8));
  // asymmetric-model identity: substituting sqrt(r!) lambda multiplies the
  // tpca SNR by r!/(r-2)!... = r(r-1)
  TpcaParams t;
  t.n = 50;
  t.r = 3;
  t.lambda = 0.2;
  t.prior = PriorSpec::bernoulli(0.3);
  TpcaParams t2 = t;
  t2.lambda = t.lambda * std::sqrt(6.0);
  CHECK(snr(t2).snr == Catch::Approx(snr(t).snr * 6.0));
}

TEST_CASE("noise model correspondence on distinct entries") {
  // (a) exact-law content: distinct-index entries under the symmetrized mode
  // match the noise-reduced law N(lambda theta^V, 1); MC mean/second moment
  TpcaParams base;
  base.n = 5;
  base.r = 3;
  base.lambda = 0.8;
  base.prior = PriorSpec::bernoulli(0.4);
  std::vector<int> e = {0, 2, 4};
  long trials = 20000;
  double m_nr = 0, m_sy = 0, v_nr = 0, v_sy = 0;
  for (uint64_t seed = 0; seed < uint64_t(trials); ++seed) {
    TpcaParams a = base;
    a.noise_mode = NoiseMode::noise_reduced;
    auto [s1, o1] = sample_sparse_tpca(a, seed);
    TpcaParams b = base;
    b.noise_mode = NoiseMode::symmetrized;
    auto [s2, o2] = sample_sparse_tpca(b, seed + 777777);
    m_nr += o1.tensor_value(e);
    v_nr += o1.tensor_value(e) * o1.tensor_value(e);
    m_sy += o2.tensor_value(e);
    v_sy += o2.tensor_value(e) * o2.tensor_value(e);
  }
  double se = 3.0 / std::sqrt(double(trials));
  CHECK(std::abs(m_nr / trials - m_sy / trials) < 3 * se);
  CHECK(std::abs(v_nr / trials - v_sy / trials) < 10 * se);

  // (b) lambda_sy = sqrt(r!) lambda: degree-1 statistics of the asymmetric
  // model match g(Ysy) = Ysy/sqrt(r!) moments in mean and signal correlation
  double lam = 0.3, rho = 0.5;
  int trials2 = 20000;
  double mean_asym = 0, mean_sy = 0, cor_asym = 0, cor_sy = 0, second_asym = 0, second_sy = 0;
  for (uint64_t seed = 0; seed < uint64_t(trials2); ++seed) {
    Rng g = Rng::substream(seed, 1);
    double th0 = g.bernoulli(rho), th1 = g.bernoulli(rho);
    double w01 = g.normal(), w10 = g.normal();
    double y_asym = lam * th0 * th1 + w01;  // one distinct-index entry
    double y_sy = std::sqrt(2.0) * lam * th0 * th1 + (w01 + w10) / std::sqrt(2.0);
    double gval = y_sy / std::sqrt(2.0);
    mean_asym += y_asym;
    mean_sy += gval;
    cor_asym += y_asym * th0;
    cor_sy += gval * th0;
    second_asym += y_asym * y_asym;
    second_sy += gval * gval;
  }
  double se2 = 3.0 / std::sqrt(double(trials2));
  CHECK(std::abs(mean_asym / trials2 - mean_sy / trials2) < se2);
  CHECK(std::abs(cor_asym / trials2 - cor_sy / trials2) < se2);
  // Jensen direction: E[g^2] <= E[f^2]
  CHECK(second_sy / trials2 <= second_asym / trials2 + se2);
}

TEST_CASE("observation serialization") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "hypercc-test-io";
  fs::create_directories(dir);
  {
    PdsParams p{10, 2, 0.4, 0.3, 0.8};
    auto [sig, obs] = sample_pds(p, 5);
    save_observation(obs, (dir / "h.bin").string());
    auto back = load_observation((dir / "h.bin").string());
    CHECK(back.kind == ObsKind::hypergraph);
    CHECK(back.n == obs.n);
    CHECK(back.bits == obs.bits);
    save_signal(sig, (dir / "h.sig").string());
    auto sigback = load_signal((dir / "h.sig").string());
    CHECK(sigback.theta == sig.theta);
    save_edge_list(obs, (dir / "h.txt").string());
    std::ifstream f((dir / "h.txt").string());
    std::string header;
    std::getline(f, header);
    CHECK(header.rfind("# hypercc-edges v1 kind=h", 0) == 0);
  }
  {
    TpcaParams p;
    p.n = 5;
    p.r = 3;
    p.lambda = 0.7;
    p.prior = PriorSpec::bernoulli(0.4);
    auto [sig, obs] = sample_sparse_tpca(p, 5);
    save_observation(obs, (dir / "t.bin").string());
    auto back = load_observation((dir / "t.bin").string());
    CHECK(back.kind == ObsKind::tensor);
    CHECK(back.vals == obs.vals);
  }
  fs::remove_all(dir);
}
