#pragma once

// Experiment orchestration: flat key-value configs, seeded sweeps across an
// SNR grid with a worker pool and ordered crash-safe row output, recovery
// quality metrics, plot-data emission, and the one-shot verification runner.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <functional>
#include <mutex>
#include <condition_variable>

#include "colorcode.hpp"
#include "treepoly.hpp"
#include "oracles.hpp"
#include "conditional.hpp"
#include "cumulants.hpp"

namespace hypercc {
namespace harness {

// ------------------------------------------------------------------ config

struct KvConfig {
  std::map<std::string, std::map<std::string, std::string>> sections;

  static KvConfig parse_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open config " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse(ss.str());
  }

  static KvConfig parse(const std::string& text) {
    KvConfig cfg;
    std::string section = "";
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
      auto hash = line.find('#');
      if (hash != std::string::npos) line = line.substr(0, hash);
      auto trim = [](std::string s) {
        size_t a = s.find_first_not_of(" \t\r");
        if (a == std::string::npos) return std::string();
        size_t b = s.find_last_not_of(" \t\r");
        return s.substr(a, b - a + 1);
      };
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[' && line.back() == ']') {
        section = trim(line.substr(1, line.size() - 2));
        continue;
      }
      auto eq = line.find('=');
      if (eq == std::string::npos) throw std::runtime_error("config: bad line: " + line);
      cfg.sections[section][trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return cfg;
  }

  std::string get(const std::string& sec, const std::string& key, const std::string& dflt) const {
    auto s = sections.find(sec);
    if (s == sections.end()) return dflt;
    auto k = s->second.find(key);
    return k == s->second.end() ? dflt : k->second;
  }
  bool has(const std::string& sec, const std::string& key) const {
    auto s = sections.find(sec);
    return s != sections.end() && s->second.count(key);
  }
};

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string tok;
  while (std::getline(is, tok, ',')) {
    size_t a = tok.find_first_not_of(" \t");
    size_t b = tok.find_last_not_of(" \t");
    if (a != std::string::npos) out.push_back(tok.substr(a, b - a + 1));
  }
  return out;
}

inline std::vector<double> parse_doubles(const std::string& s) {
  std::vector<double> out;
  for (auto& t : split_list(s)) out.push_back(std::stod(t));
  return out;
}

// "1..20" expands to 1,2,...,20; otherwise a comma list
inline std::vector<uint64_t> parse_seeds(const std::string& s) {
  auto dots = s.find("..");
  std::vector<uint64_t> out;
  if (dots != std::string::npos) {
    uint64_t a = std::stoull(s.substr(0, dots));
    uint64_t b = std::stoull(s.substr(dots + 2));
    for (uint64_t v = a; v <= b; ++v) out.push_back(v);
    return out;
  }
  for (auto& t : split_list(s)) out.push_back(std::stoull(t));
  return out;
}

struct ExperimentConfig {
  std::string model = "pds";  // pds | stpca
  int r = 2;
  std::vector<int> n_grid;
  std::vector<double> rho_grid;          // absolute values ...
  double rho_exponent = 0;               // ... or rho = n^rho_exponent when set
  bool use_rho_exponent = false;
  std::vector<double> q0_grid{0.1};
  std::vector<double> snr_grid;          // q1 (or lambda) derived per point
  std::vector<double> q1_grid;           // alternative to snr for pds
  std::vector<double> lambda_grid;       // alternative to snr for stpca
  double eps = 0.2;
  int ell = -1;
  long trials = -1;
  int workers = 0;
  std::vector<uint64_t> seeds{1};
  std::string out_dir = "sweep-out";

  static ExperimentConfig from(const KvConfig& kv) {
    ExperimentConfig c;
    c.model = kv.get("model", "kind", "pds");
    c.r = std::stoi(kv.get("model", "r", "2"));
    for (auto& t : split_list(kv.get("grid", "n", ""))) c.n_grid.push_back(std::stoi(t));
    if (kv.has("grid", "rho_exponent")) {
      c.use_rho_exponent = true;
      c.rho_exponent = std::stod(kv.get("grid", "rho_exponent", "0"));
    }
    if (kv.has("grid", "rho")) c.rho_grid = parse_doubles(kv.get("grid", "rho", ""));
    if (kv.has("grid", "q0")) c.q0_grid = parse_doubles(kv.get("grid", "q0", ""));
    if (kv.has("grid", "snr")) c.snr_grid = parse_doubles(kv.get("grid", "snr", ""));
    if (kv.has("grid", "q1")) c.q1_grid = parse_doubles(kv.get("grid", "q1", ""));
    if (kv.has("grid", "lambda")) c.lambda_grid = parse_doubles(kv.get("grid", "lambda", ""));
    c.eps = std::stod(kv.get("recovery", "eps", "0.2"));
    c.ell = std::stoi(kv.get("recovery", "ell", "-1"));
    c.trials = std::stol(kv.get("recovery", "trials", "-1"));
    c.workers = std::stoi(kv.get("recovery", "workers", "0"));
    if (kv.has("recovery", "seeds")) c.seeds = parse_seeds(kv.get("recovery", "seeds", "1"));
    c.out_dir = kv.get("output", "dir", "sweep-out");
    if (c.n_grid.empty()) throw std::runtime_error("config: empty n grid");
    if (c.seeds.empty()) throw std::runtime_error("config: need at least one seed");
    return c;
  }
};

// ------------------------------------------------------------------ metrics

struct OverlapMetrics {
  int sym_diff = 0;
  double normalized = 0;
};

inline OverlapMetrics overlap_metrics(const std::vector<int>& s, const std::vector<int>& s_hat,
                                      int n, double rho) {
  std::set<int> a(s.begin(), s.end()), b(s_hat.begin(), s_hat.end());
  int diff = 0;
  for (int v : a)
    if (!b.count(v)) ++diff;
  for (int v : b)
    if (!a.count(v)) ++diff;
  OverlapMetrics m;
  m.sym_diff = diff;
  m.normalized = n * rho > 0 ? diff / (n * rho) : 0.0;
  return m;
}

// --------------------------------------------------------------------- rows

struct ResultRow {
  int grid_index = 0;
  std::string model;
  int n = 0, r = 0;
  double rho = 0, q0 = 0, q1 = 0, lambda = 0, snr = 0, eps = 0;
  int ell = 0;
  long trials = 0;
  uint64_t seed = 0;
  int sym_diff = 0;
  double normalized = 0;
  double lambda_star = 0;
  bool preprocessed = false;
  double secs_preprocess = 0, secs_dp = 0, secs_total = 0;
  std::string error;
};

inline std::string row_header() {
  return "grid_index,model,n,r,rho,q0,q1,lambda,snr,eps,ell,trials,seed,"
         "sym_diff,normalized,lambda_star,preprocessed,secs_preprocess,secs_dp,secs_total,error";
}

inline std::string row_csv(const ResultRow& w) {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "%d,%s,%d,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d,%ld,%llu,%d,%.17g,%.17g,%d,"
                "%.6f,%.6f,%.6f,%s",
                w.grid_index, w.model.c_str(), w.n, w.r, w.rho, w.q0, w.q1, w.lambda, w.snr, w.eps,
                w.ell, w.trials, (unsigned long long)w.seed, w.sym_diff, w.normalized,
                w.lambda_star, int(w.preprocessed), w.secs_preprocess, w.secs_dp, w.secs_total,
                w.error.c_str());
  return buf;
}

// ------------------------------------------------------------------- sweeps

struct GridPoint {
  int index = 0;
  int n = 0;
  double rho = 0, q0 = 0, q1 = 0, lambda = 0, snr = 0;
};

inline std::vector<GridPoint> expand_grid(const ExperimentConfig& c) {
  std::vector<GridPoint> pts;
  int idx = 0;
  for (int n : c.n_grid) {
    std::vector<double> rhos = c.rho_grid;
    if (c.use_rho_exponent) rhos = {std::pow(double(n), c.rho_exponent)};
    if (rhos.empty()) throw std::runtime_error("config: no rho specification");
    for (double rho : rhos) {
      for (double q0 : c.q0_grid) {
        auto push = [&](double q1, double lambda, double snr) {
          GridPoint g;
          g.index = idx++;
          g.n = n;
          g.rho = rho;
          g.q0 = q0;
          g.q1 = q1;
          g.lambda = lambda;
          g.snr = snr;
          pts.push_back(g);
        };
        double scale = kE / factorial_d(c.r - 2) * std::pow(n * rho * rho, c.r - 1);
        if (!c.snr_grid.empty()) {
          for (double snr : c.snr_grid) {
            double lam2 = snr / scale;
            if (c.model == "pds") {
              double q1 = q0 + std::sqrt(lam2 * q0 * (1 - q0));
              if (q1 > 1) q1 = 1;
              push(q1, 0, snr);
            } else {
              push(0, std::sqrt(lam2), snr);
            }
          }
        } else if (c.model == "pds") {
          for (double q1 : c.q1_grid) {
            double lam = (q1 - q0) / std::sqrt(q0 * (1 - q0));
            push(q1, 0, scale * lam * lam);
          }
        } else {
          for (double lam : c.lambda_grid) push(0, lam, scale * lam * lam);
        }
      }
    }
  }
  return pts;
}

inline ResultRow run_one(const ExperimentConfig& c, const GridPoint& g, uint64_t seed) {
  ResultRow row;
  row.grid_index = g.index;
  row.model = c.model;
  row.n = g.n;
  row.r = c.r;
  row.rho = g.rho;
  row.q0 = g.q0;
  row.q1 = g.q1;
  row.lambda = g.lambda;
  row.snr = g.snr;
  row.eps = c.eps;
  row.seed = seed;
  auto t0 = std::chrono::steady_clock::now();
  try {
    RecoveryConfig rc;
    rc.eps = c.eps;
    rc.ell_override = c.ell;
    rc.t_override = c.trials;
    rc.seed = seed;
    rc.workers = 1;  // grid points already run in parallel
    RecoveryResult res;
    std::vector<int> planted;
    if (c.model == "pds") {
      PdsParams p{g.n, c.r, g.rho, g.q0, g.q1};
      auto [sig, obs] = sample_pds(p, seed);
      planted = sig.planted_set();
      res = recover_pds(obs, p, rc);
    } else {
      TpcaParams p;
      p.n = g.n;
      p.r = c.r;
      p.lambda = g.lambda;
      p.prior = PriorSpec::bernoulli(g.rho);
      p.noise_mode = NoiseMode::noise_reduced;
      auto [sig, obs] = sample_sparse_tpca(p, seed);
      planted = sig.planted_set();
      res = recover_stpca(obs, p, rc);
    }
    auto m = overlap_metrics(planted, res.s_hat, g.n, g.rho);
    row.sym_diff = m.sym_diff;
    row.normalized = m.normalized;
    row.ell = res.score.ell;
    row.trials = res.score.t;
    row.lambda_star = res.score.lambda_star;
    row.preprocessed = res.score.preprocessed;
    row.secs_preprocess = res.score.secs_preprocess;
    row.secs_dp = res.score.secs_dp;
  } catch (const std::exception& e) {
    row.error = e.what();
  }
  row.secs_total = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return row;
}

// rows come back in (grid index, seed index) order regardless of scheduling;
// the writer flushes after every row so a crash loses at most the row in
// flight
inline std::vector<ResultRow> run_sweep(const ExperimentConfig& c, const std::string& out_csv) {
  auto pts = expand_grid(c);
  struct Task {
    GridPoint g;
    uint64_t seed;
  };
  std::vector<Task> tasks;
  for (auto& g : pts)
    for (uint64_t s : c.seeds) tasks.push_back({g, s});

  std::ofstream out;
  if (!out_csv.empty()) {
    std::filesystem::create_directories(std::filesystem::path(out_csv).parent_path().empty()
                                            ? "."
                                            : std::filesystem::path(out_csv).parent_path());
    out.open(out_csv);
    if (!out) throw std::runtime_error("cannot open " + out_csv);
    out << row_header() << "\n";
    out.flush();
  }

  std::vector<ResultRow> rows(tasks.size());
  std::vector<char> ready(tasks.size(), 0);
  std::mutex mu;
  std::atomic<size_t> next(0);
  size_t written = 0;

  int nw = c.workers > 0 ? c.workers : int(std::thread::hardware_concurrency());
  nw = std::max(1, std::min<int>(nw, int(tasks.size())));
  auto work = [&]() {
    while (true) {
      size_t i = next.fetch_add(1);
      if (i >= tasks.size()) break;
      ResultRow row = run_one(c, tasks[i].g, tasks[i].seed);
      std::lock_guard<std::mutex> lock(mu);
      rows[i] = std::move(row);
      ready[i] = 1;
      while (written < tasks.size() && ready[written]) {
        if (out.is_open()) {
          out << row_csv(rows[written]) << "\n";
          out.flush();
        }
        ++written;
      }
    }
  };
  std::vector<std::thread> threads;
  for (int w = 0; w < nw; ++w) threads.emplace_back(work);
  for (auto& th : threads) th.join();
  return rows;
}

inline std::vector<ResultRow> load_rows(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::string line;
  std::getline(f, line);  // header
  std::vector<ResultRow> rows;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::vector<std::string> parts;
    std::istringstream is(line);
    std::string tok;
    while (std::getline(is, tok, ',')) parts.push_back(tok);
    if (parts.size() < 20) continue;
    ResultRow w;
    w.grid_index = std::stoi(parts[0]);
    w.model = parts[1];
    w.n = std::stoi(parts[2]);
    w.r = std::stoi(parts[3]);
    w.rho = std::stod(parts[4]);
    w.q0 = std::stod(parts[5]);
    w.q1 = std::stod(parts[6]);
    w.lambda = std::stod(parts[7]);
    w.snr = std::stod(parts[8]);
    w.eps = std::stod(parts[9]);
    w.ell = std::stoi(parts[10]);
    w.trials = std::stol(parts[11]);
    w.seed = std::stoull(parts[12]);
    w.sym_diff = std::stoi(parts[13]);
    w.normalized = std::stod(parts[14]);
    w.lambda_star = std::stod(parts[15]);
    w.preprocessed = std::stoi(parts[16]) != 0;
    w.secs_preprocess = std::stod(parts[17]);
    w.secs_dp = std::stod(parts[18]);
    w.secs_total = std::stod(parts[19]);
    if (parts.size() > 20) w.error = parts[20];
    rows.push_back(std::move(w));
  }
  return rows;
}

// ---------------------------------------------------------------- plot data

// CSV grouped by n: columns n, snr, mean normalized symmetric difference,
// standard error, row count
inline void emit_plotdata(const std::vector<ResultRow>& rows, const std::string& path) {
  if (rows.empty()) throw std::invalid_argument("emit_plotdata: no rows");
  std::map<std::pair<int, double>, std::vector<double>> groups;
  for (auto& r : rows) {
    if (!r.error.empty()) continue;
    groups[{r.n, r.snr}].push_back(r.normalized);
  }
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  f << "n,snr,mean_normalized,stderr,count\n";
  char buf[256];
  for (auto& [key, vals] : groups) {
    double mean = 0;
    for (double v : vals) mean += v;
    mean /= double(vals.size());
    double var = 0;
    for (double v : vals) var += (v - mean) * (v - mean);
    double se = vals.size() > 1 ? std::sqrt(var / double(vals.size() - 1) / double(vals.size()))
                                : 0.0;
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%zu", key.first, key.second, mean, se,
                  vals.size());
    f << buf << "\n";
  }
}

}  // namespace harness
}  // namespace hypercc
