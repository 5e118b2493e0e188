// Command-line front end: sampling, recovery, the exact oracle reports, the
// cumulant calculator, experiment sweeps, plot-data emission, and the
// verification suites.

#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "hypercc/verify.hpp"

using json = nlohmann::json;
using namespace hypercc;

namespace {

int env_workers() {
  const char* w = std::getenv("HYPERCC_WORKERS");
  return w ? std::atoi(w) : 0;
}

Rational parse_rational(const std::string& s) {
  auto slash = s.find('/');
  if (slash == std::string::npos) {
    // accept small decimals exactly
    auto dot = s.find('.');
    if (dot == std::string::npos) return Rational(BigInt(s));
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    BigInt den = big_pow(10, long(s.size() - dot - 1));
    return Rational(BigInt(digits), den);
  }
  return Rational(BigInt(s.substr(0, slash)), BigInt(s.substr(slash + 1)));
}

MultiHypergraph parse_pattern(const std::string& s) {
  std::vector<Edge> edges;
  std::istringstream es(s);
  std::string part;
  while (std::getline(es, part, ';')) {
    Edge e;
    std::istringstream vs(part);
    std::string v;
    while (std::getline(vs, v, ',')) e.push_back(std::stoi(v));
    std::sort(e.begin(), e.end());
    edges.push_back(e);
  }
  return MultiHypergraph::from_edges(edges);
}

int cmd_sample(const std::string& model, int n, int r, double rho, double q0, double q1,
               double lambda, const std::string& prior, const std::string& noise, uint64_t seed,
               const std::string& out, const std::string& signal_out, bool text) {
  Signal sig;
  Observation obs;
  if (model == "pds") {
    PdsParams p{n, r, rho, q0, q1};
    std::tie(sig, obs) = sample_pds(p, seed);
  } else {
    TpcaParams p;
    p.n = n;
    p.r = r;
    p.lambda = lambda;
    p.noise_mode = noise == "symmetrized" ? NoiseMode::symmetrized : NoiseMode::noise_reduced;
    if (prior == "bernoulli") p.prior = PriorSpec::bernoulli(rho);
    else if (prior == "rademacher") p.prior = PriorSpec::rademacher();
    else if (prior == "gaussian") p.prior = PriorSpec::gaussian();
    else throw std::invalid_argument("unknown prior " + prior);
    std::tie(sig, obs) = sample_general_tpca(p, seed);
  }
  if (text) save_edge_list(obs, out);
  else save_observation(obs, out);
  if (!signal_out.empty()) save_signal(sig, signal_out);
  std::cout << "wrote " << out << "\n";
  return 0;
}

int cmd_recover(const std::string& model, const std::string& input, double rho, double q0,
                double q1, double lambda, double eps, int ell, long trials, uint64_t seed,
                const std::string& out) {
  Observation obs = load_observation(input);
  RecoveryConfig rc;
  rc.eps = eps;
  rc.ell_override = ell;
  rc.t_override = trials;
  rc.seed = seed;
  rc.workers = env_workers();
  RecoveryResult res;
  if (model == "pds") {
    PdsParams p{obs.n, obs.r, rho, q0, q1};
    res = recover_pds(obs, p, rc);
  } else {
    TpcaParams p;
    p.n = obs.n;
    p.r = obs.r;
    p.lambda = lambda;
    p.prior = PriorSpec::bernoulli(rho);
    p.noise_mode = obs.noise_mode;
    res = recover_stpca(obs, p, rc);
  }
  json j;
  j["model"] = model;
  j["n"] = obs.n;
  j["r"] = obs.r;
  j["rho"] = rho;
  j["eps"] = eps;
  j["ell"] = res.score.ell;
  j["k"] = res.score.k;
  j["trials"] = res.score.t;
  j["seed"] = seed;
  j["lambda_star"] = res.score.lambda_star;
  j["preprocessed"] = res.score.preprocessed;
  j["secs_preprocess"] = res.score.secs_preprocess;
  j["secs_dp"] = res.score.secs_dp;
  j["s_hat"] = res.s_hat;
  j["z"] = res.score.z;
  if (out.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::ofstream f(out);
    f << j.dump(2) << "\n";
    std::cout << "wrote " << out << "\n";
  }
  return 0;
}

int cmd_oracle(const std::string& model, int n, int r, int D, const std::string& rho,
               const std::string& q0, const std::string& q1, const std::string& lambda,
               const std::string& mode, const std::string& out) {
  lowdeg::ExactParams p;
  p.model = model == "pds" ? lowdeg::Model::pds : lowdeg::Model::stpca;
  p.n = n;
  p.r = r;
  p.D = D;
  p.rho = parse_rational(rho);
  p.q0 = parse_rational(q0);
  p.q1 = parse_rational(q1);
  p.lambda = parse_rational(lambda);
  auto sys = lowdeg::MomentSystem::build(p);
  json j;
  j["model"] = model;
  j["mode"] = mode;
  j["n"] = n;
  j["r"] = r;
  j["D"] = D;
  j["index_set_size"] = sys.G.size();
  auto gstr = [](const MultiHypergraph& g) {
    std::string s;
    for (auto& [e, m] : g.edges)
      for (int c = 0; c < m; ++c) {
        if (!s.empty()) s += ";";
        for (size_t i = 0; i < e.size(); ++i) s += (i ? "," : "") + std::to_string(e[i]);
      }
    return s.empty() ? std::string("0") : s;
  };
  {
    json cj = json::array();
    for (size_t i = 0; i < sys.G.size(); ++i) {
      json row;
      row["alpha"] = gstr(sys.G[i]);
      row["exact"] = sys.c[i].str();
      row["value"] = sys.c[i].to_double();
      cj.push_back(row);
    }
    j["c"] = cj;
  }
  auto cert = lowdeg::build_certificate(sys);
  j["certificate_entries"] = cert.entries.size();
  j["certificate_norm2"] = cert.norm2.convert_to<double>();
  j["certificate_norm2_exact"] = cert.norm2.str();
  bool residual_zero = true;
  for (size_t ai = 0; ai < sys.G.size(); ++ai)
    residual_zero =
        residual_zero && lowdeg::certificate_residual(sys, cert, sys.G[ai], sys.c[ai]).is_zero();
  j["certificate_residual_zero"] = residual_zero;
  if (mode == "exact") {
    auto rep = lowdeg::exact_corr(sys);
    j["corr2"] = rep.corr2.convert_to<double>();
    j["corr2_exact"] = rep.corr2.str();
    j["mmse"] = rep.mmse.convert_to<double>();
    j["mmse_exact"] = rep.mmse.str();
    auto dual = lowdeg::duality_gap(sys);
    j["duality_bound2"] = dual.cert_bound2.convert_to<double>();
    j["duality_holds"] = dual.bound_holds;
  } else {
    auto rep = lowdeg::exact_corr_float(sys);
    j["corr2"] = rep.corr2;
    j["mmse"] = rep.mmse;
  }
  if (out.empty()) std::cout << j.dump(2) << "\n";
  else {
    std::ofstream f(out);
    f << j.dump(2) << "\n";
  }
  return residual_zero ? 0 : 1;
}

int cmd_cumulant(const std::string& alpha_str, const std::string& prior, const std::string& lambda,
                 int r, int m) {
  cumulants::CumulantParams p;
  p.r = r;
  p.m = m;
  p.lambda = parse_rational(lambda);
  if (prior == "rademacher") p.prior = PriorSpec::rademacher();
  else if (prior == "gaussian") p.prior = PriorSpec::gaussian();
  else if (prior.rfind("bernoulli:", 0) == 0)
    p.prior = PriorSpec::bernoulli(std::stod(prior.substr(10)),
                                   parse_rational(prior.substr(10)));
  else throw std::invalid_argument("unknown prior " + prior);
  MultiHypergraph alpha = parse_pattern(alpha_str);
  for (auto& [e, mult] : alpha.edges)
    if (int(e.size()) != r) throw std::invalid_argument("edge arity must equal r");
  cumulants::CumulantTable tab(p);
  json j;
  j["alpha"] = alpha_str;
  j["r"] = r;
  j["m"] = m;
  j["good"] = cumulants::is_good_general(alpha, m);
  Rational k = tab.kappa(alpha);
  j["kappa"] = k.convert_to<double>();
  j["kappa_exact"] = k.str();
  j["delta_bar"] = cumulants::excess_delta(cumulants::bar(alpha, m));
  if (cumulants::is_good_general(alpha, m)) {
    j["complexity_H"] = tab.complexity_H(alpha).str();
    j["envelope_holds"] = tab.envelope_check(alpha);
  }
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_verify(const std::string& level, const std::string& out) {
  bool full = level == "full";
  auto results = verify::verify_all(full);
  json j = json::array();
  bool all = true;
  for (auto& r : results) {
    json row;
    row["check"] = r.name;
    row["pass"] = r.pass;
    row["detail"] = r.detail;
    row["secs"] = r.secs;
    j.push_back(row);
    all = all && r.pass;
    std::cout << (r.pass ? "PASS" : "FAIL") << "  " << r.name << "  (" << r.detail << ", "
              << r.secs << "s)\n";
  }
  if (!out.empty()) {
    std::ofstream f(out);
    f << j.dump(2) << "\n";
  }
  std::cout << (all ? "verify: all checks passed\n" : "verify: FAILURES present\n");
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"planted-structure recovery and low-degree verification toolkit"};
  app.require_subcommand(1);

  // ------------------------------------------------------------------ sample
  auto* sample = app.add_subcommand("sample", "draw an observation and write it to disk");
  std::string s_model = "pds", s_prior = "bernoulli", s_noise = "noise_reduced";
  std::string s_out = "obs.bin", s_signal;
  int s_n = 50, s_r = 2;
  double s_rho = 0.2, s_q0 = 0.2, s_q1 = 0.5, s_lambda = 1.0;
  uint64_t s_seed = 1;
  bool s_text = false;
  sample->add_option("--model", s_model)->check(CLI::IsMember({"pds", "stpca"}));
  sample->add_option("--n", s_n);
  sample->add_option("--r", s_r);
  sample->add_option("--rho", s_rho);
  sample->add_option("--q0", s_q0);
  sample->add_option("--q1", s_q1);
  sample->add_option("--lambda", s_lambda);
  sample->add_option("--prior", s_prior);
  sample->add_option("--noise", s_noise)->check(CLI::IsMember({"noise_reduced", "symmetrized"}));
  sample->add_option("--seed", s_seed);
  sample->add_option("--out", s_out);
  sample->add_option("--signal-out", s_signal);
  sample->add_flag("--text", s_text, "write the textual edge-list format");

  // ----------------------------------------------------------------- recover
  auto* recover = app.add_subcommand("recover", "color-coded recovery of the planted set");
  std::string r_model = "pds", r_input, r_out;
  double r_rho = 0.2, r_q0 = 0.2, r_q1 = 0.5, r_lambda = 1.0, r_eps = 0.2;
  int r_ell = -1;
  long r_trials = -1;
  uint64_t r_seed = 1;
  recover->add_option("--model", r_model)->check(CLI::IsMember({"pds", "stpca"}));
  recover->add_option("--input", r_input)->required();
  recover->add_option("--rho", r_rho);
  recover->add_option("--q0", r_q0);
  recover->add_option("--q1", r_q1);
  recover->add_option("--lambda", r_lambda);
  recover->add_option("--eps", r_eps);
  recover->add_option("--ell", r_ell);
  recover->add_option("--trials", r_trials);
  recover->add_option("--seed", r_seed);
  recover->add_option("--out", r_out);

  // ------------------------------------------------------------------ oracle
  auto* oracle = app.add_subcommand("oracle", "exact moment system, certificate, Corr and MMSE");
  std::string o_model = "pds", o_mode = "exact", o_out;
  int o_n = 4, o_r = 2, o_D = 2;
  std::string o_rho = "1/4", o_q0 = "1/5", o_q1 = "2/5", o_lambda = "1/2";
  oracle->add_option("--model", o_model)->check(CLI::IsMember({"pds", "stpca"}));
  oracle->add_option("--mode", o_mode)->check(CLI::IsMember({"exact", "float"}));
  oracle->add_option("--n", o_n);
  oracle->add_option("--r", o_r);
  oracle->add_option("--D", o_D);
  oracle->add_option("--rho", o_rho);
  oracle->add_option("--q0", o_q0);
  oracle->add_option("--q1", o_q1);
  oracle->add_option("--lambda", o_lambda);
  oracle->add_option("--out", o_out);

  // ---------------------------------------------------------------- cumulant
  auto* cumulant = app.add_subcommand("cumulant", "joint cumulant of one multi-hypergraph");
  std::string c_alpha, c_prior = "rademacher", c_lambda = "1";
  int c_r = 3, c_m = 2;
  cumulant->add_option("--alpha", c_alpha, "edges as v,v,v;v,v,v with repeats for multiplicity")
      ->required();
  cumulant->add_option("--prior", c_prior, "rademacher | gaussian | bernoulli:<rho>");
  cumulant->add_option("--lambda", c_lambda);
  cumulant->add_option("--r", c_r);
  cumulant->add_option("--m", c_m);

  // ------------------------------------------------------------------- sweep
  auto* sweep = app.add_subcommand("sweep", "run a seeded experiment grid from a config file");
  std::string w_config, w_out;
  sweep->add_option("--config", w_config)->required();
  sweep->add_option("--out", w_out, "output directory (overrides config)");

  // ---------------------------------------------------------------- plotdata
  auto* plotdata = app.add_subcommand("plotdata", "aggregate sweep rows for plotting");
  std::string p_in, p_out = "plot.csv", p_kind = "threshold";
  plotdata->add_option("--in", p_in)->required();
  plotdata->add_option("--out", p_out);
  plotdata->add_option("--kind", p_kind)->check(CLI::IsMember({"threshold"}));

  // ------------------------------------------------------------------ verify
  auto* ver = app.add_subcommand("verify", "run the oracle/certificate verification suites");
  std::string v_level = "fast", v_out;
  ver->add_option("--level", v_level)->check(CLI::IsMember({"fast", "full"}));
  ver->add_option("--out", v_out, "machine-readable report path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sample)
      return cmd_sample(s_model, s_n, s_r, s_rho, s_q0, s_q1, s_lambda, s_prior, s_noise, s_seed,
                        s_out, s_signal, s_text);
    if (*recover)
      return cmd_recover(r_model, r_input, r_rho, r_q0, r_q1, r_lambda, r_eps, r_ell, r_trials,
                         r_seed, r_out);
    if (*oracle) return cmd_oracle(o_model, o_n, o_r, o_D, o_rho, o_q0, o_q1, o_lambda, o_mode, o_out);
    if (*cumulant) return cmd_cumulant(c_alpha, c_prior, c_lambda, c_r, c_m);
    if (*sweep) {
      auto kv = harness::KvConfig::parse_file(w_config);
      auto cfg = harness::ExperimentConfig::from(kv);
      if (!w_out.empty()) cfg.out_dir = w_out;
      if (cfg.workers == 0) cfg.workers = env_workers();
      std::filesystem::create_directories(cfg.out_dir);
      std::string csv = cfg.out_dir + "/rows.csv";
      auto rows = harness::run_sweep(cfg, csv);
      harness::emit_plotdata(rows, cfg.out_dir + "/plot.csv");
      long failures = 0;
      for (auto& r : rows)
        if (!r.error.empty()) ++failures;
      std::cout << "sweep: " << rows.size() << " rows -> " << csv << " (" << failures
                << " failed)\n";
      return 0;
    }
    if (*plotdata) {
      auto rows = harness::load_rows(p_in);
      harness::emit_plotdata(rows, p_out);
      std::cout << "wrote " << p_out << "\n";
      return 0;
    }
    if (*ver) return cmd_verify(v_level, v_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
