#include "bolab/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "bolab/energy.hpp"
#include "bolab/experiments.hpp"
#include "bolab/matsuno.hpp"
#include "bolab/measures.hpp"
#include "bolab/parallel.hpp"
#include "bolab/report.hpp"
#include "json.hpp"

namespace bolab {

namespace {

namespace fs = std::filesystem;

nlohmann::json load_config(const std::string& path) {
  if (path.empty()) return nlohmann::json::object();
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config " + path);
  return nlohmann::json::parse(in);
}

void reject_unknown_keys(const nlohmann::json& cfg, const std::set<std::string>& allowed) {
  for (const auto& [key, value] : cfg.items())
    if (!allowed.count(key))
      throw std::runtime_error("unknown config key: " + key);
}

uint64_t effective_seed(uint64_t from_config) {
  if (const char* env = std::getenv("BOLAB_SEED")) return std::strtoull(env, nullptr, 10);
  return from_config;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& body) {
  fs::create_directories(fs::path(path).parent_path().empty()
                             ? fs::path(".")
                             : fs::path(path).parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << body;
}

int finish_report(const Report& report, const std::string& out_dir) {
  const auto paths = emit_report(report, out_dir);
  for (const auto& v : report.verdicts)
    std::cout << (v.pass ? "[PASS] " : "[FAIL] ") << v.criterion << ": measured=" << v.measured
              << " threshold=" << v.threshold << " (" << v.note << ")\n";
  std::cout << "report: " << paths.report_json << "\n";
  return report.all_passed() ? 0 : 2;
}

FlowConfig flow_config_from_json(const nlohmann::json& cfg) {
  reject_unknown_keys(cfg, {"truncation", "grid_bandwidth", "dt", "scheme", "drift_tolerance",
                            "horizon", "nonlinear_scale", "mode"});
  FlowConfig out;
  out.truncation = cfg.value("truncation", out.truncation);
  out.grid_bandwidth = cfg.value("grid_bandwidth", std::max(2 * out.truncation, 64));
  out.dt = cfg.value("dt", 0.0);
  out.drift_tolerance = cfg.value("drift_tolerance", out.drift_tolerance);
  out.horizon = cfg.value("horizon", out.horizon);
  out.nonlinear_scale = cfg.value("nonlinear_scale", 1.0);
  const std::string scheme = cfg.value("scheme", std::string("ifrk4"));
  if (scheme == "ifrk4")
    out.scheme = Scheme::IntegratingFactorRk4;
  else if (scheme == "etdrk4")
    out.scheme = Scheme::EtdRk4;
  else
    throw std::runtime_error("unknown scheme: " + scheme);
  return out;
}

int run_sample(int k, int modes, int count, uint64_t seed, int cutoff, double R,
               const std::string& out_dir, int workers) {
  GaussianSpec spec;
  spec.k = k;
  spec.mode_cutoff = modes;
  spec.seed = effective_seed(seed);
  if (cutoff <= 0) cutoff = modes / 2;
  const WeightedEnsemble ens = weighted_ensemble(spec, cutoff, R, count, workers);

  fs::create_directories(out_dir);
  {
    std::ofstream out(fs::path(out_dir) / "samples.jsonl", std::ios::binary);
    for (const auto& s : ens.samples) out << s.to_json() << "\n";
  }
  {
    std::ofstream out(fs::path(out_dir) / "weights.csv", std::ios::binary);
    out << "index,weight\n";
    for (std::size_t i = 0; i < ens.weights.size(); ++i) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.17g", ens.weights[i]);
      out << i << "," << buf << "\n";
    }
  }
  nlohmann::json cfg;
  cfg["k"] = k;
  cfg["mode_cutoff"] = modes;
  cfg["count"] = count;
  cfg["seed"] = spec.seed;
  cfg["N"] = cutoff;
  cfg["R"] = R;
  cfg["alpha_c"] = spec.alpha_c;
  cfg["chi"] = "exp-bump blend, 1 on |x|<=R, 0 on |x|>=2R";
  cfg["variance_rule"] = "coeff(n) = (h_n + i l_n) / (2 |n|^{k/2}), n > 0";
  cfg["ess"] = ens.ess();
  cfg["clipped"] = ens.clipped_count;
  cfg["config_hash"] = config_hash(cfg);
  write_file((fs::path(out_dir) / "config.json").string(), cfg.dump(2) + "\n");
  std::cout << "wrote " << count << " samples, ess=" << ens.ess() << "\n";
  return 0;
}

int run_evolve(const std::string& config_path, double t, const std::string& in_path,
               const std::string& out_path, const std::string& trajectory_path, int k_max) {
  const nlohmann::json cfg_json = load_config(config_path);
  const FlowConfig cfg = flow_config_from_json(cfg_json);
  const bool truncated = cfg_json.value("mode", std::string("truncated")) == "truncated";
  const FourierField u0 = FourierField::from_json(read_file(in_path));

  std::ostringstream traj;
  traj << "t,H1_norm";
  for (int k = 0; k <= k_max; ++k) traj << ",E" << k << "_drift";
  traj << "\n";
  std::vector<double> e0(k_max + 1);
  for (int k = 0; k <= k_max; ++k) e0[k] = eval_energy(k, u0);

  const int legs = 10;
  FourierField u = u0;
  for (int leg = 0; leg <= legs; ++leg) {
    if (leg > 0) {
      const double dt_leg = t / legs;
      u = truncated ? evolve_truncated(u, cfg, dt_leg) : evolve_full(u, cfg, dt_leg);
    }
    traj << (t * leg / legs) << "," << sobolev_norm(u, 1.0, false);
    for (int k = 0; k <= k_max; ++k)
      traj << "," << std::abs(eval_energy(k, u) - e0[k]) / std::max(1e-12, std::abs(e0[k]));
    traj << "\n";
  }
  write_file(out_path, u.to_json() + "\n");
  if (!trajectory_path.empty()) write_file(trajectory_path, traj.str());
  std::cout << "evolved to t=" << t << ", wrote " << out_path << "\n";
  return 0;
}

int run_expressions(bool energies, int index, const std::string& format, bool canonical,
                    const std::string& out_path) {
  std::string body;
  if (energies) {
    const EnergyExpr& e = energy(index);
    const Expr& expr = canonical ? e.canonical_density : e.density;
    if (format == "json") {
      nlohmann::json j = nlohmann::json::parse(expr.to_json());
      j["k"] = index;
      j["lambda"] = {{"rational", {numerator(e.lambda_rat).convert_to<long long>(),
                                   denominator(e.lambda_rat).convert_to<long long>()}},
                     {"pi_power", -1}};
      body = j.dump(2) + "\n";
    } else {
      body = "E_{" + std::to_string(index) + "/2} = \\frac{" + e.lambda_rat.str() +
             "}{\\pi} \\int \\Big(" + expr.to_latex() + "\\Big) dx\n";
    }
  } else {
    const Expr& w = matsuno_w(index, std::max(index, 10));
    body = format == "json" ? w.to_json() + "\n"
                            : "w_{" + std::to_string(index) + "} = " + w.to_latex() + "\n";
  }
  if (out_path.empty())
    std::cout << body;
  else
    write_file(out_path, body);
  return 0;
}

int run_verify(const std::string& experiment, const std::string& config_path,
               const std::string& out_dir, int workers) {
  const nlohmann::json cfg = load_config(config_path);
  if (experiment == "lemma-prod") {
    reject_unknown_keys(cfg, {"n_list", "brute_check_max", "band_rel_width"});
    LemmaProdParams p;
    if (cfg.contains("n_list")) p.n_list = cfg["n_list"].get<std::vector<int>>();
    p.brute_check_max = cfg.value("brute_check_max", p.brute_check_max);
    p.band_rel_width = cfg.value("band_rel_width", p.band_rel_width);
    return finish_report(check_lemma_prod(p), out_dir);
  }
  if (experiment == "gn-decay") {
    reject_unknown_keys(cfg, {"k", "q", "n_list", "count", "seed", "mode_cutoff", "slope_lo",
                              "slope_hi"});
    GnDecayParams p;
    p.k = cfg.value("k", p.k);
    p.q = cfg.value("q", p.q);
    if (cfg.contains("n_list")) p.n_list = cfg["n_list"].get<std::vector<int>>();
    p.count = cfg.value("count", p.count);
    p.seed = effective_seed(cfg.value("seed", p.seed));
    p.mode_cutoff = cfg.value("mode_cutoff", p.mode_cutoff);
    p.slope_lo = cfg.value("slope_lo", p.slope_lo);
    p.slope_hi = cfg.value("slope_hi", p.slope_hi);
    p.workers = workers;
    return finish_report(check_gn_decay(p), out_dir);
  }
  if (experiment == "invariance") {
    reject_unknown_keys(cfg, {"k", "truncation", "R", "t_grid", "count", "seed", "mode_cutoff",
                              "dt", "z_band", "min_ess", "nonlinear", "weighted"});
    InvarianceParams p;
    p.k = cfg.value("k", p.k);
    p.truncation = cfg.value("truncation", p.truncation);
    p.R = cfg.value("R", p.R);
    if (cfg.contains("t_grid")) p.t_grid = cfg["t_grid"].get<std::vector<double>>();
    p.count = cfg.value("count", p.count);
    p.seed = effective_seed(cfg.value("seed", p.seed));
    p.mode_cutoff = cfg.value("mode_cutoff", p.mode_cutoff);
    p.dt = cfg.value("dt", p.dt);
    p.z_band = cfg.value("z_band", p.z_band);
    p.min_ess = cfg.value("min_ess", p.min_ess);
    p.nonlinear = cfg.value("nonlinear", p.nonlinear);
    p.weighted = cfg.value("weighted", p.weighted);
    p.workers = workers;
    return finish_report(check_invariance(p), out_dir);
  }
  if (experiment == "flow-convergence") {
    reject_unknown_keys(cfg, {"n_list", "t", "reference_bandwidth", "dt", "slope_max", "u0"});
    FlowConvergenceParams p;
    if (cfg.contains("n_list")) p.n_list = cfg["n_list"].get<std::vector<int>>();
    p.t = cfg.value("t", p.t);
    p.reference_bandwidth = cfg.value("reference_bandwidth", p.reference_bandwidth);
    p.dt = cfg.value("dt", p.dt);
    p.slope_max = cfg.value("slope_max", p.slope_max);
    if (cfg.contains("u0")) p.u0 = FourierField::from_json(cfg["u0"].dump());
    return finish_report(check_flow_convergence(p), out_dir);
  }
  if (experiment == "conservation") {
    reject_unknown_keys(cfg, {"k_max", "T", "time_samples", "drift_tolerance", "u0", "flow"});
    ConservationParams p;
    p.k_max = cfg.value("k_max", p.k_max);
    p.T = cfg.value("T", p.T);
    p.time_samples = cfg.value("time_samples", p.time_samples);
    p.drift_tolerance = cfg.value("drift_tolerance", p.drift_tolerance);
    if (cfg.contains("u0")) p.u0 = FourierField::from_json(cfg["u0"].dump());
    if (cfg.contains("flow")) p.cfg = flow_config_from_json(cfg["flow"]);
    return finish_report(check_conservation(p), out_dir);
  }
  if (experiment == "liouville") {
    reject_unknown_keys(cfg, {"truncation", "trials", "seed", "h", "tol"});
    LiouvilleParams p;
    p.truncation = cfg.value("truncation", p.truncation);
    p.trials = cfg.value("trials", p.trials);
    p.seed = effective_seed(cfg.value("seed", p.seed));
    p.h = cfg.value("h", p.h);
    p.tol = cfg.value("tol", p.tol);
    return finish_report(check_liouville(p), out_dir);
  }
  throw std::runtime_error("unknown experiment: " + experiment +
                           " (expected lemma-prod, gn-decay, invariance, flow-convergence, "
                           "conservation, liouville)");
}

int run_recurrence(const std::string& config_path, const std::string& out_dir) {
  const nlohmann::json cfg = load_config(config_path);
  reject_unknown_keys(cfg, {"sigma", "T", "stride", "departure_time", "u0", "flow"});
  RecurrenceParams p;
  p.sigma = cfg.value("sigma", p.sigma);
  p.T = cfg.value("T", p.T);
  p.stride = cfg.value("stride", p.stride);
  p.departure_time = cfg.value("departure_time", p.departure_time);
  if (cfg.contains("u0")) p.u0 = FourierField::from_json(cfg["u0"].dump());
  if (cfg.contains("flow")) p.cfg = flow_config_from_json(cfg["flow"]);
  return finish_report(recurrence_scan(p), out_dir);
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Benjamin-Ono conservation-law and invariant-measure laboratory"};
  app.require_subcommand(1);
  int workers = 0;
  app.add_option("--workers", workers, "worker threads (0 = hardware)");

  // sample
  auto* sample = app.add_subcommand("sample", "draw a weighted ensemble from mu_{k/2}");
  int k = 0, modes = 256, count = 1000, cutoff = 0;
  uint64_t seed = 42;
  double R = 8.0;
  std::string out_dir = "out";
  sample->add_option("--k", k, "regularity index k of mu_{k/2}")->required();
  sample->add_option("--modes", modes, "sample bandwidth");
  sample->add_option("--count", count, "number of samples");
  sample->add_option("--seed", seed, "RNG seed");
  sample->add_option("--N", cutoff, "projection cutoff of the density (default modes/2)");
  sample->add_option("--R", R, "cutoff scale of chi_R");
  sample->add_option("--out", out_dir, "output directory")->required();

  // evolve
  auto* evolve = app.add_subcommand("evolve", "integrate the truncated or full flow");
  std::string ev_config, ev_in, ev_out, ev_traj;
  double ev_t = 1.0;
  int ev_kmax = 4;
  evolve->add_option("--config", ev_config, "flow config JSON")->required();
  evolve->add_option("--t", ev_t, "target time");
  evolve->add_option("--in", ev_in, "initial field JSON")->required();
  evolve->add_option("--out", ev_out, "final field JSON")->required();
  evolve->add_option("--trajectory", ev_traj, "CSV of norms and energy drifts");
  evolve->add_option("--k-max", ev_kmax, "energies monitored in the trajectory dump");

  // claws
  auto* claws = app.add_subcommand("claws", "emit conservation-law densities");
  auto* generate = claws->add_subcommand("generate", "emit w_n");
  int claws_n = 0;
  std::string claws_format = "json", claws_out;
  generate->add_option("--n", claws_n, "density index")->required();
  generate->add_option("--format", claws_format, "json or latex")
      ->check(CLI::IsMember({"json", "latex"}));
  generate->add_option("--out", claws_out, "output file (default stdout)");

  // energies
  auto* energies = app.add_subcommand("energies", "emit E_{k/2} densities");
  int energy_k = 0;
  bool canonical = false;
  std::string energy_format = "json", energy_out;
  energies->add_option("--k", energy_k, "doubled regularity index")->required();
  energies->add_flag("--canonical", canonical, "canonicalized cubic part");
  energies->add_option("--format", energy_format, "json or latex")
      ->check(CLI::IsMember({"json", "latex"}));
  energies->add_option("--out", energy_out, "output file (default stdout)");

  // verify
  auto* verify = app.add_subcommand("verify", "run one experiment and emit a report");
  std::string experiment, verify_config, verify_out = "out";
  verify->add_option("experiment", experiment, "experiment name")->required();
  verify->add_option("--config", verify_config, "experiment config JSON");
  verify->add_option("--out", verify_out, "output directory");

  // recurrence
  auto* recurrence = app.add_subcommand("recurrence", "long-horizon return-distance scan");
  std::string rec_config, rec_out = "out";
  recurrence->add_option("--config", rec_config, "experiment config JSON");
  recurrence->add_option("--out", rec_out, "output directory");

  try {
    app.parse(argc, const_cast<char**>(argv));
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*sample) return run_sample(k, modes, count, seed, cutoff, R, out_dir, workers);
    if (*evolve) return run_evolve(ev_config, ev_t, ev_in, ev_out, ev_traj, ev_kmax);
    if (*claws) return run_expressions(false, claws_n, claws_format, false, claws_out);
    if (*energies)
      return run_expressions(true, energy_k, energy_format, canonical, energy_out);
    if (*verify) return run_verify(experiment, verify_config, verify_out, workers);
    if (*recurrence) return run_recurrence(rec_config, rec_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace bolab
