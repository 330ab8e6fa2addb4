// Acceptance suite: every shipped claim of the laboratory at its stated
// tolerance, one verdict line per criterion. Exit code 0 iff all pass.

#include <chrono>
#include <cmath>
#include <cstring>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "bolab/energy.hpp"
#include "bolab/eval.hpp"
#include "bolab/experiments.hpp"
#include "bolab/flows.hpp"
#include "bolab/matsuno.hpp"
#include "bolab/measures.hpp"
#include "bolab/parallel.hpp"
#include "bolab/rng.hpp"

using namespace bolab;

namespace {

struct Criterion {
  bool pass = true;
  std::ostringstream note;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (note.tellp() > 0) note << "; ";
      note << what;
    }
  }
  void info(const std::string& what) {
    if (note.tellp() > 0) note << "; ";
    note << what;
  }
};

int g_failures = 0;

void run_criterion(int id, const std::string& title, double budget_seconds,
                   const std::function<void(Criterion&)>& body) {
  Criterion c;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.require(false, std::string("exception: ") + e.what());
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (budget_seconds > 0)
    c.require(elapsed < budget_seconds,
              "runtime " + std::to_string(elapsed) + "s over budget " +
                  std::to_string(budget_seconds) + "s");
  if (!c.pass) ++g_failures;
  std::ostringstream line;
  line << (c.pass ? "[PASS]" : "[FAIL]") << " criterion " << id << ": " << title << " ("
       << std::fixed;
  line.precision(1);
  line << elapsed << " s)";
  const std::string notes = c.note.str();
  if (!notes.empty()) line << " -- " << notes;
  std::cout << line.str() << std::endl;
}

FourierField random_zero_mean_complex(int bandwidth, uint64_t seed, uint64_t stream) {
  CounterRng rng(seed);
  FourierField u = FourierField::zeros(bandwidth, false);
  for (int n = -bandwidth; n <= bandwidth; ++n) {
    if (n == 0) continue;
    const auto [a, b] = rng.normal_pair(stream, static_cast<uint64_t>(n + bandwidth));
    u.set_coeff(n, std::complex<double>(a, b) / (1.0 + std::abs(n)));
  }
  return u;
}

// -------------------------------------------------------------------------
// 1. Operator identity suite

void criterion_operator_identities(Criterion& c) {
  const double tol = 1e-12;
  const auto h = OperatorWord::hilbert();
  const auto pp = OperatorWord::p_plus();
  const auto pm = OperatorWord::p_minus();
  double worst = 0.0;
  for (uint64_t s = 0; s < 100; ++s) {
    const FourierField u = random_zero_mean_complex(64, 1000, s);
    worst = std::max(worst, max_abs_diff(apply_word(h.then(h), u), -1.0 * u));
    worst = std::max(worst, max_abs_diff(apply_word(pp, u) + apply_word(pm, u), u));
    worst = std::max(worst, max_abs_diff(apply_word(pp.then(pp), u), apply_word(pp, u)));
    worst = std::max(worst, max_abs_diff(apply_word(pm.then(pm), u), apply_word(pm, u)));
    worst = std::max(worst, apply_word(pp.then(pm), u).max_abs_coeff());
    FourierField anti = apply_word(pp, u) - apply_word(pm, u);
    anti *= std::complex<double>(0.0, -1.0);
    worst = std::max(worst, max_abs_diff(apply_word(h, u), anti));

    // adjoint identity and Parseval
    const FourierField g = random_zero_mean_complex(64, 1001, s);
    const auto lhs = integrate(multiply(apply_word(pm, u), g));
    const auto rhs = integrate(multiply(u, apply_word(pp, g)));
    worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));

    // commutativity / bilinearity of the product
    worst = std::max(worst, max_abs_diff(multiply(u, g), multiply(g, u)));
  }
  for (uint64_t s = 0; s < 10; ++s) {
    CounterRng rng(1002);
    FourierField u = FourierField::zeros(64, true);
    for (int n = 1; n <= 64; ++n) {
      const auto [a, b] = rng.normal_pair(s, n);
      u.set_coeff(n, std::complex<double>(a, b) / (1.0 + n));
    }
    double sum = 0.0;
    for (int n = -64; n <= 64; ++n) sum += std::norm(u.coeff(n));
    worst = std::max(worst,
                     std::abs(integrate(multiply(u, u)).real() - 2.0 * M_PI * sum) /
                         std::max(1.0, sum));
  }
  c.info("max identity residual " + std::to_string(worst));
  c.require(worst < tol, "identity residual above 1e-12");
}

// -------------------------------------------------------------------------
// 2. Matsuno recursion: composition oracle + conservation drift

void criterion_matsuno(Criterion& c) {
  // Exact: the recursion output solves the generating identity order by order.
  std::vector<Expr> w(7);
  for (int n = 1; n <= 6; ++n) w[n] = matsuno_w(n);
  const OperatorWord pdx = OperatorWord::dx(1).then(OperatorWord::p_minus());
  for (int n = 1; n <= 6; ++n) {
    Expr residual = one_minus_exp_neg_coefficient(w, n);
    if (n >= 2) residual -= w[n - 1].applied(pdx).scaled(CRat::i());
    if (n == 1) residual -= Expr::u();
    c.require(residual.is_zero(), "series-composition residual at order " + std::to_string(n));
  }

  // Conservation along a certified solve of the Matsuno-normalized flow.
  const FourierField u0 = FourierField::cosine(1, 0.2) + FourierField::sine(2, 0.02);
  const double h3 = sobolev_norm(u0, 3.0, false);
  c.require(h3 <= 0.5, "datum exceeds the H^3 ball");
  FlowConfig cfg;
  cfg.grid_bandwidth = 64;
  cfg.dt = 1e-3;
  cfg.drift_tolerance = 1e-8;
  cfg.nonlinear_scale = 2.0;
  const FourierField u1 = evolve_full(u0, cfg, 1.0);
  double worst = 0.0;
  for (int n = 2; n <= 8; ++n) {
    const Expr& wn = matsuno_w(n);
    const double a = eval_expr(wn, u0).real();
    const double b = eval_expr(wn, u1).real();
    worst = std::max(worst, std::abs(b - a) / std::max(1e-12, std::abs(a)));
  }
  c.info("max int w_n drift " + std::to_string(worst));
  c.require(worst < 1e-6, "conservation drift above 1e-6");
}

// -------------------------------------------------------------------------
// 3. Energy normalization and cubic structure

void criterion_energy_structure(Criterion& c) {
  for (int k = 0; k <= 8; ++k) {
    const EnergyExpr& e = energy(k);
    const Expr quad = e.density.homogeneous_part(2);
    for (uint64_t s = 0; s < 5; ++s) {
      CounterRng rng(2000 + k);
      FourierField u = FourierField::zeros(16, true);
      for (int n = 1; n <= 16; ++n) {
        const auto [a, b] = rng.normal_pair(s, n);
        u.set_coeff(n, std::complex<double>(a, b) / (1.0 + n));
      }
      const double val = e.lambda() * eval_expr(quad, u).real();
      const double hn = sobolev_norm(u, k / 2.0, true);
      if (std::abs(val - hn * hn) > 1e-10 * std::max(1.0, hn * hn))
        c.require(false, "quadratic normalization off at k=" + std::to_string(k));
    }
  }

  // Even k = 2(m+1): single coupled cubic term, everything else with sup <= m,
  // and the sum grading 2n - j + 2 holding termwise across homogeneities.
  for (int m : {1, 2, 3}) {
    const int k = 2 * (m + 1);
    const int n = m + 1;
    const EnergyExpr& e = energy(k);
    const Expr cubic = e.canonical_density.homogeneous_part(3);
    int coupled = 0;
    for (const auto& t : cubic.terms()) {
      const Gradings g = gradings(t.node);
      if (g.sum_order != 2 * n - 1)
        c.require(false, "cubic sum grading violated at k=" + std::to_string(k));
      if (g.sup_order > m) {
        ++coupled;
        OperatorWord coupled_h = OperatorWord::dx(m).then(OperatorWord::hilbert());
        const NodeRef expected =
            ExprNode::product({ExprNode::leaf(), ExprNode::apply(coupled_h, ExprNode::leaf()),
                               ExprNode::apply(OperatorWord::dx(m + 1), ExprNode::leaf())});
        c.require(t.node == expected && g.sup_order == m + 1,
                  "unexpected high-sup cubic term at k=" + std::to_string(k));
      }
    }
    c.require(coupled == 1, "coupled-term count " + std::to_string(coupled) +
                                " at k=" + std::to_string(k));
    for (int j = 3; j <= k + 2; ++j)
      for (const auto& t : e.density.homogeneous_part(j).terms())
        if (gradings(t.node).sum_order != 2 * n - j + 2)
          c.require(false, "sum grading violated at k=" + std::to_string(k) +
                               " j=" + std::to_string(j));
  }

  // Odd k = 2n+1: cubic part reduced to sup <= n, sum grading 2n - j + 3.
  for (int n : {1, 2, 3}) {
    const int k = 2 * n + 1;
    const EnergyExpr& e = energy(k);
    for (const auto& t : e.canonical_density.homogeneous_part(3).terms()) {
      const Gradings g = gradings(t.node);
      if (g.sum_order != 2 * n || g.sup_order > n)
        c.require(false, "odd-k cubic structure violated at k=" + std::to_string(k));
    }
    for (int j = 3; j <= k + 2; ++j)
      for (const auto& t : e.density.homogeneous_part(j).terms())
        if (gradings(t.node).sum_order != 2 * n - j + 3)
          c.require(false, "odd-k sum grading violated at k=" + std::to_string(k));
  }

  // Canonicalization preserves the integral.
  for (int k : {4, 5, 6}) {
    const EnergyExpr& e = energy(k);
    for (uint64_t s = 0; s < 3; ++s) {
      CounterRng rng(2100 + k);
      FourierField u = FourierField::zeros(16, true);
      for (int nn = 1; nn <= 16; ++nn) {
        const auto [a, b] = rng.normal_pair(s, nn);
        u.set_coeff(nn, std::complex<double>(a, b) / (1.0 + nn));
      }
      const double a = eval_expr(e.density, u).real();
      const double b = eval_expr(e.canonical_density, u).real();
      if (std::abs(a - b) > 1e-9 * std::max(1.0, std::abs(a)))
        c.require(false, "canonicalization changed the integral at k=" + std::to_string(k));
    }
  }
}

// -------------------------------------------------------------------------
// 4. Three-way derivative oracle triangle

void criterion_three_way(Criterion& c) {
  const int cutoff = 16;
  const int k = 6;
  GaussianSpec spec;
  spec.k = k;
  spec.mode_cutoff = 32;
  spec.seed = 4040;
  FlowConfig cfg;
  cfg.truncation = cutoff;
  cfg.dt = 1e-5;
  const double h = 1e-5;
  const double tol = 1e-5;
  // The centered difference of E carries an irreducible round-off bar of
  // order eps |E| / (2h); pairs against it are held to tol plus that bar.
  double worst_exact = 0.0, worst_fd = 0.0;
  for (int j = 0; j <= k; ++j) {
    const EnergyExpr& e = energy(j);
    const Expr star = star_n(e.density, cutoff);
    for (int i = 0; i < 20; ++i) {
      const FourierField u = sample_mu_at(spec, i);
      const FourierField v = project_low(u, cutoff);
      const double chain = flow_energy_derivative(u, cutoff, j);
      const double symbolic = e.lambda() * eval_expr(star, v).real();
      const double ep = eval_energy(j, project_low(evolve_truncated(u, cfg, h), cutoff));
      const double em = eval_energy(j, project_low(evolve_truncated(u, cfg, -h), cutoff));
      const double fd = (ep - em) / (2 * h);
      const double scale = std::max({1e-12, std::abs(chain), std::abs(symbolic), std::abs(fd)});
      const double fd_bar = 3e-15 * std::abs(ep) / (2 * h);
      worst_exact = std::max(worst_exact, std::abs(chain - symbolic) / scale);
      worst_fd = std::max({worst_fd, std::abs(chain - fd) / (tol * scale + fd_bar),
                           std::abs(symbolic - fd) / (tol * scale + fd_bar)});
    }
  }
  c.info("chain-vs-symbolic relative gap " + std::to_string(worst_exact));
  c.info("fd gap over (tol + noise bar), worst " + std::to_string(worst_fd));
  c.require(worst_exact < tol, "chain and symbolic routes disagree");
  c.require(worst_fd < 1.0, "finite-difference route outside tolerance + noise bar");
}

// -------------------------------------------------------------------------
// 10. Sampler calibration

void criterion_sampler_calibration(Criterion& c) {
  GaussianSpec spec;
  spec.k = 6;
  spec.mode_cutoff = 256;
  spec.seed = 777;
  const int count = 100000;
  const int workers = default_workers();

  const std::vector<int> probe_modes{1, 2, 4, 8};
  const std::vector<int> cutoffs{16, 32, 64, 128, 256};
  const double edge = (spec.k - 1) / 2.0;

  // One streamed pass: per-mode squares and projected norms per sample.
  const std::size_t n_obs = probe_modes.size() + 1 + 2 * cutoffs.size();
  std::vector<std::vector<double>> vals(n_obs, std::vector<double>(count));
  parallel_for(count, workers, [&](std::size_t i) {
    const FourierField u = sample_mu_at(spec, i);
    std::size_t o = 0;
    for (int n : probe_modes) vals[o++][i] = std::norm(u.coeff(n));
    {
      const double h = sobolev_norm(project_low(u, 32), edge, true);
      vals[o++][i] = h * h;
    }
    for (int cut : cutoffs) {
      const double below = sobolev_norm(project_low(u, cut), edge - 0.5, false);
      vals[o++][i] = below * below;
      const double at = sobolev_norm(project_low(u, cut), edge, false);
      vals[o++][i] = at * at;
    }
  });

  auto mean_se = [&](const std::vector<double>& v) {
    const double mean = pairwise_sum(v) / count;
    std::vector<double> dev2(count);
    for (int i = 0; i < count; ++i) dev2[i] = (v[i] - mean) * (v[i] - mean);
    return std::pair<double, double>(mean,
                                     std::sqrt(pairwise_sum(dev2) / (count - 1.0) / count));
  };

  std::size_t o = 0;
  for (int n : probe_modes) {
    const auto [mean, se] = mean_se(vals[o++]);
    const double expected = 0.5 / std::pow(double(n), spec.k);
    if (std::abs(mean - expected) > 3 * se)
      c.require(false, "per-mode variance off at n=" + std::to_string(n));
  }
  {
    const auto [mean, se] = mean_se(vals[o++]);
    if (std::abs(mean - alpha(32, spec.alpha_c)) > 3 * se)
      c.require(false, "alpha(32) mismatch: mean " + std::to_string(mean));
    c.info("E||pi_32 u||^2 = " + std::to_string(mean) + " vs alpha = " +
           std::to_string(alpha(32)));
  }

  std::vector<double> below_means, at_means, lns;
  for (std::size_t ci = 0; ci < cutoffs.size(); ++ci) {
    below_means.push_back(mean_se(vals[o + 2 * ci]).first);
    at_means.push_back(mean_se(vals[o + 2 * ci + 1]).first);
    lns.push_back(std::log(double(cutoffs[ci])));
  }
  // Below the edge the means form a Cauchy sequence: dyadic increments keep
  // shrinking and the last one is a sliver of the level itself.
  bool shrinking = true;
  for (std::size_t ci = 2; ci < below_means.size(); ++ci)
    if (below_means[ci] - below_means[ci - 1] >=
        below_means[ci - 1] - below_means[ci - 2])
      shrinking = false;
  const double last_rise = below_means.back() - below_means[below_means.size() - 2];
  c.require(shrinking && last_rise < 0.02 * below_means.back(),
            "H^s mean not stabilizing below the edge");
  // At the edge the means grow like ln N.
  const Fit f = fit_linear(lns, at_means);
  c.info("edge growth fit r2 " + std::to_string(f.r2) + " slope " + std::to_string(f.slope));
  c.require(f.r2 >= 0.95, "edge-growth fit r2 below 0.95");
}

// -------------------------------------------------------------------------
// 11. Recurrence

void criterion_recurrence(Criterion& c) {
  {
    RecurrenceParams p;
    p.u0 = FourierField::cosine(1, 0.7);
    p.cfg.truncation = 1;
    p.cfg.grid_bandwidth = 4;
    p.cfg.drift_tolerance = 1e-9;
    p.T = 2 * M_PI;
    p.stride = M_PI / 4;
    p.departure_time = 0.1;
    const Report r = recurrence_scan(p);
    const double back = r.table("recurrence_series")->rows.back()[1];
    c.info("N=1 return distance " + std::to_string(back));
    c.require(back < 1e-10, "N=1 rotation did not return");
  }
  {
    RecurrenceParams p;  // N = 8, T = 200 by default
    const Report r = recurrence_scan(p);
    c.require(r.all_passed(), "long scan did not complete certified");
    const Table* minima = r.table("recurrence_minima");
    c.require(minima != nullptr && !minima->rows.empty(), "no local minima recorded");
    if (minima && !minima->rows.empty()) {
      double prev = std::numeric_limits<double>::infinity();
      for (const auto& row : minima->rows) {
        if (row[2] > prev + 1e-15) c.require(false, "running minimum increased");
        prev = row[2];
      }
      c.info("final running minimum " + std::to_string(minima->rows.back()[2]));
    }
  }
}

// -------------------------------------------------------------------------
// 12. Theorem 1.1 probe: F_{2N} - F_N Cauchy in L^1 and L^2

void criterion_density_cauchy(Criterion& c) {
  GaussianSpec spec;
  spec.k = 6;
  spec.mode_cutoff = 128;
  spec.seed = 1;
  const double R = 8.0;
  const int count = 4000;
  const std::vector<int> cuts{16, 32, 64};
  const int workers = default_workers();
  for (int j = 0; j <= spec.k; ++j) (void)energy(j);

  // F at every needed cutoff on common samples (F_N reads pi_N u only, so a
  // single 128-band ensemble serves every pair).
  std::vector<std::vector<double>> f_at(4, std::vector<double>(count));
  const std::vector<int> all_cuts{16, 32, 64, 128};
  parallel_for(count, workers, [&](std::size_t i) {
    const FourierField u = sample_mu_at(spec, i);
    for (std::size_t ci = 0; ci < all_cuts.size(); ++ci)
      f_at[ci][i] = density_f(u, spec.k, all_cuts[ci], R, spec.alpha_c).value;
  });

  for (double q : {1.0, 2.0}) {
    std::vector<double> norms;
    for (std::size_t ci = 0; ci < cuts.size(); ++ci) {
      std::vector<double> powered(count);
      for (int i = 0; i < count; ++i)
        powered[i] = std::pow(std::abs(f_at[ci + 1][i] - f_at[ci][i]), q);
      norms.push_back(std::pow(pairwise_sum(powered) / count, 1.0 / q));
    }
    std::ostringstream os;
    os << "q=" << q << " norms";
    for (double v : norms) os << " " << v;
    c.info(os.str());
    for (std::size_t i = 1; i < norms.size(); ++i)
      c.require(norms[i] < norms[i - 1], "L^q gap not decreasing at q=" + std::to_string(q));
  }
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  auto wanted = [&](int id) { return selected.empty() || selected.count(id) > 0; };
  const int workers = default_workers();

  if (wanted(1)) run_criterion(1, "operator identity suite", 5.0, criterion_operator_identities);
  if (wanted(2)) run_criterion(2, "Matsuno recursion and conservation", 120.0, criterion_matsuno);
  if (wanted(3))
    run_criterion(3, "energy normalization and cubic structure", 0.0, criterion_energy_structure);
  if (wanted(4)) run_criterion(4, "three-way derivative oracle triangle", 120.0, criterion_three_way);
  if (wanted(5)) run_criterion(5, "lemma-prod sum asymptotics", 30.0, [&](Criterion& c) {
    const Report r = check_lemma_prod(LemmaProdParams{});
    for (const auto& v : r.verdicts)
      c.require(v.pass, v.criterion + " measured " + std::to_string(v.measured));
  });
  if (wanted(6)) run_criterion(6, "G_N/H_N/L_N decay in L^q(d mu)", 900.0, [&](Criterion& c) {
    GnDecayParams p;
    p.workers = workers;
    const Report r = check_gn_decay(p);
    for (const auto& v : r.verdicts)
      c.require(v.pass, v.criterion + " measured " + std::to_string(v.measured));
    for (const auto& [name, f] : r.fits)
      if (name == "gn_decay_j6") c.info("G_N slope " + std::to_string(f.slope));
  });
  if (wanted(7)) run_criterion(7, "truncated-flow convergence", 300.0, [&](Criterion& c) {
    const Report r = check_flow_convergence(FlowConvergenceParams{});
    for (const auto& v : r.verdicts)
      c.require(v.pass, v.criterion + " measured " + std::to_string(v.measured));
  });
  if (wanted(8)) run_criterion(8, "Liouville divergence", 0.0, [&](Criterion& c) {
    const Report r = check_liouville(LiouvilleParams{});
    for (const auto& v : r.verdicts)
      c.require(v.pass, v.criterion + " measured " + std::to_string(v.measured));
  });
  if (wanted(9)) run_criterion(9, "finite-N invariance surrogate", 1200.0, [&](Criterion& c) {
    InvarianceParams p;
    p.workers = workers;
    const Report r = check_invariance(p);
    for (const auto& v : r.verdicts) {
      c.info(v.criterion + " measured " + std::to_string(v.measured) + " (" + v.note + ")");
      c.require(v.pass, v.criterion + " below threshold " + std::to_string(v.threshold));
    }
  });
  if (wanted(10)) run_criterion(10, "sampler calibration", 0.0, criterion_sampler_calibration);
  if (wanted(11)) run_criterion(11, "recurrence scans", 0.0, criterion_recurrence);
  if (wanted(12)) run_criterion(12, "weighted-density Cauchy probe", 0.0, criterion_density_cauchy);

  if (g_failures > 0) {
    std::cout << g_failures << " criterion(s) failed" << std::endl;
    return 1;
  }
  std::cout << "all criteria passed" << std::endl;
  return 0;
}
