#include <cmath>

#include "bolab/experiments.hpp"
#include "doctest.h"

using namespace bolab;

TEST_CASE("lemma-prod: S(2) enumerates to 7/4 and the fast evaluator is exact") {
  CHECK(lemma_prod_sum_brute(2) == doctest::Approx(1.75).epsilon(1e-15));
  CHECK(lemma_prod_sum_fast(2) == doctest::Approx(1.75).epsilon(1e-15));
  for (int n = 2; n <= 64; ++n)
    CHECK(std::abs(lemma_prod_sum_fast(n) - lemma_prod_sum_brute(n)) < 1e-12);
}

TEST_CASE("lemma-prod report carries one row per cutoff") {
  LemmaProdParams p;
  p.n_list = {64, 256, 1024};
  p.brute_check_max = 16;
  const Report r = check_lemma_prod(p);
  REQUIRE(r.table("lemma_prod_sum") != nullptr);
  CHECK(r.table("lemma_prod_sum")->rows.size() == 3);
  CHECK(r.all_passed());
}

TEST_CASE("liouville divergence vanishes at random points") {
  LiouvilleParams p;
  p.truncation = 16;
  p.trials = 10;
  p.seed = 4;
  const Report r = check_liouville(p);
  CHECK(r.all_passed());
  const Table* t = r.table("liouville");
  REQUIRE(t != nullptr);
  // first row is the zero field: linear part has zero trace
  CHECK(std::abs(t->rows[0][1]) < 1e-10);
}

TEST_CASE("recurrence: N = 1 is an exact rotation with period 2 pi") {
  RecurrenceParams p;
  p.u0 = FourierField::cosine(1, 0.7);
  p.cfg.truncation = 1;
  p.cfg.grid_bandwidth = 4;
  p.T = 2 * M_PI;
  p.stride = M_PI / 8;
  p.sigma = 1.0;
  p.departure_time = 0.5;
  const Report r = recurrence_scan(p);
  const Table* t = r.table("recurrence_series");
  REQUIRE(t != nullptr);
  CHECK(t->rows.front()[1] == 0.0);
  CHECK(t->rows.back()[1] < 1e-10);  // d(2 pi) returns to zero
}

TEST_CASE("flow convergence on the default datum") {
  FlowConvergenceParams p;
  p.n_list = {8, 16, 32};
  p.reference_bandwidth = 128;
  p.dt = 5e-4;
  const Report r = check_flow_convergence(p);
  const Table* t = r.table("flow_convergence");
  REQUIRE(t != nullptr);
  CHECK(t->rows.size() == 3);
  for (std::size_t i = 1; i < t->rows.size(); ++i) CHECK(t->rows[i][1] < t->rows[i - 1][1]);
  CHECK(p.u0.bandwidth() == 2);
}

TEST_CASE("flow convergence is exact on the zero datum") {
  FlowConvergenceParams p;
  p.u0 = FourierField::zeros(2, true);
  p.n_list = {8, 16};
  p.reference_bandwidth = 32;
  const Report r = check_flow_convergence(p);
  for (const auto& row : r.table("flow_convergence")->rows) CHECK(row[1] < 1e-14);
}

TEST_CASE("conservation report stays within tolerance") {
  ConservationParams p;
  p.k_max = 4;
  p.T = 0.5;
  p.time_samples = 2;
  const Report r = check_conservation(p);
  CHECK(r.all_passed());
}

TEST_CASE("gn-decay rejects a cutoff list outside the sampled band") {
  GnDecayParams p;
  p.n_list = {16, 512};
  p.mode_cutoff = 512;
  CHECK_THROWS_AS(check_gn_decay(p), std::invalid_argument);
  GnDecayParams q;
  q.k = 4;
  CHECK_THROWS_AS(check_gn_decay(q), std::invalid_argument);
}

TEST_CASE("gn-decay smoke run decays in N") {
  GnDecayParams p;
  p.k = 6;
  p.count = 64;
  p.n_list = {8, 16, 32};
  p.mode_cutoff = 64;
  p.seed = 12;
  p.workers = 2;
  const Report r = check_gn_decay(p);
  const Table* t = r.table("gn_decay");
  REQUIRE(t != nullptr);
  REQUIRE(t->rows.size() == 3);
  // G_N column (j = k) strictly decreasing on this smoke grid
  const std::size_t gcol = 1 + 6;
  CHECK(t->rows[1][gcol] < t->rows[0][gcol]);
  CHECK(t->rows[2][gcol] < t->rows[1][gcol]);
}

TEST_CASE("invariance diagnostic: pure rotation leaves Gaussian statistics fixed") {
  InvarianceParams p;
  p.k = 6;
  p.truncation = 8;
  p.count = 400;
  p.mode_cutoff = 16;
  p.t_grid = {0.2};
  p.nonlinear = false;
  p.weighted = false;
  p.min_ess = 100;
  p.workers = 2;
  p.seed = 71;
  const Report r = check_invariance(p);
  CHECK(r.all_passed());
  // pointwise-invariant observables report exactly zero z
  const Table* t = r.table("invariance");
  REQUIRE(t != nullptr);
  const auto names = invariance_observable_names(p.k);
  for (std::size_t o = 0; o < 6; ++o) {  // H^s norms and |coeff|^2 entries
    const double z = t->rows[1][2 + 3 * o + 2];
    CHECK(z == 0.0);
  }
}

TEST_CASE("reports are reproducible from (experiment, params, seed)") {
  LiouvilleParams p;
  p.truncation = 8;
  p.trials = 3;
  const Report a = check_liouville(p);
  const Report b = check_liouville(p);
  CHECK(a.body_json().dump() == b.body_json().dump());

  InvarianceParams ip;
  ip.k = 6;
  ip.truncation = 8;
  ip.count = 50;
  ip.mode_cutoff = 16;
  ip.t_grid = {0.1};
  ip.min_ess = 5;
  ip.seed = 5;
  ip.workers = 1;
  Report r1 = check_invariance(ip);
  ip.workers = 2;
  Report r2 = check_invariance(ip);
  CHECK(r1.body_json().dump() == r2.body_json().dump());
}

TEST_CASE("gn-decay slopes at q = 2 and q = 4 are close and both negative") {
  GnDecayParams p;
  p.k = 6;
  p.count = 200;
  p.n_list = {8, 16, 32};
  p.mode_cutoff = 64;
  p.seed = 9;
  p.workers = 2;
  const Report r2 = check_gn_decay(p);
  p.q = 4.0;
  const Report r4 = check_gn_decay(p);
  double s2 = 0, s4 = 0;
  for (const auto& [name, f] : r2.fits)
    if (name == "gn_decay_j6") s2 = f.slope;
  for (const auto& [name, f] : r4.fits)
    if (name == "gn_decay_j6") s4 = f.slope;
  CHECK(s2 < 0.0);
  CHECK(s4 < 0.0);
  MESSAGE("q=2 slope ", s2, ", q=4 slope ", s4, ", gap ", std::abs(s2 - s4));
}
