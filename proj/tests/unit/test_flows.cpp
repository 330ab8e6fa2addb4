#include <cmath>

#include "bolab/energy.hpp"
#include "bolab/eval.hpp"
#include "bolab/expr.hpp"
#include "bolab/flows.hpp"
#include "bolab/measures.hpp"
#include "doctest.h"
#include "test_helpers.hpp"

using namespace bolab;
using bolab::testing::random_real_field;

TEST_CASE("linear propagation rotates pure modes") {
  for (int n : {1, 2, 5}) {
    const double t = 0.37;
    const FourierField rotated = linear_propagate(FourierField::cosine(n), t);
    // cos(n x - n^2 t) = cos(n^2 t) cos(n x) + sin(n^2 t) sin(n x)
    FourierField expected = FourierField::cosine(n, std::cos(n * n * t)) +
                            FourierField::sine(n, std::sin(n * n * t));
    CHECK(max_abs_diff(rotated, expected) < 1e-14);
  }
}

TEST_CASE("linear propagation group law and isometry") {
  const FourierField u = random_real_field(24, 600);
  CHECK(max_abs_diff(linear_propagate(u, 0.0), u) < 1e-15);
  const auto two_step = linear_propagate(linear_propagate(u, 0.4), 0.35);
  CHECK(max_abs_diff(two_step, linear_propagate(u, 0.75)) < 1e-12);
  for (double s : {0.0, 1.0, 2.5})
    CHECK(sobolev_norm(linear_propagate(u, 1.7), s, true) ==
          doctest::Approx(sobolev_norm(u, s, true)).epsilon(1e-13));
}

TEST_CASE("truncated vector field") {
  // Bandwidth above the cutoff: pure dispersion.
  const FourierField high = FourierField::cosine(5);
  const FourierField f = truncated_vector_field(high, 4);
  FourierField lin = FourierField::zeros(5, true);
  lin.set_coeff(5, std::complex<double>(0.0, -25.0) * high.coeff(5));
  CHECK(max_abs_diff(f, lin) < 1e-14);

  // v = cos x, N >= 2: nonlinear part is (1/2) sin 2x.
  const FourierField v = FourierField::cosine(1);
  const FourierField g = truncated_vector_field(v, 2);
  FourierField expected = FourierField::zeros(2, true);
  expected.set_coeff(1, std::complex<double>(0.0, -1.0) * v.coeff(1));
  expected += FourierField::sine(2, 0.5);
  CHECK(max_abs_diff(g, expected) < 1e-14);

  // Zero mean always.
  const FourierField w = random_real_field(12, 610);
  CHECK(std::abs(truncated_vector_field(w, 8).coeff(0)) < 1e-15);
}

TEST_CASE("evolve_truncated at t = 0 and factorization over high modes") {
  const FourierField u = random_real_field(20, 620);
  FlowConfig cfg;
  cfg.truncation = 8;
  CHECK(max_abs_diff(evolve_truncated(u, cfg, 0.0), u) < 1e-15);

  // pi_N Phi^N = Phi~^N pi_N and pi_{>N} Phi^N = S(t) pi_{>N}
  const double t = 0.3;
  const FourierField full = evolve_truncated(u, cfg, t);
  const FourierField low = evolve_truncated(project_low(u, 8), cfg, t);
  const FourierField high = linear_propagate(project_high(u, 8), t);
  CHECK(max_abs_diff(full, low + high) < 1e-12);
  CHECK(max_abs_diff(project_high(full, 8), high) < 1e-13);
}

TEST_CASE("low-mode L^2 norm is conserved to tolerance") {
  GaussianSpec spec;
  spec.k = 6;
  spec.mode_cutoff = 64;
  spec.seed = 904;
  const FourierField u = sample_mu_at(spec, 0);
  FlowConfig cfg;
  cfg.truncation = 32;
  cfg.drift_tolerance = 1e-10;
  const FourierField v = evolve_truncated(u, cfg, 1.0);
  const double l0 = sobolev_norm(project_low(u, 32), 0, true);
  const double l1 = sobolev_norm(project_low(v, 32), 0, true);
  CHECK(std::abs(l1 * l1 - l0 * l0) / (l0 * l0) < 1e-10);
}

TEST_CASE("reversibility of the truncated flow") {
  const FourierField u = random_real_field(16, 630);
  FlowConfig cfg;
  cfg.truncation = 16;
  cfg.dt = 2e-4;
  const FourierField back = evolve_truncated(evolve_truncated(u, cfg, 0.8), cfg, -0.8);
  CHECK(max_abs_diff(u, back) < 1e-11);
}

TEST_CASE("drift violation reports the time") {
  const FourierField u0 = FourierField::cosine(1, 2.0);
  FlowConfig cfg;
  cfg.truncation = 16;
  cfg.dt = 0.2;  // far too coarse
  cfg.drift_tolerance = 1e-14;
  CHECK_THROWS_AS(evolve_truncated(u0, cfg, 2.0), IntegrationError);
}

TEST_CASE("zero field is a fixed point of every flow") {
  const FourierField zero = FourierField::zeros(8, true);
  FlowConfig cfg;
  cfg.truncation = 8;
  CHECK(evolve_truncated(zero, cfg, 1.0).is_zero());
  CHECK(evolve_full(zero, cfg, 1.0).is_zero());
  CHECK(truncated_vector_field(zero, 8).is_zero());
}

TEST_CASE("evolve_full certifies itself and keeps t = 0 fixed") {
  const FourierField u0 = FourierField::cosine(1, 0.4) + FourierField::sine(2, 0.1);
  FlowConfig cfg;
  cfg.grid_bandwidth = 48;
  cfg.drift_tolerance = 1e-8;
  CHECK(max_abs_diff(evolve_full(u0, cfg, 0.0), u0) < 1e-15);
  SolveCertificate cert;
  (void)evolve_full(u0, cfg, 0.5, &cert);
  CHECK(cert.richardson_error < 1e-10);
  CHECK(!cert.tail_warning);
}

TEST_CASE("small data stays close to the linear group at second order") {
  // ||Phi_t(eps phi) - S(t)(eps phi)|| = O(eps^2 t): halving eps divides the
  // gap by about four.
  const FourierField phi = FourierField::cosine(1) + FourierField::sine(2, 0.5);
  FlowConfig cfg;
  cfg.grid_bandwidth = 32;
  const double t = 1.0;
  auto gap = [&](double eps) {
    const FourierField dev =
        (evolve_full(eps * phi, cfg, t) - linear_propagate(eps * phi, t)).as_complex();
    return sobolev_norm(dev, 0.0, false);
  };
  const double g1 = gap(1e-2);
  const double g2 = gap(5e-3);
  CHECK(g1 / g2 == doctest::Approx(4.0).epsilon(0.15));
  CHECK(gap(1e-3) < 1e-5);
}

TEST_CASE("energy drift below 1e-7 for smooth data over T = 1") {
  const FourierField u0 = FourierField::cosine(1, 0.4) + FourierField::sine(3, 0.1);
  FlowConfig cfg;
  cfg.grid_bandwidth = 64;
  cfg.dt = 1e-3;
  cfg.drift_tolerance = 1e-8;
  const FourierField u1 = evolve_full(u0, cfg, 1.0);
  for (int k = 0; k <= 4; ++k) {
    const double a = eval_energy(k, u0);
    const double b = eval_energy(k, u1);
    CHECK(std::abs(b - a) / std::max(1e-12, std::abs(a)) < 1e-7);
  }
}

TEST_CASE("scheme order: drift shrinks at fourth order under dt halving") {
  const FourierField u0 = FourierField::cosine(1, 1.2) + FourierField::sine(2, 0.7);
  FlowConfig cfg;
  cfg.grid_bandwidth = 32;
  cfg.drift_tolerance = 1.0;
  auto drift = [&](double dt) {
    const FourierField u1 = evolve_full_raw(u0, cfg, 1.0, dt);
    return std::abs(eval_energy(2, u1) - eval_energy(2, u0));
  };
  const double d1 = drift(0.04);
  const double d2 = drift(0.02);
  const double order = std::log2(d1 / d2);
  CHECK(order > 3.5);
  CHECK(order < 4.5);
}

TEST_CASE("etdrk4 agrees with the integrating-factor scheme") {
  const FourierField u = random_real_field(16, 640);
  FlowConfig a;
  a.truncation = 16;
  FlowConfig b = a;
  b.scheme = Scheme::EtdRk4;
  b.drift_tolerance = 1e-6;
  const FourierField ua = evolve_truncated(u, a, 0.5);
  const FourierField ub = evolve_truncated(u, b, 0.5);
  CHECK(max_abs_diff(ua, ub) < 1e-6);
}

TEST_CASE("flow_energy_derivative vanishing cases") {
  CHECK(flow_energy_derivative(FourierField::cosine(1), 2, 6) == 0.0);
  const FourierField low = random_real_field(8, 650);
  CHECK(flow_energy_derivative(low, 16, 4) == 0.0);  // bandwidth <= N/2
}

TEST_CASE("flow_energy_derivative: three-way agreement at N = 16") {
  GaussianSpec spec;
  spec.k = 6;
  spec.mode_cutoff = 32;
  spec.seed = 660;
  const int cutoff = 16;
  const int j = 6;
  const FourierField u = sample_mu_at(spec, 0);

  const double chain = flow_energy_derivative(u, cutoff, j);

  const EnergyExpr& e = energy(j);
  const FourierField v = project_low(u, cutoff);
  const double symbolic = e.lambda() * eval_expr(star_n(e.density, cutoff), v).real();

  FlowConfig cfg;
  cfg.truncation = cutoff;
  cfg.dt = 1e-5;
  const double h = 1e-5;
  const double fd = (eval_energy(j, project_low(evolve_truncated(u, cfg, h), cutoff)) -
                     eval_energy(j, project_low(evolve_truncated(u, cfg, -h), cutoff))) /
                    (2 * h);

  const double scale = std::max({1e-12, std::abs(chain), std::abs(symbolic)});
  CHECK(std::abs(chain - symbolic) / scale < 1e-9);
  CHECK(std::abs(chain - fd) / scale < 1e-5);
}

TEST_CASE("config validation") {
  const FourierField u = random_real_field(4, 660);
  FlowConfig bad;
  bad.truncation = 4;
  bad.dt = -1.0;
  CHECK_THROWS_AS(evolve_truncated(u, bad, 0.1), std::invalid_argument);
  FlowConfig bad2;
  bad2.truncation = 4;
  bad2.drift_tolerance = 0.0;
  CHECK_THROWS_AS(evolve_truncated(u, bad2, 0.1), std::invalid_argument);
}

TEST_CASE("bandwidth saturation raises the tail warning") {
  // Strong data on a tiny grid spills energy into the top of the band.
  const FourierField u0 = FourierField::cosine(1, 1.5);
  FlowConfig cfg;
  cfg.grid_bandwidth = 8;
  cfg.dt = 1e-3;
  cfg.drift_tolerance = 1e-3;
  SolveCertificate cert;
  (void)evolve_full(u0, cfg, 1.0, &cert);
  CHECK(cert.tail_fraction > 1e-10);
  CHECK(cert.tail_warning);
}
