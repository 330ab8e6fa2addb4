#include <cmath>

#include "bolab/eval.hpp"
#include "bolab/flows.hpp"
#include "bolab/matsuno.hpp"
#include "doctest.h"
#include "test_helpers.hpp"

using namespace bolab;
using bolab::testing::random_real_field;

TEST_CASE("w_1 is the bare symbol") { CHECK(matsuno_w(1) == Expr::u()); }

TEST_CASE("w_2 matches the hand expansion") {
  const OperatorWord pdx = OperatorWord::dx(1).then(OperatorWord::p_minus());
  Expr expected(CRat::i(), ExprNode::apply(pdx, ExprNode::leaf()));
  expected += Expr(CRat::fraction(1, 2), ExprNode::product({ExprNode::leaf(), ExprNode::leaf()}));
  CHECK(matsuno_w(2) == expected);
}

TEST_CASE("matsuno_w rejects out-of-range indices") {
  CHECK_THROWS_AS(matsuno_w(0), std::invalid_argument);
  CHECK_THROWS_AS(matsuno_w(11, 10), std::invalid_argument);
}

TEST_CASE("w_n solves the generating identity exactly (series oracle)") {
  // Residual of -eps i P- w_x + (1 - e^{-w}) - eps u at each order n <= 6:
  // [order n] = -i P- d_x w_{n-1} + [1 - e^{-W}]_n - [n == 1] u must vanish,
  // with 1 - e^{-W} expanded by brute-force truncated power-series composition.
  const int n_max = 6;
  std::vector<Expr> w(n_max + 1);
  for (int n = 1; n <= n_max; ++n) w[n] = matsuno_w(n);
  const OperatorWord pdx = OperatorWord::dx(1).then(OperatorWord::p_minus());
  for (int n = 1; n <= n_max; ++n) {
    Expr residual = one_minus_exp_neg_coefficient(w, n);
    if (n >= 2) residual -= w[n - 1].applied(pdx).scaled(CRat::i());
    if (n == 1) residual -= Expr::u();
    CHECK(residual.is_zero());
  }
}

TEST_CASE("w_n carries homogeneities 1..n exactly") {
  for (int n = 1; n <= 8; ++n) {
    const Expr& w = matsuno_w(n);
    CHECK(w.max_homogeneity() == n);
    for (int j = 1; j <= n; ++j) CHECK(!w.homogeneous_part(j).is_zero());
    CHECK(w.homogeneous_part(n + 1).is_zero());
    Expr sum;
    for (int j = 1; j <= n; ++j) sum += w.homogeneous_part(j);
    CHECK(sum == w);
  }
}

TEST_CASE("linear parts of w_n integrate to zero for n >= 2") {
  const FourierField u = random_real_field(16, 23);
  for (int n = 2; n <= 8; ++n) {
    const Expr lin = matsuno_w(n).homogeneous_part(1);
    CHECK(std::abs(eval_expr(lin, u)) < 1e-13);
  }
  // homogeneous_part on a plain cube has no quadratic part
  const Expr cube = Expr::u() * Expr::u() * Expr::u();
  CHECK(cube.homogeneous_part(2).is_zero());
}

TEST_CASE("int w_n drifts below 1e-6 along the Matsuno-normalized flow") {
  // Short certified solve; the full T=1 drift check for n <= 8 runs in the
  // acceptance suite.
  const FourierField u0 = FourierField::cosine(1, 0.25) + FourierField::sine(2, 0.05);
  FlowConfig cfg;
  cfg.grid_bandwidth = 48;
  cfg.dt = 1e-3;
  cfg.drift_tolerance = 1e-8;
  cfg.nonlinear_scale = 2.0;
  const FourierField u1 = evolve_full(u0, cfg, 0.25);
  for (int n = 2; n <= 8; ++n) {
    const Expr& w = matsuno_w(n);
    const double a = eval_expr(w, u0).real();
    const double b = eval_expr(w, u1).real();
    CHECK(std::abs(b - a) / std::max(1e-12, std::abs(a)) < 1e-6);
  }
}
