#pragma once

#include "bolab/eval.hpp"
#include "bolab/expr.hpp"
#include "bolab/fourier_field.hpp"

namespace bolab {

/// The conserved energy E_{k/2} = ||u||^2_{Hdot^{k/2}} + R_{k/2}(u).
///
/// density is exact-rational; the energy value is (lambda_rat / pi) times its
/// integral. lambda_rat is determined symbolically from the quadratic
/// homogeneous part so that the quadratic integral equals sum |n|^k |u_n|^2.
struct EnergyExpr {
  int k = 0;
  Expr density;            // realified w_{k+2}(u/4), unscaled
  Expr canonical_density;  // same integral, cubic part in normal form
  Rational lambda_rat;

  double lambda() const { return lambda_rat.convert_to<double>() / M_PI; }
};

/// Memoized energy construction; throws on a degenerate quadratic part.
const EnergyExpr& energy(int k);

/// E_{k/2}(u) for real u.
double eval_energy(int k, const FourierField& u, const EvalOptions& opt = {});

/// R_{k/2}(u) = E_{k/2}(u) - ||u||^2_{Hdot^{k/2}}.
double energy_remainder(int k, const FourierField& u, const EvalOptions& opt = {});

/// L^2 gradient of E_{k/2} under the pairing of grad_integral.
FourierField grad_energy(int k, const FourierField& u, const EvalOptions& opt = {},
                         int band = -1);

/// Rewrites the cubic part of a density, modulo exact derivatives, into the
/// canonical combination of int (D1 dx^{a1} u)(D2 dx^{a2} u)(D3 dx^{a3} u)
/// monomials with D in {Id, H}: products are flattened with the adjoint
/// transfer int P_-(f) g = int f P_+(g), and the result is reduced by exact
/// Gaussian elimination over integration-by-parts and Hilbert product
/// identities, eliminating high derivative sups first. Non-cubic terms pass
/// through unchanged.
Expr canonicalize_cubic(const Expr& e);

}  // namespace bolab
