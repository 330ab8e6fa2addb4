#pragma once

#include <complex>

#include "bolab/expr.hpp"
#include "bolab/fourier_field.hpp"

namespace bolab {

struct EvalOptions {
  // Hard ceiling on the padded bandwidth any single term may require.
  int bandwidth_cap = 1 << 20;
};

/// Evaluates int e(u) dx by bottom-up substitution: Leaf -> u, Apply -> the
/// word as a Fourier multiplier, Product -> exact pointwise product. Products
/// under the integral sign are integrated by grid quadrature at a shared,
/// alias-free resolution; factor values are memoized across terms.
std::complex<double> eval_expr(const Expr& e, const FourierField& u, const EvalOptions& opt = {});

/// The field e(u) itself (sum of term values).
FourierField eval_field(const Expr& e, const FourierField& u, const EvalOptions& opt = {});

/// L^2 gradient of u -> int e(u) dx: the unique real field g with
/// d/deps int e(u + eps h) dx |_0 = 2pi sum_n g^(-n) h^(n) for all real h.
/// Computed by reverse-mode differentiation through the evaluation graph.
/// Rejects densities that are not real-valued on real fields.
///
/// band limits the modes the gradient is resolved on; the default covers the
/// full support (max homogeneity - 1) * bandwidth(u). Callers pairing the
/// gradient against a band-limited direction may restrict it.
FourierField grad_integral(const Expr& e, const FourierField& u, const EvalOptions& opt = {},
                           int band = -1);

}  // namespace bolab
