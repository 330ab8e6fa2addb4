#pragma once

#include "bolab/expr.hpp"

namespace bolab {

/// n-th Matsuno conservation-law density: w_1 = u and, for n >= 2,
///   w_n = i P_- d_x w_{n-1} + sum_{k=2}^{n} ((-1)^k / k!) sum_{j_1+...+j_k=n} w_{j_1}...w_{j_k},
/// the coefficient-of-eps^n solution of -eps i P_- w_x + (1 - e^{-w}) = eps u.
/// Results are memoized; coefficients are exact elements of Q(i).
const Expr& matsuno_w(int n, int n_max = 10);

/// Truncated power series sum_{k>=1} (-1)^{k+1} W^k / k! of 1 - e^{-W} where
/// W = sum_{j=1}^{order} w[j] eps^j; returns the eps^order coefficient.
/// Exposed for the independent series-composition cross-check.
Expr one_minus_exp_neg_coefficient(const std::vector<Expr>& w, int order);

}  // namespace bolab
