#include "bolab/matsuno.hpp"

#include <mutex>
#include <stdexcept>
#include <vector>

namespace bolab {

namespace {

// Coefficients of eps^m in W^k, for W = sum_j w[j] eps^j, built incrementally:
// powers[k][m] = sum_{j} powers[k-1][m-j] * w[j].
struct SeriesTable {
  std::vector<Expr> w;                       // w[1..n], w[0] unused
  std::vector<std::vector<Expr>> powers;     // powers[k][m]
  std::vector<std::vector<bool>> filled;

  bool known(int k, int m) const {
    return k < static_cast<int>(filled.size()) && m < static_cast<int>(filled[k].size()) &&
           filled[k][m];
  }

  void extend_powers(int k_max, int m_max) {
    if (static_cast<int>(powers.size()) <= k_max) {
      powers.resize(k_max + 1);
      filled.resize(k_max + 1);
    }
    for (int k = 1; k <= k_max; ++k) {
      auto& row = powers[k];
      auto& flag = filled[k];
      if (static_cast<int>(row.size()) <= m_max) {
        row.resize(m_max + 1);
        flag.resize(m_max + 1, false);
      }
      for (int m = k; m <= m_max; ++m) {
        if (flag[m]) continue;
        if (k == 1) {
          if (m < static_cast<int>(w.size())) {
            row[m] = w[m];
            flag[m] = true;
          }
          continue;
        }
        Expr acc;
        bool ok = true;
        for (int j = 1; j <= m - (k - 1); ++j) {
          if (j >= static_cast<int>(w.size())) {
            ok = false;
            break;
          }
          if (!known(k - 1, m - j)) {
            ok = false;
            break;
          }
          acc += powers[k - 1][m - j] * w[j];
        }
        if (ok) {
          row[m] = std::move(acc);
          flag[m] = true;
        }
      }
    }
  }
};

}  // namespace

const Expr& matsuno_w(int n, int n_max) {
  if (n < 1) throw std::invalid_argument("matsuno_w requires n >= 1");
  if (n > n_max) throw std::invalid_argument("matsuno_w: n exceeds n_max");

  static std::mutex mutex;
  static SeriesTable table;
  std::lock_guard<std::mutex> lock(mutex);

  if (table.w.empty()) {
    table.w.resize(2);
    table.w[1] = Expr::u();
  }
  const OperatorWord p_minus_dx = OperatorWord::dx(1).then(OperatorWord::p_minus());

  while (static_cast<int>(table.w.size()) <= n) {
    const int m = static_cast<int>(table.w.size());
    // Powers of the already-known partial sum suffice: W^k at order m only
    // involves w_j with j <= m-k+1 <= m-1 for k >= 2.
    table.extend_powers(m, m);
    Expr wm = table.w[m - 1].applied(p_minus_dx).scaled(CRat::i());
    CRat factorial(1);
    CRat sign(1);  // (-1)^k, positive at k = 2
    for (int k = 2; k <= m; ++k) {
      factorial *= CRat(k);
      if (!table.powers[k][m].is_zero()) wm += table.powers[k][m].scaled(sign / factorial);
      sign = -sign;
    }
    table.w.push_back(std::move(wm));
  }
  return table.w[n];
}

Expr one_minus_exp_neg_coefficient(const std::vector<Expr>& w, int order) {
  // [eps^order] of (W - W^2/2! + W^3/3! - ...) with W = sum w[j] eps^j.
  SeriesTable table;
  table.w = w;
  table.extend_powers(order, order);
  Expr acc;
  CRat factorial(1);
  CRat sign(1);
  for (int k = 1; k <= order; ++k) {
    factorial *= CRat(k);
    if (k > 1) sign = -sign;
    if (table.powers[k][order].is_zero()) continue;
    acc += table.powers[k][order].scaled(sign / factorial);
  }
  return acc;
}

}  // namespace bolab
