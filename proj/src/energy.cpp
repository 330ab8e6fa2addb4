#include "bolab/energy.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "bolab/matsuno.hpp"

namespace bolab {

namespace {

// Exact diagonal data of a projector-free multiplier word: the symbol at
// wavenumber n is lp * (i n)^alpha for n > 0 and lm * (i n)^alpha for n < 0.
struct SignedSymbol {
  int alpha = 0;
  CRat lp{1};
  CRat lm{1};
};

SignedSymbol signed_symbol(const OperatorWord& w) {
  SignedSymbol s;
  for (const auto& a : w.atoms()) {
    switch (a.kind) {
      case Atom::Kind::Dx:
        s.alpha += a.order;
        break;
      case Atom::Kind::Hil:
        s.lp *= -CRat::i();
        s.lm *= CRat::i();
        break;
      case Atom::Kind::PPlus:
        s.lm = CRat(0);
        break;
      case Atom::Kind::PMinus:
        s.lp = CRat(0);
        break;
      default:
        throw std::invalid_argument("word not supported in symbolic canonicalization: " +
                                    w.to_string());
    }
  }
  return s;
}

CRat symbol_at_zero(const OperatorWord& w) {
  CRat s(1);
  for (const auto& a : w.atoms()) {
    switch (a.kind) {
      case Atom::Kind::Dx:
        return CRat(0);
      case Atom::Kind::Hil:
        return CRat(0);
      case Atom::Kind::PPlus:
      case Atom::Kind::PMinus:
        s *= CRat::fraction(1, 2);
        break;
      case Atom::Kind::ProjHigh:
        return CRat(0);
      case Atom::Kind::ProjLow:
      case Atom::Kind::SmoothPow:
        break;
    }
  }
  return s;
}

// i^p as an exact coefficient.
CRat i_pow(int p) {
  switch (((p % 4) + 4) % 4) {
    case 0:
      return CRat(1);
    case 1:
      return CRat::i();
    case 2:
      return CRat(-1);
    default:
      return -CRat::i();
  }
}

// ---------------------------------------------------------------------------
// Quadratic part: symbol extraction and the normalization constant.

struct FactorData {
  SignedSymbol sym;
};

bool is_monomial_factor(NodeRef n) {
  return n->kind() == ExprNode::Kind::Leaf ||
         (n->kind() == ExprNode::Kind::Apply && n->child()->kind() == ExprNode::Kind::Leaf);
}

SignedSymbol factor_symbol(NodeRef n) {
  if (n->kind() == ExprNode::Kind::Leaf) return {};
  return signed_symbol(n->word());
}

// gamma with int(quadratic part) = 2 pi gamma sum_{p>0} p^k |u_p|^2.
Rational quadratic_symbol_coefficient(const Expr& quad, int k) {
  CRat gamma(0);
  for (const auto& t : quad.terms()) {
    CRat c = t.coeff;
    NodeRef n = t.node;
    while (n->kind() == ExprNode::Kind::Apply && !is_monomial_factor(n)) {
      c *= symbol_at_zero(n->word());
      n = n->child();
    }
    if (c.is_zero()) continue;
    if (n->kind() != ExprNode::Kind::Product || n->children().size() != 2 ||
        !is_monomial_factor(n->children()[0]) || !is_monomial_factor(n->children()[1]))
      throw std::logic_error("unexpected quadratic term shape: " + t.node->to_string());
    const SignedSymbol s1 = factor_symbol(n->children()[0]);
    const SignedSymbol s2 = factor_symbol(n->children()[1]);
    if (s1.alpha + s2.alpha != k)
      throw std::logic_error("quadratic term with wrong total derivative order: " +
                             t.node->to_string());
    // n = +p and n = -p branches of 2pi sum_n sigma1(n) sigma2(-n) u_n u_{-n}.
    CRat a = s1.lp * s2.lm * i_pow(s1.alpha) * (i_pow(s2.alpha) * ((s2.alpha % 2) ? CRat(-1) : CRat(1)));
    CRat b = s1.lm * s2.lp * (i_pow(s1.alpha) * ((s1.alpha % 2) ? CRat(-1) : CRat(1))) * i_pow(s2.alpha);
    gamma += c * (a + b);
  }
  if (!gamma.is_real())
    throw std::logic_error("quadratic symbol is not real; realification failed");
  return gamma.re;
}

// ---------------------------------------------------------------------------
// Cubic canonicalization.

// One decorated factor: D dx^alpha u with D in {Id, H}.
struct DecFactor {
  int alpha = 0;
  int h = 0;
  auto operator<=>(const DecFactor&) const = default;
};
using DecMono = std::array<DecFactor, 3>;

DecMono sorted_mono(DecMono m) {
  std::sort(m.begin(), m.end());
  return m;
}

int sup_alpha(const DecMono& m) { return std::max({m[0].alpha, m[1].alpha, m[2].alpha}); }
int min_alpha(const DecMono& m) { return std::min({m[0].alpha, m[1].alpha, m[2].alpha}); }

// Elimination priority: higher sup first, then more Hilbert decorations (so
// plain-derivative monomials survive), with the coupled decoration
// u (H dx^m u) dx^{m+1} u held back last so Prop-2.2 reductions land on it.
struct MonoPriority {
  bool operator()(const DecMono& a, const DecMono& b) const {
    const int sa = sup_alpha(a), sb = sup_alpha(b);
    if (sa != sb) return sa > sb;
    const bool ca = is_coupled_decoration(a), cb = is_coupled_decoration(b);
    if (ca != cb) return cb;  // coupled decoration sorts last
    const int ma = min_alpha(a), mb = min_alpha(b);
    if (ma != mb) return ma > mb;
    const int ha = a[0].h + a[1].h + a[2].h, hb = b[0].h + b[1].h + b[2].h;
    if (ha != hb) return ha > hb;
    return a < b;
  }
  static bool is_coupled_decoration(const DecMono& m) {
    return m[0].alpha == 0 && m[0].h == 0 && m[1].h == 1 && m[2].h == 0 &&
           m[1].alpha + 1 == m[2].alpha;
  }
};

using MonoVec = std::map<DecMono, CRat>;

void add_mono(MonoVec& v, const DecMono& m, const CRat& c) {
  if (c.is_zero()) return;
  auto [it, inserted] = v.emplace(sorted_mono(m), c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) v.erase(it);
  }
}

// Flattens one homogeneity-3 node, modulo exact derivatives, into decorated
// monomials. Group factors are transferred with the adjoint identity.
void flatten_cubic(CRat coeff, NodeRef node, MonoVec& out, int depth = 0) {
  if (depth > 64) throw std::logic_error("cubic flattening did not terminate");
  if (coeff.is_zero()) return;
  switch (node->kind()) {
    case ExprNode::Kind::Leaf:
      return;  // int u dx = 0
    case ExprNode::Kind::Apply: {
      if (is_monomial_factor(node)) return;  // int W u dx = W(0) int u = 0
      flatten_cubic(coeff * symbol_at_zero(node->word()), node->child(), out, depth + 1);
      return;
    }
    case ExprNode::Kind::Product:
      break;
  }

  const auto& cs = node->children();
  std::vector<NodeRef> monos;
  NodeRef group = nullptr;
  for (auto* c : cs) {
    if (is_monomial_factor(c)) {
      monos.push_back(c);
    } else if (c->kind() == ExprNode::Kind::Apply) {
      if (group != nullptr) throw std::logic_error("two grouped factors in a cubic term");
      group = c;
    } else {
      throw std::logic_error("unexpected cubic factor: " + c->to_string());
    }
  }

  if (group != nullptr) {
    // int m * W(P) dx = sign * int P * (W^adj m) dx
    if (monos.size() != 1) throw std::logic_error("grouped cubic term without a single cofactor");
    int sign = 1;
    const OperatorWord wadj = group->word().adjoint(sign);
    NodeRef transferred = ExprNode::apply(wadj, monos[0]);
    std::vector<NodeRef> rebuilt = group->child()->kind() == ExprNode::Kind::Product
                                       ? group->child()->children()
                                       : std::vector<NodeRef>{group->child()};
    rebuilt.push_back(transferred);
    flatten_cubic(coeff * CRat(sign), ExprNode::product(std::move(rebuilt)), out, depth + 1);
    return;
  }

  if (monos.size() != 3) throw std::logic_error("cubic term without three factors");

  // Expand each factor lp P+ + lm P- = c1 Id + c2 H over {Id, H}.
  std::array<std::array<CRat, 2>, 3> weight;  // weight[i][h]
  std::array<int, 3> alpha{};
  for (int i = 0; i < 3; ++i) {
    const SignedSymbol s = factor_symbol(monos[i]);
    alpha[i] = s.alpha;
    weight[i][0] = (s.lp + s.lm) * CRat::fraction(1, 2);
    weight[i][1] = CRat::i() * (s.lp - s.lm) * CRat::fraction(1, 2);
  }
  for (int b = 0; b < 8; ++b) {
    const int h0 = b & 1, h1 = (b >> 1) & 1, h2 = (b >> 2) & 1;
    const CRat c = coeff * weight[0][h0] * weight[1][h1] * weight[2][h2];
    if (c.is_zero()) continue;
    add_mono(out, {DecFactor{alpha[0], h0}, DecFactor{alpha[1], h1}, DecFactor{alpha[2], h2}}, c);
  }
}

// Sparse exact row over the monomial universe.
using Row = std::map<DecMono, CRat, MonoPriority>;

void row_add(Row& r, const DecMono& m, const CRat& c) {
  if (c.is_zero()) return;
  auto [it, inserted] = r.emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) r.erase(it);
  }
}

// All sorted triples of nonnegative derivative orders with the given sum.
std::vector<std::array<int, 3>> alpha_partitions(int sum) {
  std::vector<std::array<int, 3>> out;
  for (int a = 0; 3 * a <= sum; ++a)
    for (int b = a; a + 2 * b <= sum; ++b) out.push_back({a, b, sum - a - b});
  return out;
}

// Toggle an H decoration; fusing H^2 = -Id contributes the returned sign.
int toggle(DecFactor& f) {
  if (f.h) {
    f.h = 0;
    return -1;
  }
  f.h = 1;
  return 1;
}

std::vector<Row> build_relations(int sum) {
  std::vector<Row> rows;

  // Integration by parts: int d/dx (F1 F2 F3) = 0 with total order sum-1.
  if (sum >= 1) {
    for (const auto& a : alpha_partitions(sum - 1)) {
      for (int b = 0; b < 8; ++b) {
        DecMono base{DecFactor{a[0], b & 1}, DecFactor{a[1], (b >> 1) & 1},
                     DecFactor{a[2], (b >> 2) & 1}};
        Row r;
        for (int i = 0; i < 3; ++i) {
          DecMono bumped = base;
          bumped[i].alpha += 1;
          row_add(r, sorted_mono(bumped), CRat(1));
        }
        if (!r.empty()) rows.push_back(std::move(r));
      }
    }
  }

  for (const auto& a : alpha_partitions(sum)) {
    for (int b = 0; b < 8; ++b) {
      DecMono base{DecFactor{a[0], b & 1}, DecFactor{a[1], (b >> 1) & 1},
                   DecFactor{a[2], (b >> 2) & 1}};
      // Hilbert product identity on each factor pair:
      // int (Hf)(Hg)h = int f g h - int f (Hg)(Hh) - int (Hf) g (Hh).
      for (int i = 0; i < 3; ++i) {
        for (int j = i + 1; j < 3; ++j) {
          const int k = 3 - i - j;
          Row r;
          {
            DecMono m = base;
            int s = toggle(m[i]) * toggle(m[j]);
            row_add(r, sorted_mono(m), CRat(s));
          }
          row_add(r, sorted_mono(base), CRat(-1));
          {
            DecMono m = base;
            int s = toggle(m[j]) * toggle(m[k]);
            row_add(r, sorted_mono(m), CRat(s));
          }
          {
            DecMono m = base;
            int s = toggle(m[i]) * toggle(m[k]);
            row_add(r, sorted_mono(m), CRat(s));
          }
          if (!r.empty()) rows.push_back(std::move(r));
        }
      }
      // Vanishing of all-positive (and all-negative) products:
      // int P+f1 P+f2 P+f3 = 0 expanded over {Id, H} gives two real relations.
      if ((b & 7) == 0) {
        Row even, odd;
        for (int bits = 0; bits < 8; ++bits) {
          DecMono m = base;
          int s = 1;
          int count = 0;
          for (int i = 0; i < 3; ++i)
            if ((bits >> i) & 1) {
              s *= toggle(m[i]);
              ++count;
            }
          if (count % 2 == 0)
            row_add(even, sorted_mono(m), CRat(s * ((count / 2) % 2 ? -1 : 1)));
          else
            row_add(odd, sorted_mono(m), CRat(s * (((count - 1) / 2) % 2 ? -1 : 1)));
        }
        if (!even.empty()) rows.push_back(std::move(even));
        if (!odd.empty()) rows.push_back(std::move(odd));
      }
    }
  }
  return rows;
}

// Gauss-Jordan over Q(i): pivot on the highest-priority monomial of each row.
// Returns pivot rows keyed by pivot monomial, each normalized.
std::map<DecMono, Row, MonoPriority> echelonize(std::vector<Row> rows) {
  std::map<DecMono, Row, MonoPriority> pivots;
  for (auto& row : rows) {
    Row r = std::move(row);
    while (!r.empty()) {
      const DecMono lead = r.begin()->first;
      auto it = pivots.find(lead);
      if (it == pivots.end()) break;
      const CRat factor = r.begin()->second;
      for (const auto& [m, c] : it->second) row_add(r, m, -(factor * c));
      // lead entry cancels exactly
    }
    if (r.empty()) continue;
    const CRat lead = r.begin()->second;
    Row norm;
    for (const auto& [m, c] : r) norm.emplace(m, c / lead);
    const DecMono m0 = norm.begin()->first;
    pivots.emplace(m0, std::move(norm));
  }
  // Back-substitute so every pivot row references only non-pivot monomials.
  for (auto it = pivots.rbegin(); it != pivots.rend(); ++it) {
    Row& r = it->second;
    bool changed = true;
    while (changed) {
      changed = false;
      for (auto jt = r.begin(); jt != r.end(); ++jt) {
        if (jt->first == it->first) continue;
        auto pt = pivots.find(jt->first);
        if (pt == pivots.end() || pt->first == it->first) continue;
        const CRat f = jt->second;
        for (const auto& [m, c] : pt->second)
          if (!(m == pt->first)) row_add(r, m, -(f * c));
        r.erase(jt->first);
        changed = true;
        break;
      }
    }
  }
  return pivots;
}

NodeRef mono_node(const DecMono& m) {
  std::vector<NodeRef> fs;
  for (const auto& f : m) {
    OperatorWord w = OperatorWord::dx(f.alpha);
    if (f.h) w = w.then(OperatorWord::hilbert());
    fs.push_back(ExprNode::apply(w, ExprNode::leaf()));
  }
  return ExprNode::product(std::move(fs));
}

// Cache of echelonized relation systems per total derivative order.
const std::map<DecMono, Row, MonoPriority>& relation_pivots(int sum) {
  static std::mutex mutex;
  static std::map<int, std::map<DecMono, Row, MonoPriority>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(sum);
  if (it == cache.end()) it = cache.emplace(sum, echelonize(build_relations(sum))).first;
  return it->second;
}

}  // namespace

Expr canonicalize_cubic(const Expr& e) {
  Expr out;
  std::map<int, MonoVec> by_sum;  // cubic content grouped by total order
  for (const auto& t : e.terms()) {
    if (t.node->homogeneity() != 3) {
      out += Expr(t.coeff, t.node);
      continue;
    }
    MonoVec v;
    flatten_cubic(t.coeff, t.node, v);
    for (const auto& [m, c] : v) {
      const int s = m[0].alpha + m[1].alpha + m[2].alpha;
      add_mono(by_sum[s], m, c);
    }
  }

  for (auto& [sum, vec] : by_sum) {
    const auto& pivots = relation_pivots(sum);
    // Reduce: substitute every pivot monomial by its lower-priority tail.
    Row v;
    for (const auto& [m, c] : vec) row_add(v, m, c);
    bool changed = true;
    while (changed) {
      changed = false;
      for (auto it = v.begin(); it != v.end(); ++it) {
        auto pt = pivots.find(it->first);
        if (pt == pivots.end()) continue;
        const CRat f = it->second;
        v.erase(it);
        for (const auto& [m, c] : pt->second)
          if (!(m == pt->first)) row_add(v, m, -(f * c));
        changed = true;
        break;
      }
    }
    for (const auto& [m, c] : v) out += Expr(c, mono_node(m));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Energy construction

const EnergyExpr& energy(int k) {
  if (k < 0) throw std::invalid_argument("energy index must be >= 0");
  static std::mutex mutex;
  static std::map<int, EnergyExpr> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(k);
  if (it != cache.end()) return it->second;

  const Expr& w = matsuno_w(k + 2, std::max(k + 2, 10));
  // The generating identity with the (-1)^k/k! expansion constants yields
  // densities conserved by u_t + H u_xx + 2 u u_x = 0; u solves the
  // unit-coefficient flow iff u/2 solves that one, so the conserved densities
  // for it are w_{k+2}(u/2).
  Expr scaled = w.leaf_scaled(CRat::fraction(1, 2));
  Expr realified = (scaled + scaled.conjugated()).scaled(CRat::fraction(1, 2));

  EnergyExpr e;
  e.k = k;
  e.density = realified;
  const Rational gamma = quadratic_symbol_coefficient(realified.homogeneous_part(2), k);
  if (gamma == 0) throw std::logic_error("degenerate quadratic part in energy construction");
  e.lambda_rat = Rational(1) / gamma;
  e.canonical_density = canonicalize_cubic(realified);
  return cache.emplace(k, std::move(e)).first->second;
}

double eval_energy(int k, const FourierField& u, const EvalOptions& opt) {
  const EnergyExpr& e = energy(k);
  return e.lambda() * eval_expr(e.density, u, opt).real();
}

double energy_remainder(int k, const FourierField& u, const EvalOptions& opt) {
  const double h = sobolev_norm(u, k / 2.0, true);
  return eval_energy(k, u, opt) - h * h;
}

FourierField grad_energy(int k, const FourierField& u, const EvalOptions& opt, int band) {
  const EnergyExpr& e = energy(k);
  FourierField g = grad_integral(e.density, u, opt, band);
  g *= e.lambda();
  return g;
}

}  // namespace bolab
