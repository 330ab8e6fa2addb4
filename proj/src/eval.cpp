#include "bolab/eval.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "bolab/fft.hpp"

namespace bolab {

namespace {

using cdouble = std::complex<double>;
using Grid = std::vector<cdouble>;

struct Workspace {
  const FourierField* u = nullptr;
  EvalOptions opt;

  std::unordered_map<NodeRef, int> bw;
  std::unordered_map<NodeRef, FourierField> fourier;
  std::unordered_map<NodeRef, std::vector<std::pair<int, Grid>>> grids;
  std::vector<NodeRef> topo;  // postorder of first visits
  std::unordered_map<NodeRef, bool> visited;

  int bw_bound(NodeRef n) {
    auto it = bw.find(n);
    if (it != bw.end()) return it->second;
    int b = 0;
    switch (n->kind()) {
      case ExprNode::Kind::Leaf:
        b = u->bandwidth();
        break;
      case ExprNode::Kind::Apply: {
        b = bw_bound(n->child());
        for (const auto& a : n->word().atoms())
          if (a.kind == Atom::Kind::ProjLow) b = std::min(b, a.order);
        break;
      }
      case ExprNode::Kind::Product:
        for (auto* c : n->children()) b += bw_bound(c);
        break;
    }
    if (b > opt.bandwidth_cap)
      throw std::runtime_error("bandwidth cap exceeded by term " + n->to_string());
    bw[n] = b;
    return b;
  }

  void mark_visited(NodeRef n) {
    if (visited[n]) return;
    visited[n] = true;
    if (n->kind() == ExprNode::Kind::Apply) mark_visited(n->child());
    if (n->kind() == ExprNode::Kind::Product)
      for (auto* c : n->children()) mark_visited(c);
    topo.push_back(n);
  }

  const FourierField& fourier_value(NodeRef n) {
    auto it = fourier.find(n);
    if (it != fourier.end()) return it->second;
    FourierField f;
    switch (n->kind()) {
      case ExprNode::Kind::Leaf:
        f = *u;
        break;
      case ExprNode::Kind::Apply:
        f = apply_word(n->word(), fourier_value(n->child()));
        break;
      case ExprNode::Kind::Product: {
        const int b = bw_bound(n);
        const int m = fft::good_size(2 * b + 1);
        Grid acc = grid_value(n->children()[0], m);
        for (size_t i = 1; i < n->children().size(); ++i) {
          const Grid& g = grid_value(n->children()[i], m);
          for (int j = 0; j < m; ++j) acc[j] *= g[j];
        }
        f = FourierField::from_grid(acc, b, false);
        break;
      }
    }
    return fourier.emplace(n, std::move(f)).first->second;
  }

  const Grid& grid_value(NodeRef n, int m) {
    auto& slots = grids[n];
    for (auto& [mm, g] : slots)
      if (mm == m) return g;
    Grid g;
    if (n->kind() == ExprNode::Kind::Product) {
      g = grid_value(n->children()[0], m);
      for (size_t i = 1; i < n->children().size(); ++i) {
        const Grid& h = grid_value(n->children()[i], m);
        for (int j = 0; j < m; ++j) g[j] *= h[j];
      }
    } else {
      g = fourier_value(n).grid_values(m);
    }
    auto& slots2 = grids[n];  // grids may have rehashed during recursion
    slots2.emplace_back(m, std::move(g));
    return slots2.back().second;
  }

  cdouble mode0(NodeRef n, int shared_m) {
    switch (n->kind()) {
      case ExprNode::Kind::Leaf:
        return u->coeff(0);
      case ExprNode::Kind::Apply:
        return n->word().symbol(0) * mode0(n->child(), shared_m);
      case ExprNode::Kind::Product: {
        const int need = bw_bound(n) + 1;
        const int m = shared_m >= need ? shared_m : fft::good_size(need);
        const Grid& g = grid_value(n, m);
        cdouble acc = 0.0;
        for (const auto& z : g) acc += z;
        return acc / static_cast<double>(m);
      }
    }
    return 0.0;
  }
};

int shared_grid_size(Workspace& ws, const Expr& e) {
  int need = 1;
  for (const auto& t : e.terms()) need = std::max(need, ws.bw_bound(t.node) + 1);
  return fft::good_size(need);
}

}  // namespace

std::complex<double> eval_expr(const Expr& e, const FourierField& u, const EvalOptions& opt) {
  if (e.is_zero()) return 0.0;
  Workspace ws;
  ws.u = &u;
  ws.opt = opt;
  const int m = shared_grid_size(ws, e);
  cdouble acc = 0.0;
  for (const auto& t : e.terms()) acc += t.coeff.to_complex() * ws.mode0(t.node, m);
  return 2.0 * M_PI * acc;
}

FourierField eval_field(const Expr& e, const FourierField& u, const EvalOptions& opt) {
  Workspace ws;
  ws.u = &u;
  ws.opt = opt;
  FourierField acc = FourierField::zeros(0, false);
  for (const auto& t : e.terms()) {
    FourierField f = ws.fourier_value(t.node);
    f *= t.coeff.to_complex();
    acc += f;
  }
  return acc;
}

namespace {

// Reverse-mode state. All sensitivities are carried on the fixed readout band
// |n| <= gband (the modes the gradient is resolved on); grid cotangents are
// padded so that reading bins at |n| <= gband never aliases against the
// cotangent's spectral content. Everything is C-linear in the coefficients,
// so plain complex sensitivities propagate without conjugation.
struct Reverse {
  Workspace& ws;
  int gband;
  std::unordered_map<NodeRef, std::vector<cdouble>> cot_f;  // size 2*gband+1
  std::unordered_map<NodeRef, std::vector<std::pair<int, Grid>>> cot_g;

  Reverse(Workspace& w, int band) : ws(w), gband(band) {}

  std::vector<cdouble>& coeff_slot(NodeRef n) {
    auto it = cot_f.find(n);
    if (it != cot_f.end()) return it->second;
    return cot_f.emplace(n, std::vector<cdouble>(2 * gband + 1, 0.0)).first->second;
  }

  Grid& grid_slot(NodeRef n, int m) {
    auto& slots = cot_g[n];
    for (auto& [mm, g] : slots)
      if (mm == m) return g;
    slots.emplace_back(m, Grid(m, 0.0));
    return slots.back().second;
  }

  // Seeds d(integral term)/d(...) for a term under the integral sign.
  void seed_mode0(NodeRef n, cdouble weight, int shared_m) {
    if (weight == 0.0) return;
    switch (n->kind()) {
      case ExprNode::Kind::Leaf: {
        auto& s = coeff_slot(n);
        s[gband] += weight;  // d/d u^(0)
        break;
      }
      case ExprNode::Kind::Apply:
        seed_mode0(n->child(), weight * n->word().symbol(0), shared_m);
        break;
      case ExprNode::Kind::Product: {
        Grid& cg = grid_slot(n, shared_m);
        const cdouble w = weight / static_cast<double>(shared_m);
        for (auto& z : cg) z += w;
        break;
      }
    }
  }

  void run(std::vector<cdouble>& leaf_sens) {
    // Parents appear after children in ws.topo, so iterate in reverse.
    for (auto it = ws.topo.rbegin(); it != ws.topo.rend(); ++it) {
      NodeRef n = *it;

      std::vector<cdouble> sens;
      if (auto itf = cot_f.find(n); itf != cot_f.end()) sens = std::move(itf->second);

      if (n->kind() == ExprNode::Kind::Product) {
        // A coefficient sensitivity (from an enclosing word) converts to a
        // grid cotangent; the padding keeps both the coefficient extraction
        // and the later leaf readout alias-free.
        if (!sens.empty() && !all_zero(sens)) {
          const int bwn = ws.bw_bound(n);
          const int mc = fft::good_size(2 * (bwn + gband) + 1);
          Grid bins(mc, 0.0);
          for (int k = -gband; k <= gband; ++k) bins[((k % mc) + mc) % mc] += sens[k + gband];
          fft::forward(bins);
          Grid& cg = grid_slot(n, mc);
          const double inv = 1.0 / mc;
          for (int j = 0; j < mc; ++j) cg[j] += bins[j] * inv;
        }
        auto itg = cot_g.find(n);
        if (itg == cot_g.end()) continue;
        for (auto& [m, cg] : itg->second) {
          if (all_zero(cg)) continue;
          distribute_product(n, m, cg);
        }
        continue;
      }

      // Leaf / Apply: fold grid cotangents into the coefficient sensitivity.
      if (auto itg = cot_g.find(n); itg != cot_g.end()) {
        if (sens.empty()) sens.assign(2 * gband + 1, 0.0);
        for (auto& [m, cg] : itg->second) {
          Grid bins = std::move(cg);
          fft::backward(bins);
          for (int k = -gband; k <= gband; ++k) sens[k + gband] += bins[((k % m) + m) % m];
        }
      }
      if (sens.empty() || all_zero(sens)) continue;

      if (n->kind() == ExprNode::Kind::Leaf) {
        for (int k = -gband; k <= gband; ++k) leaf_sens[k + gband] += sens[k + gband];
      } else {  // Apply
        auto& cs = coeff_slot(n->child());
        for (int k = -gband; k <= gband; ++k) {
          if (sens[k + gband] == 0.0) continue;
          cs[k + gband] += sens[k + gband] * n->word().symbol(k);
        }
      }
    }
  }

 private:
  static bool all_zero(const std::vector<cdouble>& v) {
    for (const auto& z : v)
      if (z != 0.0) return false;
    return true;
  }

  void distribute_product(NodeRef n, int m, const Grid& cg) {
    const auto& cs = n->children();
    const size_t k = cs.size();
    std::vector<const Grid*> gs(k);
    for (size_t i = 0; i < k; ++i) gs[i] = &ws.grid_value(cs[i], m);
    Grid prefix(m, 1.0), suffix(m, 1.0);
    std::vector<Grid> prefixes(k, Grid());
    for (size_t i = 0; i < k; ++i) {
      prefixes[i] = prefix;
      for (int j = 0; j < m; ++j) prefix[j] *= (*gs[i])[j];
    }
    for (size_t i = k; i-- > 0;) {
      Grid& slot = grid_slot(cs[i], m);
      for (int j = 0; j < m; ++j) slot[j] += cg[j] * prefixes[i][j] * suffix[j];
      if (i > 0)
        for (int j = 0; j < m; ++j) suffix[j] *= (*gs[i])[j];
    }
  }
};

}  // namespace

FourierField grad_integral(const Expr& e, const FourierField& u, const EvalOptions& opt,
                           int band) {
  if (!(e == e.conjugated()))
    throw std::invalid_argument("grad_integral requires a real-valued density");
  if (!u.is_real()) throw std::invalid_argument("grad_integral expects a real field");
  if (e.is_zero()) return FourierField::zeros(0, true);

  Workspace ws;
  ws.u = &u;
  ws.opt = opt;

  const int full_band = std::max(0, (e.max_homogeneity() - 1) * u.bandwidth());
  const int gband = band < 0 ? full_band : std::min(band, full_band);

  int max_term_bw = 0;
  for (const auto& t : e.terms()) max_term_bw = std::max(max_term_bw, ws.bw_bound(t.node));
  const int m = fft::good_size(max_term_bw + gband + 1);

  // Forward sweep: populate values and the topological order.
  for (const auto& t : e.terms()) {
    ws.mark_visited(t.node);
    (void)ws.mode0(t.node, m);
  }

  Reverse rev(ws, gband);
  const double two_pi = 2.0 * M_PI;
  for (const auto& t : e.terms()) rev.seed_mode0(t.node, t.coeff.to_complex() * two_pi, m);

  std::vector<cdouble> leaf_sens(2 * gband + 1, 0.0);
  rev.run(leaf_sens);

  // dE[h] = sum_n s(n) h^(n) and the declared pairing is 2pi sum g^(-n) h^(n),
  // so g^(n) = s(-n) / 2pi; enforce the Hermitian symmetry of the result.
  FourierField g = FourierField::zeros(gband, true);
  for (int n = 1; n <= gband; ++n) {
    const cdouble a = leaf_sens[-n + gband] / two_pi;           // g^(n)
    const cdouble b = std::conj(leaf_sens[n + gband]) / two_pi; // conj(g^(-n))
    g.set_coeff(n, 0.5 * (a + b));
  }
  g.trim();
  return g;
}

}  // namespace bolab
