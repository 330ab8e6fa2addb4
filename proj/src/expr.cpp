#include "bolab/expr.hpp"

#include <algorithm>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "json.hpp"

namespace bolab {

std::string CRat::to_string() const {
  std::ostringstream os;
  if (im == 0) {
    os << re;
  } else if (re == 0) {
    os << im << "*i";
  } else {
    os << "(" << re << (im > 0 ? "+" : "") << im << "*i)";
  }
  return os.str();
}

uint64_t CRat::hash() const {
  std::hash<std::string> h;
  std::ostringstream os;
  os << re << "|" << im;
  return h(os.str());
}

// ---------------------------------------------------------------------------
// Node interning

namespace {

uint64_t mix64(uint64_t h, uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  return h;
}

struct NodeKey {
  ExprNode::Kind kind;
  uint64_t word_hash;
  NodeRef child;
  const std::vector<NodeRef>* children;
  const OperatorWord* word;
};

}  // namespace

class NodeIntern {
 public:
  static NodeIntern& instance() {
    static NodeIntern intern;
    return intern;
  }

  NodeRef leaf() { return leaf_; }

  NodeRef apply(const OperatorWord& w, NodeRef c) {
    uint64_t h = mix64(mix64(2, w.hash()), reinterpret_cast<uint64_t>(c));
    std::lock_guard<std::mutex> lock(mutex_);
    auto range = table_.equal_range(h);
    for (auto it = range.first; it != range.second; ++it) {
      const ExprNode* n = it->second;
      if (n->kind() == ExprNode::Kind::Apply && n->child() == c && n->word() == w) return n;
    }
    auto* n = new ExprNode();
    n->kind_ = ExprNode::Kind::Apply;
    n->word_ = w;
    n->child_ = c;
    n->homogeneity_ = c->homogeneity();
    n->hash_ = h;
    table_.emplace(h, n);
    return n;
  }

  NodeRef product(std::vector<NodeRef>&& cs) {
    uint64_t h = 3;
    for (auto* c : cs) h = mix64(h, reinterpret_cast<uint64_t>(c));
    std::lock_guard<std::mutex> lock(mutex_);
    auto range = table_.equal_range(h);
    for (auto it = range.first; it != range.second; ++it) {
      const ExprNode* n = it->second;
      if (n->kind() == ExprNode::Kind::Product && n->children() == cs) return n;
    }
    auto* n = new ExprNode();
    n->kind_ = ExprNode::Kind::Product;
    int hom = 0;
    for (auto* c : cs) hom += c->homogeneity();
    n->children_ = std::move(cs);
    n->homogeneity_ = hom;
    n->hash_ = h;
    table_.emplace(h, n);
    return n;
  }

 private:
  NodeIntern() {
    auto* n = new ExprNode();
    n->kind_ = ExprNode::Kind::Leaf;
    n->homogeneity_ = 1;
    n->hash_ = 1;
    leaf_ = n;
  }
  std::mutex mutex_;
  std::unordered_multimap<uint64_t, const ExprNode*> table_;
  NodeRef leaf_ = nullptr;
};

NodeRef ExprNode::leaf() { return NodeIntern::instance().leaf(); }

NodeRef ExprNode::apply(const OperatorWord& w, NodeRef c) {
  if (w.empty()) return c;
  if (c->kind() == Kind::Apply) return NodeIntern::instance().apply(c->word().then(w), c->child());
  return NodeIntern::instance().apply(w, c);
}

NodeRef ExprNode::product(std::vector<NodeRef> cs) {
  std::vector<NodeRef> flat;
  flat.reserve(cs.size());
  for (auto* c : cs) {
    if (c->kind() == Kind::Product)
      flat.insert(flat.end(), c->children().begin(), c->children().end());
    else
      flat.push_back(c);
  }
  if (flat.empty()) throw std::invalid_argument("empty product");
  if (flat.size() == 1) return flat[0];
  std::sort(flat.begin(), flat.end(), [](NodeRef a, NodeRef b) { return compare(a, b) < 0; });
  return NodeIntern::instance().product(std::move(flat));
}

int ExprNode::compare(NodeRef a, NodeRef b) {
  if (a == b) return 0;
  if (a->homogeneity() != b->homogeneity()) return a->homogeneity() < b->homogeneity() ? -1 : 1;
  if (a->kind() != b->kind()) return a->kind() < b->kind() ? -1 : 1;
  switch (a->kind()) {
    case Kind::Leaf:
      return 0;
    case Kind::Apply: {
      int w = OperatorWord::compare(a->word(), b->word());
      if (w != 0) return w;
      return compare(a->child(), b->child());
    }
    case Kind::Product: {
      const auto &ca = a->children(), &cb = b->children();
      const size_t n = std::min(ca.size(), cb.size());
      for (size_t i = 0; i < n; ++i) {
        int c = compare(ca[i], cb[i]);
        if (c != 0) return c;
      }
      if (ca.size() != cb.size()) return ca.size() < cb.size() ? -1 : 1;
      return 0;
    }
  }
  return 0;
}

std::string ExprNode::to_string() const {
  switch (kind_) {
    case Kind::Leaf:
      return "u";
    case Kind::Apply:
      return word_.to_string() + "(" + child_->to_string() + ")";
    case Kind::Product: {
      std::string s;
      for (size_t i = 0; i < children_.size(); ++i) {
        if (i) s += "*";
        s += children_[i]->to_string();
      }
      return s;
    }
  }
  return {};
}

// ---------------------------------------------------------------------------
// Expr

Expr::Expr(CRat c, NodeRef n) {
  if (!c.is_zero()) terms_.push_back({std::move(c), n});
}

Expr Expr::u() { return Expr(CRat(1), ExprNode::leaf()); }

void Expr::normalize() {
  std::sort(terms_.begin(), terms_.end(),
            [](const Term& a, const Term& b) { return ExprNode::compare(a.node, b.node) < 0; });
  std::vector<Term> merged;
  merged.reserve(terms_.size());
  for (auto& t : terms_) {
    if (!merged.empty() && merged.back().node == t.node)
      merged.back().coeff += t.coeff;
    else
      merged.push_back(std::move(t));
  }
  merged.erase(std::remove_if(merged.begin(), merged.end(),
                              [](const Term& t) { return t.coeff.is_zero(); }),
               merged.end());
  terms_ = std::move(merged);
}

Expr& Expr::operator+=(const Expr& o) {
  terms_.insert(terms_.end(), o.terms_.begin(), o.terms_.end());
  normalize();
  return *this;
}

Expr& Expr::operator-=(const Expr& o) {
  for (const auto& t : o.terms_) terms_.push_back({-t.coeff, t.node});
  normalize();
  return *this;
}

Expr Expr::operator*(const Expr& o) const {
  Expr out;
  out.terms_.reserve(terms_.size() * o.terms_.size());
  for (const auto& a : terms_)
    for (const auto& b : o.terms_)
      out.terms_.push_back({a.coeff * b.coeff, ExprNode::product({a.node, b.node})});
  out.normalize();
  return out;
}

Expr Expr::scaled(const CRat& c) const {
  if (c.is_zero()) return {};
  Expr out = *this;
  for (auto& t : out.terms_) t.coeff *= c;
  return out;
}

bool Expr::operator==(const Expr& o) const {
  if (terms_.size() != o.terms_.size()) return false;
  for (size_t i = 0; i < terms_.size(); ++i)
    if (terms_[i].node != o.terms_[i].node || !(terms_[i].coeff == o.terms_[i].coeff)) return false;
  return true;
}

Expr Expr::applied(const OperatorWord& w) const {
  Expr out;
  out.terms_.reserve(terms_.size());
  for (const auto& t : terms_) out.terms_.push_back({t.coeff, ExprNode::apply(w, t.node)});
  out.normalize();
  return out;
}

namespace {

NodeRef conj_node(NodeRef n) {
  switch (n->kind()) {
    case ExprNode::Kind::Leaf:
      return n;
    case ExprNode::Kind::Apply:
      return ExprNode::apply(n->word().conjugated(), conj_node(n->child()));
    case ExprNode::Kind::Product: {
      std::vector<NodeRef> cs;
      cs.reserve(n->children().size());
      for (auto* c : n->children()) cs.push_back(conj_node(c));
      return ExprNode::product(std::move(cs));
    }
  }
  return n;
}

}  // namespace

Expr Expr::conjugated() const {
  Expr out;
  out.terms_.reserve(terms_.size());
  for (const auto& t : terms_) out.terms_.push_back({t.coeff.conj(), conj_node(t.node)});
  out.normalize();
  return out;
}

Expr Expr::leaf_scaled(const CRat& scale) const {
  Expr out;
  out.terms_.reserve(terms_.size());
  for (const auto& t : terms_) {
    CRat c = t.coeff;
    for (int j = 0; j < t.node->homogeneity(); ++j) c *= scale;
    out.terms_.push_back({std::move(c), t.node});
  }
  out.normalize();
  return out;
}

Expr Expr::homogeneous_part(int order) const {
  Expr out;
  for (const auto& t : terms_)
    if (t.node->homogeneity() == order) out.terms_.push_back(t);
  return out;
}

int Expr::max_homogeneity() const {
  int m = 0;
  for (const auto& t : terms_) m = std::max(m, t.node->homogeneity());
  return m;
}

std::string Expr::to_string() const {
  if (terms_.empty()) return "0";
  std::string s;
  for (size_t i = 0; i < terms_.size(); ++i) {
    if (i) s += " + ";
    s += terms_[i].coeff.to_string() + "*" + terms_[i].node->to_string();
  }
  return s;
}

// ---------------------------------------------------------------------------
// Erasure, gradings, star substitution

namespace {

std::pair<OperatorWord, CRat> erase_word(const OperatorWord& w) {
  OperatorWord out;
  CRat factor(1);
  for (const auto& a : w.atoms()) {
    switch (a.kind) {
      case Atom::Kind::Hil:
        break;
      case Atom::Kind::PPlus:
      case Atom::Kind::PMinus:
        factor *= CRat::fraction(1, 2);
        break;
      case Atom::Kind::Dx:
        out = out.then(OperatorWord::dx(a.order));
        break;
      case Atom::Kind::ProjLow:
        out = out.then(OperatorWord::proj_low(a.order));
        break;
      case Atom::Kind::ProjHigh:
        out = out.then(OperatorWord::proj_high(a.order));
        break;
      case Atom::Kind::SmoothPow:
        out = out.then(OperatorWord::smooth_pow(a.power));
        break;
    }
  }
  return {out, factor};
}

std::pair<NodeRef, CRat> erase_node(NodeRef n) {
  switch (n->kind()) {
    case ExprNode::Kind::Leaf:
      return {n, CRat(1)};
    case ExprNode::Kind::Apply: {
      auto [cw, cf] = erase_node(n->child());
      auto [w, f] = erase_word(n->word());
      return {ExprNode::apply(w, cw), cf * f};
    }
    case ExprNode::Kind::Product: {
      std::vector<NodeRef> cs;
      CRat f(1);
      cs.reserve(n->children().size());
      for (auto* c : n->children()) {
        auto [cn, cf] = erase_node(c);
        cs.push_back(cn);
        f *= cf;
      }
      return {ExprNode::product(std::move(cs)), f};
    }
  }
  return {n, CRat(1)};
}

void grade_walk(NodeRef n, int path_order, Gradings& g) {
  switch (n->kind()) {
    case ExprNode::Kind::Leaf:
      g.sup_order = std::max(g.sup_order, path_order);
      break;
    case ExprNode::Kind::Apply: {
      const int d = n->word().dx_order();
      g.sum_order += d;
      grade_walk(n->child(), path_order + d, g);
      break;
    }
    case ExprNode::Kind::Product:
      for (auto* c : n->children()) grade_walk(c, path_order, g);
      break;
  }
}

void substitute_leaves(NodeRef n, NodeRef replacement, std::vector<NodeRef>& out) {
  switch (n->kind()) {
    case ExprNode::Kind::Leaf:
      out.push_back(replacement);
      break;
    case ExprNode::Kind::Apply: {
      std::vector<NodeRef> inner;
      substitute_leaves(n->child(), replacement, inner);
      for (auto* c : inner) out.push_back(ExprNode::apply(n->word(), c));
      break;
    }
    case ExprNode::Kind::Product: {
      const auto& cs = n->children();
      for (size_t i = 0; i < cs.size(); ++i) {
        std::vector<NodeRef> inner;
        substitute_leaves(cs[i], replacement, inner);
        for (auto* c : inner) {
          std::vector<NodeRef> copy = cs;
          copy[i] = c;
          out.push_back(ExprNode::product(std::move(copy)));
        }
      }
      break;
    }
  }
}

}  // namespace

Expr erase_hilbert(const Expr& e) {
  Expr out;
  std::vector<Term> ts;
  ts.reserve(e.terms().size());
  for (const auto& t : e.terms()) {
    auto [n, f] = erase_node(t.node);
    ts.push_back({t.coeff * f, n});
  }
  for (auto& t : ts) out += Expr(t.coeff, t.node);
  return out;
}

Gradings gradings(NodeRef term) {
  Gradings g;
  auto [erased, factor] = erase_node(term);
  (void)factor;
  grade_walk(erased, 0, g);
  return g;
}

Expr star_n(const Expr& e, int cutoff) {
  // The substituted slot content: pi_{>N}(u d_x u).
  NodeRef inner = ExprNode::product({ExprNode::leaf(), ExprNode::apply(OperatorWord::dx(1), ExprNode::leaf())});
  NodeRef replacement = ExprNode::apply(OperatorWord::proj_high(cutoff), inner);
  Expr out;
  for (const auto& t : e.terms()) {
    std::vector<NodeRef> subs;
    substitute_leaves(t.node, replacement, subs);
    for (auto* s : subs) out += Expr(t.coeff, s);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

nlohmann::json coeff_to_json(const CRat& c) {
  auto big_to_json = [](const boost::multiprecision::cpp_int& v) -> nlohmann::json {
    if (v >= std::numeric_limits<int64_t>::min() && v <= std::numeric_limits<int64_t>::max())
      return v.convert_to<int64_t>();
    return v.str();
  };
  return nlohmann::json::array({big_to_json(numerator(c.re)), big_to_json(denominator(c.re)),
                                big_to_json(numerator(c.im)), big_to_json(denominator(c.im))});
}

Rational rational_from_json(const nlohmann::json& num, const nlohmann::json& den) {
  auto big = [](const nlohmann::json& j) {
    if (j.is_string()) return boost::multiprecision::cpp_int(j.get<std::string>());
    return boost::multiprecision::cpp_int(j.get<int64_t>());
  };
  return Rational(big(num), big(den));
}

nlohmann::json atom_to_json(const Atom& a) {
  nlohmann::json j;
  switch (a.kind) {
    case Atom::Kind::Dx:
      j["kind"] = "dx";
      j["order"] = a.order;
      break;
    case Atom::Kind::Hil:
      j["kind"] = "hilbert";
      break;
    case Atom::Kind::PPlus:
      j["kind"] = "p_plus";
      break;
    case Atom::Kind::PMinus:
      j["kind"] = "p_minus";
      break;
    case Atom::Kind::ProjLow:
      j["kind"] = "proj_low";
      j["cutoff"] = a.order;
      break;
    case Atom::Kind::ProjHigh:
      j["kind"] = "proj_high";
      j["cutoff"] = a.order;
      break;
    case Atom::Kind::SmoothPow:
      j["kind"] = "smooth_pow";
      j["power"] = a.power;
      break;
  }
  return j;
}

OperatorWord word_from_json(const nlohmann::json& arr) {
  OperatorWord w;
  for (const auto& j : arr) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "dx")
      w = w.then(OperatorWord::dx(j.at("order").get<int>()));
    else if (kind == "hilbert")
      w = w.then(OperatorWord::hilbert());
    else if (kind == "p_plus")
      w = w.then(OperatorWord::p_plus());
    else if (kind == "p_minus")
      w = w.then(OperatorWord::p_minus());
    else if (kind == "proj_low")
      w = w.then(OperatorWord::proj_low(j.at("cutoff").get<int>()));
    else if (kind == "proj_high")
      w = w.then(OperatorWord::proj_high(j.at("cutoff").get<int>()));
    else if (kind == "smooth_pow")
      w = w.then(OperatorWord::smooth_pow(j.at("power").get<double>()));
    else
      throw std::invalid_argument("unknown atom kind: " + kind);
  }
  return w;
}

nlohmann::json node_to_json(NodeRef n) {
  nlohmann::json j;
  switch (n->kind()) {
    case ExprNode::Kind::Leaf:
      j["leaf"] = true;
      break;
    case ExprNode::Kind::Apply: {
      auto atoms = nlohmann::json::array();
      for (const auto& a : n->word().atoms()) atoms.push_back(atom_to_json(a));
      j["apply"] = {{"word", atoms}, {"child", node_to_json(n->child())}};
      break;
    }
    case ExprNode::Kind::Product: {
      auto cs = nlohmann::json::array();
      for (auto* c : n->children()) cs.push_back(node_to_json(c));
      j["product"] = cs;
      break;
    }
  }
  return j;
}

NodeRef node_from_json(const nlohmann::json& j) {
  if (j.contains("leaf")) return ExprNode::leaf();
  if (j.contains("apply")) {
    const auto& a = j.at("apply");
    return ExprNode::apply(word_from_json(a.at("word")), node_from_json(a.at("child")));
  }
  if (j.contains("product")) {
    std::vector<NodeRef> cs;
    for (const auto& c : j.at("product")) cs.push_back(node_from_json(c));
    return ExprNode::product(std::move(cs));
  }
  throw std::invalid_argument("malformed expression node");
}

std::string word_to_latex(const OperatorWord& w) {
  std::string s;
  const auto& atoms = w.atoms();
  for (auto it = atoms.rbegin(); it != atoms.rend(); ++it) {
    switch (it->kind) {
      case Atom::Kind::Dx:
        s += it->order == 1 ? "\\partial_x " : "\\partial_x^{" + std::to_string(it->order) + "} ";
        break;
      case Atom::Kind::Hil:
        s += "H ";
        break;
      case Atom::Kind::PPlus:
        s += "P_+ ";
        break;
      case Atom::Kind::PMinus:
        s += "P_- ";
        break;
      case Atom::Kind::ProjLow:
        s += "\\pi_{" + std::to_string(it->order) + "} ";
        break;
      case Atom::Kind::ProjHigh:
        s += "\\pi_{>" + std::to_string(it->order) + "} ";
        break;
      case Atom::Kind::SmoothPow:
        s += "D^{" + std::to_string(it->power) + "} ";
        break;
    }
  }
  return s;
}

std::string node_to_latex(NodeRef n) {
  switch (n->kind()) {
    case ExprNode::Kind::Leaf:
      return "u";
    case ExprNode::Kind::Apply: {
      std::string inner = node_to_latex(n->child());
      if (n->child()->kind() == ExprNode::Kind::Leaf) return word_to_latex(n->word()) + inner;
      return word_to_latex(n->word()) + "\\big(" + inner + "\\big)";
    }
    case ExprNode::Kind::Product: {
      std::string s;
      for (auto* c : n->children()) {
        std::string part = node_to_latex(c);
        if (c->kind() != ExprNode::Kind::Leaf) part = "(" + part + ")";
        s += part + " \\, ";
      }
      if (s.size() >= 4) s.resize(s.size() - 4);
      return s;
    }
  }
  return {};
}

std::string coeff_to_latex(const CRat& c) {
  auto rat = [](const Rational& r) {
    std::ostringstream os;
    if (denominator(r) == 1)
      os << numerator(r);
    else
      os << "\\tfrac{" << numerator(r) << "}{" << denominator(r) << "}";
    return os.str();
  };
  if (c.im == 0) return rat(c.re);
  if (c.re == 0) return rat(c.im) + " i";
  return "(" + rat(c.re) + " + " + rat(c.im) + " i)";
}

}  // namespace

std::string Expr::to_json() const {
  nlohmann::json j;
  auto terms = nlohmann::json::array();
  for (const auto& t : terms_)
    terms.push_back({{"coeff", coeff_to_json(t.coeff)}, {"node", node_to_json(t.node)}});
  j["terms"] = terms;
  return j.dump();
}

Expr Expr::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  Expr e;
  for (const auto& t : j.at("terms")) {
    const auto& c = t.at("coeff");
    CRat coeff(rational_from_json(c.at(0), c.at(1)), rational_from_json(c.at(2), c.at(3)));
    e += Expr(coeff, node_from_json(t.at("node")));
  }
  return e;
}

std::string Expr::to_latex() const {
  if (terms_.empty()) return "0";
  std::string s;
  for (size_t i = 0; i < terms_.size(); ++i) {
    if (i) s += " + ";
    s += coeff_to_latex(terms_[i].coeff) + " \\, " + node_to_latex(terms_[i].node);
  }
  return s;
}

}  // namespace bolab
