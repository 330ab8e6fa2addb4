#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "bolab/operator_word.hpp"
#include "bolab/rational.hpp"

namespace bolab {

class ExprNode;
using NodeRef = const ExprNode*;

/// Immutable, interned expression node. Structural equality is pointer
/// equality. Nodes live for the duration of the process.
class ExprNode {
 public:
  enum class Kind : uint8_t { Leaf, Apply, Product };

  Kind kind() const { return kind_; }
  const OperatorWord& word() const { return word_; }
  NodeRef child() const { return child_; }
  const std::vector<NodeRef>& children() const { return children_; }
  int homogeneity() const { return homogeneity_; }
  uint64_t hash() const { return hash_; }

  /// The symbol u.
  static NodeRef leaf();
  /// Applies a word; fuses with an Apply child and drops empty words.
  static NodeRef apply(const OperatorWord& w, NodeRef c);
  /// Flattens nested products, sorts children canonically, collapses singletons.
  static NodeRef product(std::vector<NodeRef> cs);

  /// Structural total order: (homogeneity, kind, word, children).
  static int compare(NodeRef a, NodeRef b);

  std::string to_string() const;

 private:
  friend class NodeIntern;
  ExprNode() = default;
  Kind kind_ = Kind::Leaf;
  OperatorWord word_;
  NodeRef child_ = nullptr;
  std::vector<NodeRef> children_;
  int homogeneity_ = 1;
  uint64_t hash_ = 0;
};

struct Term {
  CRat coeff;
  NodeRef node;
};

/// A finite sum of coefficient-weighted nodes; like terms merged, zero
/// coefficients dropped, terms sorted by the structural node order.
class Expr {
 public:
  Expr() = default;
  Expr(CRat c, NodeRef n);

  static Expr u();  // the bare symbol
  static Expr zero() { return {}; }

  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  size_t size() const { return terms_.size(); }

  Expr& operator+=(const Expr& o);
  Expr& operator-=(const Expr& o);
  friend Expr operator+(Expr a, const Expr& b) { return a += b; }
  friend Expr operator-(Expr a, const Expr& b) { return a -= b; }
  Expr operator*(const Expr& o) const;   // pointwise product (distributes)
  Expr scaled(const CRat& c) const;
  bool operator==(const Expr& o) const;

  /// Applies a word to every term.
  Expr applied(const OperatorWord& w) const;

  /// Conjugate expression: conj coefficients, swap P+ <-> P-.
  Expr conjugated() const;

  /// Replaces u by (scale * u): each term of homogeneity j picks scale^j.
  Expr leaf_scaled(const CRat& scale) const;

  /// Terms whose homogeneity equals `order`.
  Expr homogeneous_part(int order) const;
  int max_homogeneity() const;

  std::string to_string() const;
  std::string to_json() const;
  std::string to_latex() const;
  static Expr from_json(const std::string& text);

 private:
  std::vector<Term> terms_;
  void normalize();
};

/// Removes every Hil/PPlus/PMinus atom from every word; each erased projector
/// contributes a factor 1/2 to the term coefficient.
Expr erase_hilbert(const Expr& e);

struct Gradings {
  int sup_order = 0;  // |p|: max derivative order carried by a leaf
  int sum_order = 0;  // ||p||: total derivative order of the term
};

/// Gradings of a single term, computed on the erased form. For class-P
/// monomials this is exactly (max alpha_i, sum alpha_i); for nested terms the
/// sup is the worst leaf path (Leibniz upper bound) and the sum counts every
/// word once.
Gradings gradings(NodeRef term);

/// Substitutes pi_{>N}(u d_x u) into one factor slot at a time and sums over
/// slots (the p -> p*_N map).
Expr star_n(const Expr& e, int cutoff);

}  // namespace bolab
