#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "bolab/fourier_field.hpp"

namespace bolab {

/// One diagonal Fourier multiplier.
struct Atom {
  enum class Kind : uint8_t {
    Dx,        // alpha-fold derivative, symbol (i n)^alpha
    Hil,       // Hilbert transform, symbol -i sign(n)
    PPlus,     // projector on positive frequencies, (1 + iH)/2
    PMinus,    // projector on negative frequencies, (1 - iH)/2
    ProjLow,   // pi_N, keeps |n| <= cutoff
    ProjHigh,  // pi_{>N}, keeps |n| > cutoff
    SmoothPow  // D^s with D = (1 - d_x^2)^{1/2}, symbol (1+n^2)^{s/2}
  };
  Kind kind = Kind::Dx;
  int order = 1;      // Dx order or ProjLow/ProjHigh cutoff
  double power = 0.0; // SmoothPow exponent

  std::complex<double> symbol(int n) const;
  bool operator==(const Atom&) const = default;
};

/// An ordered composition of atoms acting diagonally in Fourier. Atoms are
/// stored in application order (atoms()[0] acts first). The composed symbol at
/// wavenumber n is the product of the atom symbols; the atom list itself is
/// kept verbatim because erasure and the P_n gradings are defined on it.
class OperatorWord {
 public:
  OperatorWord() = default;

  static OperatorWord identity() { return {}; }
  static OperatorWord dx(int order);
  static OperatorWord hilbert();
  static OperatorWord p_plus();
  static OperatorWord p_minus();
  static OperatorWord proj_low(int cutoff);
  static OperatorWord proj_high(int cutoff);
  static OperatorWord smooth_pow(double s);

  const std::vector<Atom>& atoms() const { return atoms_; }
  bool empty() const { return atoms_.empty(); }

  /// Composition: (next.then_after(*this)) means "apply *this first, next after".
  OperatorWord then(const OperatorWord& next) const;

  std::complex<double> symbol(int n) const;

  /// Total derivative order (sum of Dx atom orders).
  int dx_order() const;
  bool has_signed_atom() const;  // any Hil / PPlus / PMinus
  bool has_projector() const;
  bool has_smooth_pow() const;

  /// Adjoint under the bilinear pairing int f g dx: atom order reversed,
  /// Dx -> -Dx, Hil -> -Hil, PPlus <-> PMinus, projectors self-adjoint.
  /// The accumulated sign (+1/-1) is returned through `sign`.
  OperatorWord adjoint(int& sign) const;

  /// Same word with PPlus and PMinus swapped (conjugation on real fields).
  OperatorWord conjugated() const;

  bool operator==(const OperatorWord&) const = default;
  std::string to_string() const;

  /// Three-way structural comparison for canonical ordering.
  static int compare(const OperatorWord& a, const OperatorWord& b);

  uint64_t hash() const;

 private:
  std::vector<Atom> atoms_;
};

/// Applies a word to a field. Signed atoms (Hil/PPlus/PMinus) act on mode 0 as
/// 0 resp. 1/2, but only tolerate inputs whose running mode-0 amplitude is
/// negligible when they are reached; otherwise the call is rejected.
FourierField apply_word(const OperatorWord& w, const FourierField& u);

/// Hilbert transform; rejects fields with nonzero mean.
FourierField hilbert(const FourierField& u);

FourierField project_low(const FourierField& u, int cutoff);
FourierField project_high(const FourierField& u, int cutoff);
FourierField derivative(const FourierField& u, int order = 1);

}  // namespace bolab
