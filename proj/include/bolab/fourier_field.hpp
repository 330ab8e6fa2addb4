#pragma once

#include <complex>
#include <string>
#include <vector>

namespace bolab {

/// A trigonometric polynomial on the circle [0, 2pi), held as Fourier
/// coefficients u_n = (1/2pi) int u e^{-inx} dx over the band -B..B.
///
/// Reality-flagged fields keep the Hermitian symmetry coeff(-n) = conj(coeff(n))
/// and are strictly zero-mean (coeff(0) = 0). Complex intermediates (products
/// of symbolic evaluation) may carry mode 0.
class FourierField {
 public:
  FourierField() : bandwidth_(0), real_(true), c_(1, 0.0) {}

  static FourierField zeros(int bandwidth, bool real = true);
  static FourierField cosine(int n, double amplitude = 1.0);
  static FourierField sine(int n, double amplitude = 1.0);
  /// amplitude * e^{inx}; the result is a general complex field.
  static FourierField exponential(int n, std::complex<double> amplitude = 1.0);

  int bandwidth() const { return bandwidth_; }
  bool is_real() const { return real_; }

  std::complex<double> coeff(int n) const {
    return (n < -bandwidth_ || n > bandwidth_) ? std::complex<double>(0.0) : c_[n + bandwidth_];
  }

  /// Sets coeff(n). On reality-flagged fields coeff(-n) is kept conjugate and
  /// mode 0 must stay zero.
  void set_coeff(int n, std::complex<double> v);

  /// Drops the reality flag (the data is untouched).
  FourierField as_complex() const;

  /// Shrinks the band to the largest |n| with a nonzero coefficient.
  void trim();

  bool is_zero() const;
  double max_abs_coeff() const;

  FourierField& operator+=(const FourierField& rhs);
  FourierField& operator-=(const FourierField& rhs);
  FourierField& operator*=(double s);
  FourierField& operator*=(std::complex<double> s);
  friend FourierField operator+(FourierField a, const FourierField& b) { return a += b; }
  friend FourierField operator-(FourierField a, const FourierField& b) { return a -= b; }
  friend FourierField operator*(double s, FourierField a) { return a *= s; }

  /// Values on the uniform grid x_j = 2pi j / m. Exact for any m >= 1.
  std::vector<std::complex<double>> grid_values(int m) const;
  std::vector<double> real_grid_values(int m) const;

  /// Recovers a band-limited field from grid samples; requires
  /// m >= 2*bandwidth+1 so the coefficients are alias-free.
  static FourierField from_grid(const std::vector<std::complex<double>>& values, int bandwidth,
                                bool real);

  std::string to_json() const;
  static FourierField from_json(const std::string& text);

 private:
  int bandwidth_;
  bool real_;
  std::vector<std::complex<double>> c_;  // index n + bandwidth_
};

/// Exact (alias-free) pointwise product; result bandwidth is the sum of the
/// operand bandwidths. Uses direct convolution for small operands and a
/// zero-padded transform otherwise.
FourierField multiply(const FourierField& u, const FourierField& v);

/// Homogeneous: sqrt(sum_{n!=0} |n|^{2s} |u_n|^2); inhomogeneous uses (1+n^2)^s.
/// Homogeneous norms require zero mean.
double sobolev_norm(const FourierField& u, double s, bool homogeneous = true);

/// int_0^{2pi} u dx = 2pi coeff(0).
std::complex<double> integrate(const FourierField& u);

/// Bilinear L^2 pairing int u v dx = 2pi sum_n u_n v_{-n}.
std::complex<double> inner(const FourierField& u, const FourierField& v);

double max_abs_diff(const FourierField& u, const FourierField& v);

}  // namespace bolab
