#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <complex>
#include <cstdint>
#include <string>

namespace bolab {

using Rational = boost::multiprecision::cpp_rational;

/// Element of Q(i): exact complex rational coefficient.
struct CRat {
  Rational re{0};
  Rational im{0};

  CRat() = default;
  CRat(long long n) : re(n) {}
  CRat(Rational r) : re(std::move(r)) {}
  CRat(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}

  static CRat i() { return CRat(Rational(0), Rational(1)); }
  static CRat fraction(long long num, long long den) { return CRat(Rational(num, den)); }

  bool is_zero() const { return re == 0 && im == 0; }
  bool is_real() const { return im == 0; }

  CRat conj() const { return CRat(re, -im); }

  CRat operator-() const { return CRat(-re, -im); }
  CRat& operator+=(const CRat& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  CRat& operator-=(const CRat& o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }
  CRat& operator*=(const CRat& o) {
    Rational r = re * o.re - im * o.im;
    Rational i = re * o.im + im * o.re;
    re = std::move(r);
    im = std::move(i);
    return *this;
  }
  friend CRat operator+(CRat a, const CRat& b) { return a += b; }
  friend CRat operator-(CRat a, const CRat& b) { return a -= b; }
  friend CRat operator*(CRat a, const CRat& b) { return a *= b; }
  CRat operator/(const CRat& o) const {
    Rational d = o.re * o.re + o.im * o.im;
    if (d == 0) throw std::domain_error("division by zero coefficient");
    return CRat((re * o.re + im * o.im) / d, (im * o.re - re * o.im) / d);
  }
  bool operator==(const CRat& o) const { return re == o.re && im == o.im; }

  std::complex<double> to_complex() const {
    return {re.convert_to<double>(), im.convert_to<double>()};
  }

  std::string to_string() const;
  uint64_t hash() const;
};

}  // namespace bolab
