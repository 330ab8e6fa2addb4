#include "bolab/fourier_field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bolab/fft.hpp"
#include "json.hpp"

namespace bolab {

FourierField FourierField::zeros(int bandwidth, bool real) {
  if (bandwidth < 0) throw std::invalid_argument("bandwidth must be >= 0");
  FourierField f;
  f.bandwidth_ = bandwidth;
  f.real_ = real;
  f.c_.assign(2 * bandwidth + 1, 0.0);
  return f;
}

FourierField FourierField::cosine(int n, double amplitude) {
  if (n <= 0) throw std::invalid_argument("cosine mode must be positive");
  FourierField f = zeros(n, true);
  f.c_[n + f.bandwidth_] = amplitude / 2.0;
  f.c_[-n + f.bandwidth_] = amplitude / 2.0;
  return f;
}

FourierField FourierField::sine(int n, double amplitude) {
  if (n <= 0) throw std::invalid_argument("sine mode must be positive");
  FourierField f = zeros(n, true);
  f.c_[n + f.bandwidth_] = std::complex<double>(0.0, -amplitude / 2.0);
  f.c_[-n + f.bandwidth_] = std::complex<double>(0.0, amplitude / 2.0);
  return f;
}

FourierField FourierField::exponential(int n, std::complex<double> amplitude) {
  FourierField f = zeros(std::abs(n), false);
  f.c_[n + f.bandwidth_] = amplitude;
  return f;
}

void FourierField::set_coeff(int n, std::complex<double> v) {
  if (std::abs(n) > bandwidth_) {
    const int nb = std::abs(n);
    std::vector<std::complex<double>> grown(2 * nb + 1, 0.0);
    std::copy(c_.begin(), c_.end(), grown.begin() + (nb - bandwidth_));
    c_ = std::move(grown);
    bandwidth_ = nb;
  }
  if (real_) {
    if (n == 0) {
      if (v != 0.0) throw std::invalid_argument("real fields are zero-mean: coeff(0) must stay 0");
      return;
    }
    c_[n + bandwidth_] = v;
    c_[-n + bandwidth_] = std::conj(v);
    return;
  }
  c_[n + bandwidth_] = v;
}

FourierField FourierField::as_complex() const {
  FourierField f = *this;
  f.real_ = false;
  return f;
}

void FourierField::trim() {
  int b = bandwidth_;
  while (b > 0 && c_[b + bandwidth_] == 0.0 && c_[-b + bandwidth_] == 0.0) --b;
  if (b == bandwidth_) return;
  std::vector<std::complex<double>> kept(c_.begin() + (bandwidth_ - b), c_.begin() + (bandwidth_ + b + 1));
  c_ = std::move(kept);
  bandwidth_ = b;
}

bool FourierField::is_zero() const {
  for (const auto& z : c_)
    if (z != 0.0) return false;
  return true;
}

double FourierField::max_abs_coeff() const {
  double m = 0.0;
  for (const auto& z : c_) m = std::max(m, std::abs(z));
  return m;
}

FourierField& FourierField::operator+=(const FourierField& rhs) {
  if (rhs.bandwidth_ > bandwidth_) {
    FourierField grown = zeros(rhs.bandwidth_, real_ && rhs.real_);
    std::copy(c_.begin(), c_.end(), grown.c_.begin() + (rhs.bandwidth_ - bandwidth_));
    *this = std::move(grown);
  }
  real_ = real_ && rhs.real_;
  for (int n = -rhs.bandwidth_; n <= rhs.bandwidth_; ++n) c_[n + bandwidth_] += rhs.c_[n + rhs.bandwidth_];
  return *this;
}

FourierField& FourierField::operator-=(const FourierField& rhs) {
  FourierField neg = rhs;
  neg *= -1.0;
  return *this += neg;
}

FourierField& FourierField::operator*=(double s) {
  for (auto& z : c_) z *= s;
  return *this;
}

FourierField& FourierField::operator*=(std::complex<double> s) {
  if (s.imag() != 0.0) real_ = false;
  for (auto& z : c_) z *= s;
  return *this;
}

std::vector<std::complex<double>> FourierField::grid_values(int m) const {
  if (m < 1) throw std::invalid_argument("grid size must be >= 1");
  std::vector<std::complex<double>> bins(m, 0.0);
  for (int n = -bandwidth_; n <= bandwidth_; ++n) {
    const auto z = c_[n + bandwidth_];
    if (z == 0.0) continue;
    bins[((n % m) + m) % m] += z;
  }
  fft::backward(bins);
  return bins;
}

std::vector<double> FourierField::real_grid_values(int m) const {
  auto v = grid_values(m);
  std::vector<double> out(v.size());
  for (size_t i = 0; i < v.size(); ++i) out[i] = v[i].real();
  return out;
}

FourierField FourierField::from_grid(const std::vector<std::complex<double>>& values, int bandwidth,
                                     bool real) {
  const int m = static_cast<int>(values.size());
  if (m < 2 * bandwidth + 1) throw std::invalid_argument("grid too coarse for requested bandwidth");
  std::vector<std::complex<double>> bins = values;
  fft::forward(bins);
  FourierField f = zeros(bandwidth, false);
  const double inv = 1.0 / m;
  for (int n = -bandwidth; n <= bandwidth; ++n) f.c_[n + bandwidth] = bins[((n % m) + m) % m] * inv;
  if (real) {
    // Symmetrize round-off; the sampled function is assumed real-valued.
    for (int n = 1; n <= bandwidth; ++n) {
      auto avg = 0.5 * (f.c_[n + bandwidth] + std::conj(f.c_[-n + bandwidth]));
      f.c_[n + bandwidth] = avg;
      f.c_[-n + bandwidth] = std::conj(avg);
    }
    f.c_[bandwidth] = 0.0;
    f.real_ = true;
  }
  f.trim();
  return f;
}

std::string FourierField::to_json() const {
  nlohmann::json j;
  j["bandwidth"] = bandwidth_;
  j["real"] = real_;
  auto coeffs = nlohmann::json::array();
  for (int n = -bandwidth_; n <= bandwidth_; ++n) {
    const auto z = c_[n + bandwidth_];
    if (z == 0.0) continue;
    coeffs.push_back(nlohmann::json::array({n, z.real(), z.imag()}));
  }
  j["coeffs"] = coeffs;
  return j.dump();
}

FourierField FourierField::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  FourierField f = zeros(j.at("bandwidth").get<int>(), false);
  for (const auto& entry : j.at("coeffs")) {
    const int n = entry.at(0).get<int>();
    if (std::abs(n) > f.bandwidth_) throw std::invalid_argument("coefficient outside declared band");
    f.c_[n + f.bandwidth_] = {entry.at(1).get<double>(), entry.at(2).get<double>()};
  }
  f.real_ = j.at("real").get<bool>();
  return f;
}

namespace {

FourierField multiply_direct(const FourierField& u, const FourierField& v) {
  const int bw = u.bandwidth() + v.bandwidth();
  FourierField out = FourierField::zeros(bw, false);
  for (int a = -u.bandwidth(); a <= u.bandwidth(); ++a) {
    const auto ua = u.coeff(a);
    if (ua == 0.0) continue;
    for (int b = -v.bandwidth(); b <= v.bandwidth(); ++b) {
      const auto vb = v.coeff(b);
      if (vb == 0.0) continue;
      out.set_coeff(a + b, out.coeff(a + b) + ua * vb);
    }
  }
  return out;
}

}  // namespace

FourierField multiply(const FourierField& u, const FourierField& v) {
  const bool real = u.is_real() && v.is_real();
  const int bw = u.bandwidth() + v.bandwidth();
  FourierField out;
  if (static_cast<long long>(u.bandwidth() + 1) * (v.bandwidth() + 1) <= 1024) {
    out = multiply_direct(u, v);
  } else {
    const int m = fft::good_size(2 * bw + 1);
    auto gu = u.grid_values(m);
    const auto gv = v.grid_values(m);
    for (int j = 0; j < m; ++j) gu[j] *= gv[j];
    out = FourierField::from_grid(gu, bw, false);
  }
  if (real) {
    FourierField fixed = FourierField::zeros(out.bandwidth(), true);
    for (int n = 1; n <= out.bandwidth(); ++n)
      fixed.set_coeff(n, 0.5 * (out.coeff(n) + std::conj(out.coeff(-n))));
    // Mode 0 of a product of real fields is real but generally nonzero, which
    // the reality flag forbids; keep the result a complex intermediate unless
    // the mean vanishes to round-off.
    const auto mean = out.coeff(0);
    if (mean == 0.0) {
      fixed.trim();
      return fixed;
    }
    FourierField mixed = fixed.as_complex();
    mixed.set_coeff(0, mean);
    mixed.trim();
    return mixed;
  }
  out.trim();
  return out;
}

double sobolev_norm(const FourierField& u, double s, bool homogeneous) {
  if (homogeneous && std::abs(u.coeff(0)) > 1e-12 * std::max(1.0, u.max_abs_coeff()))
    throw std::invalid_argument("homogeneous Sobolev norm requires zero mean");
  double acc = 0.0;
  for (int n = -u.bandwidth(); n <= u.bandwidth(); ++n) {
    if (homogeneous && n == 0) continue;
    const double a2 = std::norm(u.coeff(n));
    if (a2 == 0.0) continue;
    const double w = homogeneous ? std::pow(std::abs(n), 2.0 * s) : std::pow(1.0 + double(n) * n, s);
    acc += w * a2;
  }
  return std::sqrt(acc);
}

std::complex<double> integrate(const FourierField& u) {
  const double two_pi = 2.0 * M_PI;
  if (u.is_real()) return 0.0;
  return two_pi * u.coeff(0);
}

std::complex<double> inner(const FourierField& u, const FourierField& v) {
  const int b = std::min(u.bandwidth(), v.bandwidth());
  std::complex<double> acc = 0.0;
  for (int n = -b; n <= b; ++n) acc += u.coeff(n) * v.coeff(-n);
  return 2.0 * M_PI * acc;
}

double max_abs_diff(const FourierField& u, const FourierField& v) {
  const int b = std::max(u.bandwidth(), v.bandwidth());
  double m = 0.0;
  for (int n = -b; n <= b; ++n) m = std::max(m, std::abs(u.coeff(n) - v.coeff(n)));
  return m;
}

}  // namespace bolab
