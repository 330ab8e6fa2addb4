#include "bolab/flows.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "bolab/energy.hpp"
#include "bolab/fft.hpp"
#include "bolab/operator_word.hpp"

namespace bolab {

namespace {

using cdouble = std::complex<double>;

cdouble dispersion_phase(int n, double t) {
  // e^{lambda_n t} with lambda_n = -i n |n|.
  const double arg = -static_cast<double>(n) * std::abs(n) * t;
  return {std::cos(arg), std::sin(arg)};
}

// Band-limited Hamiltonian ODE in Fourier coordinates,
//   dv/dt = L v + NL(v),  L = -i n|n|,  NL(v) = -(c/2) pi_N d_x (v^2),
// integrated with the linear part exact.
class BandedOde {
 public:
  BandedOde(int band, double dt, double nonlinear_scale, Scheme scheme)
      : band_(band),
        m_(fft::good_size(3 * band + 2)),
        dt_(dt),
        scale_(nonlinear_scale),
        scheme_(scheme) {
    e_half_.resize(2 * band_ + 1);
    e_full_.resize(2 * band_ + 1);
    for (int n = -band_; n <= band_; ++n) {
      e_half_[n + band_] = dispersion_phase(n, dt / 2.0);
      e_full_[n + band_] = dispersion_phase(n, dt);
    }
    if (scheme_ == Scheme::EtdRk4) init_etd_weights();
    scratch_.resize(m_);
  }

  void step(std::vector<cdouble>& v) {
    if (scheme_ == Scheme::IntegratingFactorRk4)
      step_ifrk4(v);
    else
      step_etdrk4(v);
  }

 private:
  void nonlinear(const std::vector<cdouble>& v, std::vector<cdouble>& out) {
    std::fill(scratch_.begin(), scratch_.end(), cdouble(0.0));
    for (int n = -band_; n <= band_; ++n) scratch_[((n % m_) + m_) % m_] = v[n + band_];
    fft::backward(scratch_);
    for (auto& z : scratch_) z *= z;
    fft::forward(scratch_);
    out.resize(2 * band_ + 1);
    const double inv_m = 1.0 / m_;
    for (int n = -band_; n <= band_; ++n) {
      const cdouble sq = scratch_[((n % m_) + m_) % m_] * inv_m;
      out[n + band_] = -0.5 * scale_ * cdouble(0.0, n) * sq;
    }
  }

  void step_ifrk4(std::vector<cdouble>& v) {
    const int sz = 2 * band_ + 1;
    nonlinear(v, k1_);
    a_.resize(sz);
    for (int i = 0; i < sz; ++i) a_[i] = e_half_[i] * (v[i] + 0.5 * dt_ * k1_[i]);
    nonlinear(a_, k2_);
    for (int i = 0; i < sz; ++i) a_[i] = e_half_[i] * v[i] + 0.5 * dt_ * k2_[i];
    nonlinear(a_, k3_);
    for (int i = 0; i < sz; ++i) a_[i] = e_full_[i] * v[i] + dt_ * e_half_[i] * k3_[i];
    nonlinear(a_, k4_);
    for (int i = 0; i < sz; ++i)
      v[i] = e_full_[i] * v[i] +
             dt_ / 6.0 *
                 (e_full_[i] * k1_[i] + 2.0 * e_half_[i] * (k2_[i] + k3_[i]) + k4_[i]);
  }

  void init_etd_weights() {
    // Cox-Matthews ETDRK4 coefficients, evaluated by contour averaging
    // (Kassam-Trefethen) to stay accurate near z = 0.
    const int sz = 2 * band_ + 1;
    q_.resize(sz);
    f1_.resize(sz);
    f2_.resize(sz);
    f3_.resize(sz);
    const int points = 64;
    for (int i = 0; i < sz; ++i) {
      const int n = i - band_;
      const cdouble z = cdouble(0.0, -static_cast<double>(n) * std::abs(n)) * dt_;
      cdouble q = 0.0, f1 = 0.0, f2 = 0.0, f3 = 0.0;
      for (int p = 0; p < points; ++p) {
        const double th = 2.0 * M_PI * (p + 0.5) / points;
        const cdouble zz = z + cdouble(std::cos(th), std::sin(th));
        const cdouble ez = std::exp(zz);
        const cdouble z2 = zz * zz, z3 = z2 * zz;
        q += (std::exp(zz / 2.0) - 1.0) / zz;
        f1 += (-4.0 - zz + ez * (4.0 - 3.0 * zz + z2)) / z3;
        f2 += (2.0 + zz + ez * (-2.0 + zz)) / z3;
        f3 += (-4.0 - 3.0 * zz - z2 + ez * (4.0 - zz)) / z3;
      }
      q_[i] = dt_ * q / static_cast<double>(points);
      f1_[i] = dt_ * f1 / static_cast<double>(points);
      f2_[i] = dt_ * f2 / static_cast<double>(points);
      f3_[i] = dt_ * f3 / static_cast<double>(points);
    }
  }

  void step_etdrk4(std::vector<cdouble>& v) {
    const int sz = 2 * band_ + 1;
    nonlinear(v, k1_);
    a_.resize(sz);
    b_.resize(sz);
    c_.resize(sz);
    for (int i = 0; i < sz; ++i) a_[i] = e_half_[i] * v[i] + q_[i] * k1_[i];
    nonlinear(a_, k2_);
    for (int i = 0; i < sz; ++i) b_[i] = e_half_[i] * v[i] + q_[i] * k2_[i];
    nonlinear(b_, k3_);
    for (int i = 0; i < sz; ++i) c_[i] = e_half_[i] * a_[i] + q_[i] * (2.0 * k3_[i] - k1_[i]);
    nonlinear(c_, k4_);
    for (int i = 0; i < sz; ++i)
      v[i] = e_full_[i] * v[i] + f1_[i] * k1_[i] + 2.0 * f2_[i] * (k2_[i] + k3_[i]) +
             f3_[i] * k4_[i];
  }

  int band_;
  int m_;
  double dt_;
  double scale_;
  Scheme scheme_;
  std::vector<cdouble> e_half_, e_full_, q_, f1_, f2_, f3_;
  std::vector<cdouble> scratch_, a_, b_, c_, k1_, k2_, k3_, k4_;
};

double l2_sq(const std::vector<cdouble>& v) {
  double s = 0.0;
  for (const auto& z : v) s += std::norm(z);
  return s;
}

std::vector<cdouble> low_coeffs(const FourierField& u, int band) {
  std::vector<cdouble> v(2 * band + 1, 0.0);
  const int b = std::min(band, u.bandwidth());
  for (int n = -b; n <= b; ++n) v[n + band] = u.coeff(n);
  v[band] = 0.0;  // zero mean
  return v;
}

// Integrates the banded system from 0 to t, monitoring the L^2 drift.
std::vector<cdouble> integrate_banded(std::vector<cdouble> v, int band, double t,
                                      const FlowConfig& cfg, double dt_hint) {
  if (cfg.dt < 0.0) throw std::invalid_argument("dt must be positive (0 selects the default)");
  if (cfg.drift_tolerance <= 0.0) throw std::invalid_argument("drift_tolerance must be positive");
  if (t == 0.0 || band == 0) return v;
  const double dt0 = dt_hint > 0.0 ? dt_hint : cfg.step_size();
  const long long steps = std::max(1LL, static_cast<long long>(std::ceil(std::abs(t) / dt0 - 1e-12)));
  const double dt = t / static_cast<double>(steps);
  BandedOde ode(band, dt, cfg.nonlinear_scale, cfg.scheme);
  const double l0 = l2_sq(v);
  // Relative drift, floored at a small mass so that near-empty states are
  // judged on absolute drift.
  const double mass = std::max(l0, 1e-2);
  for (long long s = 0; s < steps; ++s) {
    ode.step(v);
    if (l0 > 0.0) {
      const double drift = std::abs(l2_sq(v) - l0) / mass;
      if (drift > cfg.drift_tolerance)
        throw IntegrationError("low-mode L^2 drift " + std::to_string(drift) +
                                   " exceeded tolerance; reduce dt",
                               (s + 1) * dt);
    }
  }
  return v;
}

}  // namespace

FourierField linear_propagate(const FourierField& u, double t) {
  if (u.coeff(0) != 0.0) throw std::invalid_argument("linear_propagate requires zero mean");
  FourierField out = FourierField::zeros(u.bandwidth(), u.is_real());
  for (int n = 1; n <= u.bandwidth(); ++n) {
    if (u.is_real()) {
      out.set_coeff(n, u.coeff(n) * dispersion_phase(n, t));
    } else {
      out.set_coeff(n, u.coeff(n) * dispersion_phase(n, t));
      out.set_coeff(-n, u.coeff(-n) * dispersion_phase(-n, t));
    }
  }
  out.trim();
  return out;
}

FourierField truncated_vector_field(const FourierField& v, int truncation, double nonlinear_scale) {
  FourierField low = project_low(v, truncation);
  FourierField quad = multiply(low, derivative(low));
  FourierField nl = project_low(quad, truncation);
  FourierField out = FourierField::zeros(std::max(v.bandwidth(), truncation), v.is_real());
  for (int n = 1; n <= out.bandwidth(); ++n) {
    // -H d_x^2 has symbol -i n |n|.
    const cdouble lin = cdouble(0.0, -static_cast<double>(n) * std::abs(n)) * v.coeff(n);
    out.set_coeff(n, lin - nonlinear_scale * nl.coeff(n));
  }
  if (!v.is_real()) {
    for (int n = 1; n <= out.bandwidth(); ++n) {
      const cdouble lin = cdouble(0.0, static_cast<double>(n) * std::abs(n)) * v.coeff(-n);
      out.set_coeff(-n, lin - nonlinear_scale * nl.coeff(-n));
    }
  }
  out.trim();
  return out;
}

FourierField evolve_truncated(const FourierField& u0, const FlowConfig& cfg, double t) {
  if (std::abs(t) > cfg.horizon) throw std::invalid_argument("t outside configured horizon");
  const int band = cfg.truncation;
  auto v = integrate_banded(low_coeffs(u0, band), band, t, cfg, 0.0);

  FourierField out = FourierField::zeros(std::max(u0.bandwidth(), band), u0.is_real());
  for (int n = 1; n <= band; ++n) out.set_coeff(n, v[n + band]);
  if (!u0.is_real())
    for (int n = 1; n <= band; ++n) out.set_coeff(-n, v[-n + band]);
  for (int n = band + 1; n <= u0.bandwidth(); ++n) {
    out.set_coeff(n, u0.coeff(n) * dispersion_phase(n, t));
    if (!u0.is_real()) out.set_coeff(-n, u0.coeff(-n) * dispersion_phase(-n, t));
  }
  out.trim();
  return out;
}

FourierField evolve_full_raw(const FourierField& u0, const FlowConfig& cfg, double t, double dt) {
  const int band = cfg.grid_bandwidth;
  if (u0.bandwidth() > band)
    throw std::invalid_argument("initial data exceeds the solver bandwidth");
  auto v = integrate_banded(low_coeffs(u0, band), band, t, cfg, dt);
  FourierField out = FourierField::zeros(band, u0.is_real());
  for (int n = 1; n <= band; ++n) out.set_coeff(n, v[n + band]);
  if (!u0.is_real())
    for (int n = 1; n <= band; ++n) out.set_coeff(-n, v[-n + band]);
  out.trim();
  return out;
}

FourierField evolve_full(const FourierField& u0, const FlowConfig& cfg, double t,
                         SolveCertificate* cert) {
  const double dt = cfg.step_size();
  FourierField coarse = evolve_full_raw(u0, cfg, t, dt);
  FourierField fine = evolve_full_raw(u0, cfg, t, dt / 2.0);
  FourierField diff = fine - coarse;
  SolveCertificate c;
  c.richardson_error = sobolev_norm(diff.as_complex(), 0.0, false) / 15.0;

  double total = 0.0, tail = 0.0;
  const int band = cfg.grid_bandwidth;
  const int tail_start = band - std::max(1, band / 10);
  for (int n = 1; n <= fine.bandwidth(); ++n) {
    const double e = std::norm(fine.coeff(n));
    total += e;
    if (n > tail_start) tail += e;
  }
  c.tail_fraction = total > 0.0 ? tail / total : 0.0;
  c.tail_warning = c.tail_fraction > 1e-10;

  if (c.richardson_error > std::max(cfg.drift_tolerance, 1e-14))
    throw IntegrationError("dt-halving estimate " + std::to_string(c.richardson_error) +
                               " did not certify; reduce dt",
                           t);
  if (cert != nullptr) *cert = c;
  return fine;
}

double flow_energy_derivative(const FourierField& u, int truncation, int j) {
  FourierField v = project_low(u, truncation);
  if (v.is_zero()) return 0.0;
  FourierField g = project_high(multiply(v, derivative(v)), truncation);
  g.trim();
  if (g.is_zero()) return 0.0;
  FourierField grad = grad_energy(j, v, {}, 2 * truncation);
  return inner(grad, g).real();
}

}  // namespace bolab
