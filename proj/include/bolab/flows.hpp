#pragma once

#include <optional>
#include <string>

#include "bolab/fourier_field.hpp"

namespace bolab {

enum class Scheme { IntegratingFactorRk4, EtdRk4 };

struct FlowConfig {
  int truncation = 32;          // N of the Galerkin truncation
  int grid_bandwidth = 64;      // resolution of the full solver (>= 2N)
  double dt = 0.0;              // 0 -> min(1e-3, 0.5/N)
  Scheme scheme = Scheme::IntegratingFactorRk4;
  double drift_tolerance = 1e-8;  // allowed relative L^2 drift of the low modes
  double horizon = 100.0;         // |t| ceiling
  double nonlinear_scale = 1.0;   // c in u_t + H u_xx + c u u_x = 0

  double step_size() const { return dt > 0.0 ? dt : std::min(1e-3, 0.5 / truncation); }
};

struct IntegrationError : std::runtime_error {
  double t_violation;
  IntegrationError(const std::string& what, double t)
      : std::runtime_error(what), t_violation(t) {}
};

/// e^{-t H d_x^2}: coefficient at n multiplied by exp(-i n |n| t).
FourierField linear_propagate(const FourierField& u, double t);

/// -H d_x^2 v - c pi_N((pi_N v) d_x (pi_N v)).
FourierField truncated_vector_field(const FourierField& v, int truncation,
                                    double nonlinear_scale = 1.0);

/// The truncated flow Phi_t^N: modes |n| <= N follow the Hamiltonian ODE, modes
/// |n| > N rotate exactly. The low-mode L^2 norm is monitored each step.
FourierField evolve_truncated(const FourierField& u0, const FlowConfig& cfg, double t);

struct SolveCertificate {
  double richardson_error = 0.0;  // ||u_dt - u_{dt/2}||_L2 / 15
  double tail_fraction = 0.0;     // energy share of the top 10% of the band
  bool tail_warning = false;
};

/// Pseudospectral surrogate of the full flow at resolution grid_bandwidth;
/// self-certifies by a dt-halving Richardson estimate.
FourierField evolve_full(const FourierField& u0, const FlowConfig& cfg, double t,
                         SolveCertificate* cert = nullptr);

/// Single solve at an explicit step size (no certification); used by the
/// dt-convergence studies.
FourierField evolve_full_raw(const FourierField& u0, const FlowConfig& cfg, double t, double dt);

/// d/dt E_{j/2}(pi_N Phi_t^N u)|_{t=0} = <grad E_{j/2}(v), pi_{>N}(v d_x v)>
/// with v = pi_N u; j is the doubled index.
double flow_energy_derivative(const FourierField& u, int truncation, int j);

}  // namespace bolab
