#pragma once

#include <cstdint>
#include <vector>

#include "bolab/flows.hpp"
#include "bolab/fourier_field.hpp"
#include "bolab/report.hpp"

namespace bolab {

// Each experiment probes one checkable claim and emits a Report whose
// verdicts reference the acceptance-criterion ids (A1..A12) they feed.

struct LemmaProdParams {
  std::vector<int> n_list{64, 128, 256, 512, 1024, 2048, 4096};
  int brute_check_max = 64;        // compare against the O(N^2) oracle up to here
  double band_rel_width = 0.5;     // allowed relative spread of S(N) N / ln N
};
/// The double sum S(N) = sum_{|n+m|>N, 0<|n|,|m|<=N} 1/n^2 1/|m| and its
/// normalized ratio S(N) N / ln N.
Report check_lemma_prod(const LemmaProdParams& p);

struct GnDecayParams {
  int k = 6;
  double q = 2.0;
  std::vector<int> n_list{16, 32, 64, 128, 256};
  int count = 2000;
  uint64_t seed = 1;
  int mode_cutoff = 512;
  int workers = 0;
  double slope_lo = -1.3, slope_hi = -0.7;  // acceptance band for the G_N fit
};
/// L^q(d mu_{k/2}) norms of the t=0 energy derivatives G_N, H_N, L_N^{j0}
/// along the truncated flows, with log-log fits in N.
Report check_gn_decay(const GnDecayParams& p);

struct InvarianceParams {
  int k = 6;
  int truncation = 32;
  double R = 8.0;
  std::vector<double> t_grid{0.25, 0.5};
  int count = 4000;
  uint64_t seed = 1;
  int mode_cutoff = 64;
  int workers = 0;
  double dt = 5e-4;
  double z_band = 3.0;
  double min_ess = 200.0;
  bool nonlinear = true;  // false: pure rotation diagnostic
  bool weighted = true;   // false: plain Gaussian diagnostic
};
/// Weighted ensemble evolved by the truncated flow with weights frozen at
/// t=0; per-observable paired z-scores against the t=0 statistics.
Report check_invariance(const InvarianceParams& p);

struct FlowConvergenceParams {
  FourierField u0;  // default: cos x + 0.5 sin 2x
  std::vector<int> n_list{8, 16, 32, 64};
  double t = 0.1;
  int reference_bandwidth = 256;
  double dt = 1e-4;
  double slope_max = -0.8;
  FlowConvergenceParams();
};
/// ||Phi_t u0 - Phi_t^N u0|| against N, reference = high-resolution full solve.
Report check_flow_convergence(const FlowConvergenceParams& p);

struct ConservationParams {
  FourierField u0;  // default: 0.3 cos x + 0.05 sin 2x
  int k_max = 6;
  double T = 1.0;
  FlowConfig cfg{.grid_bandwidth = 64, .dt = 1e-3, .drift_tolerance = 1e-6};
  int time_samples = 8;
  double drift_tolerance = 1e-6;
  ConservationParams();
};
/// Relative drift of E_{k/2} along the full solve, per k, on a time grid.
Report check_conservation(const ConservationParams& p);

struct RecurrenceParams {
  FourierField u0;  // default: sampled-like smooth data
  double sigma = 1.0;
  double T = 200.0;
  double stride = 0.05;
  double departure_time = 1.0;  // running minimum tracked after this time
  FlowConfig cfg{.truncation = 8, .grid_bandwidth = 16, .drift_tolerance = 1e-7,
                 .horizon = 1e9};
  RecurrenceParams();
};
/// d(t) = ||Phi_t^N u0 - u0||_{H^sigma}: local minima and the running minimum
/// after the initial departure. Depths are reported, never asserted.
Report recurrence_scan(const RecurrenceParams& p);

struct LiouvilleParams {
  int truncation = 16;
  int trials = 10;
  uint64_t seed = 1;
  double h = 1e-5;
  double tol = 1e-8;
};
/// Coordinate divergence of the truncated vector field on E_N by centered
/// differences, for the full field and the nonlinear part alone.
Report check_liouville(const LiouvilleParams& p);

/// Exact S(N) evaluators (exposed for the unit tests).
double lemma_prod_sum_fast(int cutoff);
double lemma_prod_sum_brute(int cutoff);

/// The default observable set of check_invariance, in report order.
std::vector<std::string> invariance_observable_names(int k);

}  // namespace bolab
