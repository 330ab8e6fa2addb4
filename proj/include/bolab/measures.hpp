#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "bolab/fourier_field.hpp"
#include "bolab/rng.hpp"

namespace bolab {

/// Parameters of the Gaussian measure mu_{k/2} induced by the random series
/// sum_n phi_n / |n|^{k/2} e^{inx}: coeff(n) = (h_n + i l_n) / (2 |n|^{k/2})
/// for n > 0 with independent standard normals, Hermitian-extended. With the
/// coefficient-sum norm convention the formal density is exp(-||u||^2_{Hdot^{k/2}}).
struct GaussianSpec {
  int k = 6;
  int mode_cutoff = 64;
  uint64_t seed = 0;
  double alpha_c = 1.0;  // the constant c' in alpha(N) = sum c'/n

  double coeff_sd(int n) const;  // std dev of Re/Im of coeff(n), n > 0
};

FourierField sample_mu_at(const GaussianSpec& spec, uint64_t sample_index);
std::vector<FourierField> sample_mu(const GaussianSpec& spec, int count, int workers = 1);

/// alpha(N) = sum_{n=1}^N c'/n; equals E ||pi_N u||^2_{Hdot^{(k-1)/2}} under
/// sample_mu's normalization when c' = 1.
double alpha(int cutoff, double c = 1.0);

/// Smooth cutoff: 1 on |x| <= R, 0 on |x| >= 2R, exp-bump blend between.
double cutoff_chi(double x, double R);

struct DensityValue {
  double value = 0.0;
  bool clipped = false;            // e^{-R} overflowed and was saturated
  std::vector<double> energies;    // E_{j/2}(pi_N u), j = 0..k
  double remainder = 0.0;          // R_{k/2}(pi_N u)
};

/// F_{k/2,N,R}(u) = prod_{j=0}^{k-2} chi_R(E_{j/2}(pi_N u))
///                  * chi_R(E_{(k-1)/2}(pi_N u) - alpha_N) * e^{-R_{k/2}(pi_N u)}.
DensityValue density_f(const FourierField& u, int k, int cutoff, double R, double alpha_c = 1.0);

struct WeightedEnsemble {
  std::vector<FourierField> samples;
  std::vector<double> weights;
  int k = 0;
  int cutoff = 0;
  double R = 0.0;
  uint64_t seed = 0;
  int mode_cutoff = 0;
  std::size_t clipped_count = 0;

  double ess() const;  // (sum w)^2 / sum w^2
  double weighted_mean(const std::vector<double>& observable) const;
  /// Self-normalized mean and its standard error.
  std::pair<double, double> weighted_mean_se(const std::vector<double>& observable) const;
};

/// Samples from mu_{k/2} weighted by F_{k/2,N,R}; the computational stand-in
/// for rho_{k/2,R}. Throws when the total weight vanishes.
WeightedEnsemble weighted_ensemble(const GaussianSpec& spec, int cutoff, double R, int count,
                                   int workers = 1);

struct LqEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

/// Monte Carlo ((1/M) sum |O(u_i)|^q)^{1/q} with a delta-method standard error.
LqEstimate lq_norm_mc(const std::function<double(const FourierField&)>& observable,
                      const GaussianSpec& spec, double q, int count, int workers = 1);

}  // namespace bolab
