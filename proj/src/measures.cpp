#include "bolab/measures.hpp"

#include <cmath>
#include <stdexcept>

#include "bolab/energy.hpp"
#include "bolab/operator_word.hpp"
#include "bolab/parallel.hpp"

namespace bolab {

double GaussianSpec::coeff_sd(int n) const {
  return 0.5 / std::pow(static_cast<double>(std::abs(n)), k / 2.0);
}

FourierField sample_mu_at(const GaussianSpec& spec, uint64_t sample_index) {
  if (spec.k < 1) throw std::invalid_argument("sample_mu requires k >= 1");
  if (spec.mode_cutoff < 1) throw std::invalid_argument("sample_mu requires mode_cutoff >= 1");
  CounterRng rng(spec.seed);
  FourierField u = FourierField::zeros(spec.mode_cutoff, true);
  for (int n = 1; n <= spec.mode_cutoff; ++n) {
    const auto [h, l] = rng.normal_pair(sample_index, static_cast<uint64_t>(n));
    const double sd = spec.coeff_sd(n);
    u.set_coeff(n, {sd * h, sd * l});
  }
  return u;
}

std::vector<FourierField> sample_mu(const GaussianSpec& spec, int count, int workers) {
  if (count < 1) throw std::invalid_argument("sample count must be >= 1");
  std::vector<FourierField> out(count);
  parallel_for(count, workers, [&](std::size_t i) { out[i] = sample_mu_at(spec, i); });
  return out;
}

double alpha(int cutoff, double c) {
  if (cutoff < 1) throw std::invalid_argument("alpha requires N >= 1");
  double s = 0.0;
  for (int n = 1; n <= cutoff; ++n) s += c / n;
  return s;
}

double cutoff_chi(double x, double R) {
  if (R <= 0.0) throw std::invalid_argument("cutoff scale R must be positive");
  const double y = std::abs(x) / R;
  if (y <= 1.0) return 1.0;
  if (y >= 2.0) return 0.0;
  const auto bump = [](double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; };
  const double a = bump(2.0 - y);
  const double b = bump(y - 1.0);
  return a / (a + b);
}

DensityValue density_f(const FourierField& u, int k, int cutoff, double R, double alpha_c) {
  if (k < 2) throw std::invalid_argument("density_f requires k >= 2");
  DensityValue out;
  const FourierField v = project_low(u, cutoff);
  out.energies.resize(k + 1);
  for (int j = 0; j <= k; ++j) out.energies[j] = eval_energy(j, v);
  const double hk = sobolev_norm(v, k / 2.0, true);
  out.remainder = out.energies[k] - hk * hk;

  double chi_product = 1.0;
  for (int j = 0; j <= k - 2; ++j) chi_product *= cutoff_chi(out.energies[j], R);
  chi_product *= cutoff_chi(out.energies[k - 1] - alpha(cutoff, alpha_c), R);

  double exponent = -out.remainder;
  if (exponent > 700.0) {
    exponent = 700.0;
    out.clipped = true;
  }
  out.value = chi_product * std::exp(exponent);
  return out;
}

double WeightedEnsemble::ess() const {
  double s = 0.0, s2 = 0.0;
  for (double w : weights) {
    s += w;
    s2 += w * w;
  }
  return s2 > 0.0 ? s * s / s2 : 0.0;
}

double WeightedEnsemble::weighted_mean(const std::vector<double>& observable) const {
  return weighted_mean_se(observable).first;
}

std::pair<double, double> WeightedEnsemble::weighted_mean_se(
    const std::vector<double>& observable) const {
  if (observable.size() != weights.size())
    throw std::invalid_argument("observable/weight length mismatch");
  std::vector<double> wo(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) wo[i] = weights[i] * observable[i];
  const double sw = pairwise_sum(weights);
  if (sw <= 0.0) throw std::runtime_error("total importance weight vanished");
  const double mean = pairwise_sum(wo) / sw;
  // Variance of the self-normalized estimator (delta method).
  std::vector<double> dev2(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double d = weights[i] * (observable[i] - mean);
    dev2[i] = d * d;
  }
  const double var = pairwise_sum(dev2) / (sw * sw);
  return {mean, std::sqrt(var)};
}

WeightedEnsemble weighted_ensemble(const GaussianSpec& spec, int cutoff, double R, int count,
                                   int workers) {
  WeightedEnsemble e;
  e.samples = sample_mu(spec, count, workers);
  e.weights.resize(count);
  e.k = spec.k;
  e.cutoff = cutoff;
  e.R = R;
  e.seed = spec.seed;
  e.mode_cutoff = spec.mode_cutoff;
  std::vector<unsigned char> clipped(count, 0);
  // Warm the energy cache before going parallel.
  for (int j = 0; j <= spec.k; ++j) (void)energy(j);
  parallel_for(count, workers, [&](std::size_t i) {
    const DensityValue d = density_f(e.samples[i], spec.k, cutoff, R, spec.alpha_c);
    e.weights[i] = d.value;
    clipped[i] = d.clipped ? 1 : 0;
  });
  for (auto c : clipped) e.clipped_count += c;
  double total = pairwise_sum(e.weights);
  if (total <= 0.0)
    throw std::runtime_error("all importance weights vanished; increase R");
  return e;
}

LqEstimate lq_norm_mc(const std::function<double(const FourierField&)>& observable,
                      const GaussianSpec& spec, double q, int count, int workers) {
  if (q < 1.0) throw std::invalid_argument("lq_norm_mc requires q >= 1");
  if (count < 2) throw std::invalid_argument("lq_norm_mc requires count >= 2");
  std::vector<double> powered(count);
  parallel_for(count, workers, [&](std::size_t i) {
    const FourierField u = sample_mu_at(spec, i);
    powered[i] = std::pow(std::abs(observable(u)), q);
  });
  const double mean = pairwise_sum(powered) / count;
  std::vector<double> dev2(count);
  for (int i = 0; i < count; ++i) {
    const double d = powered[i] - mean;
    dev2[i] = d * d;
  }
  const double var = pairwise_sum(dev2) / (count - 1.0);
  const double se_mean = std::sqrt(var / count);
  LqEstimate est;
  est.value = std::pow(mean, 1.0 / q);
  // d(m^{1/q})/dm = m^{1/q - 1} / q
  est.std_error = mean > 0.0 ? std::pow(mean, 1.0 / q - 1.0) / q * se_mean : 0.0;
  return est;
}

}  // namespace bolab
