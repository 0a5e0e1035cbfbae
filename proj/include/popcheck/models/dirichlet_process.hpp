#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "popcheck/check.hpp"
#include "popcheck/dataset.hpp"
#include "popcheck/rng.hpp"

namespace popcheck {

struct NormalDensity {
  double mean = 0.0;
  double variance = 1.0;

  double sd() const;
  double log_pdf(double x) const;
  double sample(Rng& rng) const;
};

/// Predictive distribution of a DP(alpha H) model given atoms y_obs:
///   alpha / (alpha + n) H + sum_i 1 / (alpha + n) delta_{y_i}.
/// For density evaluation each delta is smoothed by a Gaussian kernel.
struct DPPredictive {
  double alpha = 1.0;
  NormalDensity base;
  std::vector<double> atoms;
  double kernel_bandwidth = 1.0;

  /// alpha / (alpha + n); 1 when alpha is infinite.
  double base_weight() const;
  /// 1 / (alpha + n), the weight of each atom.
  double atom_weight() const;
};

/// 0.5 * sd(atoms) * n^(-1/5). Falls back to the base sd when the atoms
/// have fewer than two points or zero spread.
double default_kernel_bandwidth(const std::vector<double>& atoms, const NormalDensity& base);

/// Each point: from H with probability alpha / (alpha + n), else a uniformly
/// chosen atom.
ScalarData dp_predictive_sample(const DPPredictive& dp, std::size_t size, Rng& rng);

/// log[ alpha/(alpha+n) h(x) + sum_i 1/(alpha+n) k_bw(x - y_i) ].
double dp_predictive_logdensity(const DPPredictive& dp, double point);

/// DP model whose posterior predictive is fully determined by the data, so
/// the posterior "sample" is the predictive itself.
class DirichletProcessModel {
 public:
  using observation_type = double;
  using latent_type = LatentState<DPPredictive>;

  DirichletProcessModel(double alpha, NormalDensity base, std::optional<double> bandwidth = std::nullopt);

  latent_type posterior_sample(const ScalarData& y_obs, Rng& rng) const;
  latent_type prior_sample(Rng& rng) const;
  ScalarData predictive_sample(const latent_type& latent, const ScalarData& design, std::size_t size,
                               Rng& rng) const;

  double alpha() const noexcept { return alpha_; }
  const NormalDensity& base() const noexcept { return base_; }

 private:
  double alpha_;
  NormalDensity base_;
  std::optional<double> bandwidth_;
};

/// d(y, theta) = (1/n) sum_i log p(y_i | atoms of theta).
Discrepancy<double, DirichletProcessModel::latent_type> dp_log_predictive_discrepancy();

}  // namespace popcheck
