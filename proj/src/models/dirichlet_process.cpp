#include "popcheck/models/dirichlet_process.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "popcheck/discrepancy.hpp"

namespace popcheck {

namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274178;  // 0.5 * log(2 pi)

double normal_log_pdf(double x, double mean, double sd) {
  const double z = (x - mean) / sd;
  return -0.5 * z * z - std::log(sd) - kLogSqrt2Pi;
}

}  // namespace

double NormalDensity::sd() const { return std::sqrt(variance); }

double NormalDensity::log_pdf(double x) const { return normal_log_pdf(x, mean, sd()); }

double NormalDensity::sample(Rng& rng) const { return rng.normal(mean, sd()); }

double DPPredictive::base_weight() const {
  if (std::isinf(alpha)) return 1.0;
  const double denom = alpha + static_cast<double>(atoms.size());
  if (!(denom > 0.0)) throw std::invalid_argument("DPPredictive: alpha = 0 with no atoms is undefined");
  return alpha / denom;
}

double DPPredictive::atom_weight() const {
  if (std::isinf(alpha)) return 0.0;
  const double denom = alpha + static_cast<double>(atoms.size());
  if (!(denom > 0.0)) throw std::invalid_argument("DPPredictive: alpha = 0 with no atoms is undefined");
  return 1.0 / denom;
}

double default_kernel_bandwidth(const std::vector<double>& atoms, const NormalDensity& base) {
  const std::size_t n = atoms.size();
  double spread = 0.0;
  if (n >= 2) {
    double mean = 0.0;
    for (double a : atoms) mean += a;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double a : atoms) ss += (a - mean) * (a - mean);
    spread = std::sqrt(ss / static_cast<double>(n - 1));
  }
  if (!(spread > 0.0)) spread = base.sd();
  return 0.5 * spread * std::pow(static_cast<double>(std::max<std::size_t>(n, 1)), -0.2);
}

ScalarData dp_predictive_sample(const DPPredictive& dp, std::size_t size, Rng& rng) {
  const double w = dp.base_weight();
  ScalarData out;
  out.observations.reserve(size);
  for (std::size_t i = 0; i < size; ++i) {
    if (dp.atoms.empty() || rng.bernoulli(w)) {
      out.observations.push_back(dp.base.sample(rng));
    } else {
      out.observations.push_back(dp.atoms[rng.index(dp.atoms.size())]);
    }
  }
  return out;
}

double dp_predictive_logdensity(const DPPredictive& dp, double point) {
  if (!(dp.kernel_bandwidth > 0.0)) throw std::invalid_argument("dp_predictive_logdensity: bandwidth must be positive");
  const double w_base = dp.base_weight();
  if (w_base >= 1.0 || dp.atoms.empty()) return dp.base.log_pdf(point);

  // log-sum-exp over the base term and one kernel term per atom.
  std::vector<double> terms;
  terms.reserve(dp.atoms.size() + 1);
  if (w_base > 0.0) terms.push_back(std::log(w_base) + dp.base.log_pdf(point));
  const double log_w_atom = std::log(dp.atom_weight());
  for (double a : dp.atoms) terms.push_back(log_w_atom + normal_log_pdf(point, a, dp.kernel_bandwidth));
  const double top = *std::max_element(terms.begin(), terms.end());
  if (std::isinf(top)) return top;
  double acc = 0.0;
  for (double t : terms) acc += std::exp(t - top);
  return top + std::log(acc);
}

DirichletProcessModel::DirichletProcessModel(double alpha, NormalDensity base, std::optional<double> bandwidth)
    : alpha_(alpha), base_(base), bandwidth_(bandwidth) {
  if (!(alpha >= 0.0)) throw std::invalid_argument("DirichletProcessModel: alpha must be >= 0");
  if (!(base.variance > 0.0)) throw std::invalid_argument("DirichletProcessModel: base variance must be positive");
  if (bandwidth && !(*bandwidth > 0.0)) throw std::invalid_argument("DirichletProcessModel: bandwidth must be positive");
}

DirichletProcessModel::latent_type DirichletProcessModel::posterior_sample(const ScalarData& y_obs, Rng&) const {
  latent_type out;
  out.global.alpha = alpha_;
  out.global.base = base_;
  out.global.atoms = y_obs.observations;
  out.global.kernel_bandwidth = bandwidth_.value_or(default_kernel_bandwidth(out.global.atoms, base_));
  return out;
}

DirichletProcessModel::latent_type DirichletProcessModel::prior_sample(Rng& rng) const {
  return posterior_sample(ScalarData{}, rng);
}

ScalarData DirichletProcessModel::predictive_sample(const latent_type& latent, const ScalarData&, std::size_t size,
                                                    Rng& rng) const {
  return dp_predictive_sample(latent.global, size, rng);
}

Discrepancy<double, DirichletProcessModel::latent_type> dp_log_predictive_discrepancy() {
  using Latent = DirichletProcessModel::latent_type;
  return Discrepancy<double, Latent>::realized(
      [](const ScalarData& y, const Latent& theta) {
        return log_predictive_d(y, [&](double x) { return dp_predictive_logdensity(theta.global, x); });
      },
      "log_predictive");
}

}  // namespace popcheck
