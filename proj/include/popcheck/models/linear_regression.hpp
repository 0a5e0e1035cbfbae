#pragma once

#include <cstddef>
#include <cstdint>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "popcheck/check.hpp"
#include "popcheck/dataset.hpp"
#include "popcheck/rng.hpp"

namespace popcheck {

/// Normal(mean, precision^-1) posterior of theta under theta ~ N(0, c I),
/// y_i ~ N(theta' x_i, 1).
class BLRPosterior {
 public:
  /// Posterior with the given precision and mean precision^-1 * shift.
  BLRPosterior(Eigen::MatrixXd precision, const Eigen::VectorXd& shift, double prior_variance);

  const Eigen::VectorXd& mean() const noexcept { return mean_; }
  const Eigen::MatrixXd& precision() const noexcept { return precision_; }
  double prior_variance() const noexcept { return prior_variance_; }
  static constexpr double noise_variance = 1.0;
  Eigen::Index dim() const noexcept { return mean_.size(); }

  Eigen::MatrixXd covariance() const;
  double log_density(const Eigen::VectorXd& theta) const;
  /// mean + L^-T z with precision = L L', so the draw has covariance precision^-1.
  Eigen::VectorXd sample(Rng& rng) const;

 private:
  Eigen::VectorXd mean_;
  Eigen::MatrixXd precision_;
  Eigen::LLT<Eigen::MatrixXd> chol_;
  double prior_variance_;
};

/// precision = I / c + X'X, mean = precision^-1 X' y.
BLRPosterior blr_posterior(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double prior_variance);

/// Stacks covariates into an N x p matrix and responses into a vector.
/// `dim` is used when the data set is empty.
void design_matrix(const RegressionData& data, Eigen::Index dim, Eigen::MatrixXd& X, Eigen::VectorXd& y);

RegressionData make_regression_data(const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

/// y_i = theta' x_i + noise_sd * eps_i with covariates taken from
/// design[i % |design|]. noise_sd = 0 is a test hook.
RegressionData blr_predictive_sample(const Eigen::VectorXd& theta, const RegressionData& design, std::size_t size,
                                     Rng& rng, double noise_sd = 1.0);

class BayesianLinearRegression {
 public:
  using observation_type = RegressionPoint;
  using latent_type = LatentState<Eigen::VectorXd>;

  BayesianLinearRegression(Eigen::Index dim, double prior_variance, double noise_sd = 1.0);

  BLRPosterior posterior(const RegressionData& y_obs) const;
  latent_type posterior_sample(const RegressionData& y_obs, Rng& rng) const;
  latent_type prior_sample(Rng& rng) const;
  RegressionData predictive_sample(const latent_type& latent, const RegressionData& design, std::size_t size,
                                   Rng& rng) const;

  Eigen::Index dim() const noexcept { return dim_; }
  double prior_variance() const noexcept { return prior_variance_; }

 private:
  Eigen::Index dim_;
  double prior_variance_;
  double noise_sd_;
};

/// Mean squared residual discrepancy d(y, theta).
Discrepancy<RegressionPoint, BayesianLinearRegression::latent_type> blr_mse_discrepancy();

/// Fixed-design simulation: x_ij ~ U(0, 1), theta_j = t_j u_j with
/// t_j ~ Student-t(3), u_j ~ U(0, 1), and y_i ~ N(theta' x_i, 1).
struct SimulatedRegression {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  Eigen::VectorXd theta_true;

  RegressionData data() const { return make_regression_data(X, y); }
};

inline constexpr double kThetaStudentDf = 3.0;

SimulatedRegression simulate_regression_data(std::size_t n, std::size_t p, std::uint64_t seed);

/// Draws fresh (x, y) pairs from the simulation's population.
class RegressionPopulation {
 public:
  explicit RegressionPopulation(Eigen::VectorXd theta_true) : theta_(std::move(theta_true)) {}
  RegressionData operator()(std::size_t size, Rng& rng) const;

 private:
  Eigen::VectorXd theta_;
};

}  // namespace popcheck
