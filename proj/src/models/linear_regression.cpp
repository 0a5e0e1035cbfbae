#include "popcheck/models/linear_regression.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "popcheck/discrepancy.hpp"

namespace popcheck {

BLRPosterior::BLRPosterior(Eigen::MatrixXd precision, const Eigen::VectorXd& shift, double prior_variance)
    : precision_(std::move(precision)), chol_(precision_), prior_variance_(prior_variance) {
  if (chol_.info() != Eigen::Success) throw std::invalid_argument("BLRPosterior: precision is not positive definite");
  if (shift.size() != precision_.rows()) throw std::invalid_argument("BLRPosterior: shift dimension mismatch");
  mean_ = chol_.solve(shift);
}

Eigen::MatrixXd BLRPosterior::covariance() const {
  return chol_.solve(Eigen::MatrixXd::Identity(dim(), dim()));
}

double BLRPosterior::log_density(const Eigen::VectorXd& theta) const {
  const Eigen::VectorXd r = theta - mean_;
  // log|precision| = 2 sum log diag(L)
  const Eigen::MatrixXd L = chol_.matrixL();
  double log_det = 0.0;
  for (Eigen::Index i = 0; i < dim(); ++i) log_det += 2.0 * std::log(L(i, i));
  const double quad = r.dot(precision_ * r);
  return 0.5 * log_det - 0.5 * quad - 0.5 * static_cast<double>(dim()) * std::log(2.0 * std::numbers::pi);
}

Eigen::VectorXd BLRPosterior::sample(Rng& rng) const {
  Eigen::VectorXd z(dim());
  for (Eigen::Index i = 0; i < dim(); ++i) z(i) = rng.normal();
  return mean_ + chol_.matrixU().solve(z);
}

BLRPosterior blr_posterior(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double prior_variance) {
  if (!(prior_variance > 0.0) || !std::isfinite(prior_variance)) {
    throw std::invalid_argument("blr_posterior: prior variance must be positive and finite");
  }
  if (X.rows() != y.size()) throw std::invalid_argument("blr_posterior: X rows must match y length");
  if (!X.allFinite() || !y.allFinite()) throw std::invalid_argument("blr_posterior: non-finite data");
  const Eigen::Index p = X.cols();
  Eigen::MatrixXd precision = Eigen::MatrixXd::Identity(p, p) / prior_variance;
  precision.selfadjointView<Eigen::Lower>().rankUpdate(X.transpose());
  precision.triangularView<Eigen::StrictlyUpper>() = precision.transpose();
  const Eigen::VectorXd shift = X.transpose() * y;
  return BLRPosterior(std::move(precision), shift, prior_variance);
}

void design_matrix(const RegressionData& data, Eigen::Index dim, Eigen::MatrixXd& X, Eigen::VectorXd& y) {
  const auto n = static_cast<Eigen::Index>(data.size());
  X.resize(n, dim);
  y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& pt = data.observations[static_cast<std::size_t>(i)];
    if (static_cast<Eigen::Index>(pt.covariates.size()) != dim) {
      throw std::invalid_argument("design_matrix: covariate dimension mismatch at row " + std::to_string(i));
    }
    X.row(i) = Eigen::Map<const Eigen::RowVectorXd>(pt.covariates.data(), dim);
    y(i) = pt.response;
  }
}

RegressionData make_regression_data(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  if (X.rows() != y.size()) throw std::invalid_argument("make_regression_data: X rows must match y length");
  RegressionData out;
  out.observations.resize(static_cast<std::size_t>(X.rows()));
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    auto& pt = out.observations[static_cast<std::size_t>(i)];
    pt.covariates.resize(static_cast<std::size_t>(X.cols()));
    for (Eigen::Index j = 0; j < X.cols(); ++j) pt.covariates[static_cast<std::size_t>(j)] = X(i, j);
    pt.response = y(i);
  }
  return out;
}

RegressionData blr_predictive_sample(const Eigen::VectorXd& theta, const RegressionData& design, std::size_t size,
                                     Rng& rng, double noise_sd) {
  if (design.empty()) throw std::invalid_argument("blr_predictive_sample: empty design");
  RegressionData out;
  out.observations.reserve(size);
  for (std::size_t i = 0; i < size; ++i) {
    const auto& x = design.observations[i % design.size()].covariates;
    if (static_cast<Eigen::Index>(x.size()) != theta.size()) {
      throw std::invalid_argument("blr_predictive_sample: covariate dimension does not match theta");
    }
    const double mean = Eigen::Map<const Eigen::VectorXd>(x.data(), theta.size()).dot(theta);
    out.observations.push_back({x, mean + noise_sd * rng.normal()});
  }
  return out;
}

BayesianLinearRegression::BayesianLinearRegression(Eigen::Index dim, double prior_variance, double noise_sd)
    : dim_(dim), prior_variance_(prior_variance), noise_sd_(noise_sd) {
  if (dim < 1) throw std::invalid_argument("BayesianLinearRegression: dimension must be >= 1");
  if (!(prior_variance > 0.0)) throw std::invalid_argument("BayesianLinearRegression: prior variance must be > 0");
  if (!(noise_sd >= 0.0)) throw std::invalid_argument("BayesianLinearRegression: noise sd must be >= 0");
}

BLRPosterior BayesianLinearRegression::posterior(const RegressionData& y_obs) const {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  design_matrix(y_obs, dim_, X, y);
  return blr_posterior(X, y, prior_variance_);
}

BayesianLinearRegression::latent_type BayesianLinearRegression::posterior_sample(const RegressionData& y_obs,
                                                                                 Rng& rng) const {
  return {posterior(y_obs).sample(rng), {}};
}

BayesianLinearRegression::latent_type BayesianLinearRegression::prior_sample(Rng& rng) const {
  Eigen::VectorXd theta(dim_);
  const double sd = std::sqrt(prior_variance_);
  for (Eigen::Index i = 0; i < dim_; ++i) theta(i) = rng.normal(0.0, sd);
  return {std::move(theta), {}};
}

RegressionData BayesianLinearRegression::predictive_sample(const latent_type& latent, const RegressionData& design,
                                                           std::size_t size, Rng& rng) const {
  return blr_predictive_sample(latent.global, design, size, rng, noise_sd_);
}

Discrepancy<RegressionPoint, BayesianLinearRegression::latent_type> blr_mse_discrepancy() {
  using Latent = BayesianLinearRegression::latent_type;
  return Discrepancy<RegressionPoint, Latent>::realized(
      [](const RegressionData& y, const Latent& theta) { return mse_d(y, theta.global); }, "mse");
}

SimulatedRegression simulate_regression_data(std::size_t n, std::size_t p, std::uint64_t seed) {
  Rng rng(seed);
  SimulatedRegression sim;
  const auto rows = static_cast<Eigen::Index>(n);
  const auto cols = static_cast<Eigen::Index>(p);
  sim.theta_true.resize(cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    const double t = rng.student_t(kThetaStudentDf);
    sim.theta_true(j) = t * rng.uniform();
  }
  sim.X.resize(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) sim.X(i, j) = rng.uniform();
  }
  sim.y.resize(rows);
  for (Eigen::Index i = 0; i < rows; ++i) sim.y(i) = sim.X.row(i).dot(sim.theta_true) + rng.normal();
  return sim;
}

RegressionData RegressionPopulation::operator()(std::size_t size, Rng& rng) const {
  RegressionData out;
  out.observations.resize(size);
  for (auto& pt : out.observations) {
    pt.covariates.resize(static_cast<std::size_t>(theta_.size()));
    for (auto& x : pt.covariates) x = rng.uniform();
    pt.response = Eigen::Map<const Eigen::VectorXd>(pt.covariates.data(), theta_.size()).dot(theta_) + rng.normal();
  }
  return out;
}

}  // namespace popcheck
