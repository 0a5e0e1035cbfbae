#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "popcheck/dataset.hpp"

namespace popcheck {

/// Natural-log entropy of the distribution proportional to `counts`, with
/// 0 log 0 = 0. Returns 0 for an all-zero input.
double entropy_from_counts(std::span<const double> counts);

/// Arithmetic mean of scalar data.
double mean_d(const ScalarData& y);

/// Mean of log_density(y_i) over points.
template <class LogDensity>
double log_predictive_d(const ScalarData& y, const LogDensity& log_density) {
  if (y.empty()) throw std::invalid_argument("log_predictive_d: empty data");
  double total = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double lp = log_density(y[i]);
    if (!std::isfinite(lp)) {
      throw std::domain_error("log_predictive_d: non-finite log density at point " + std::to_string(i));
    }
    total += lp;
  }
  return total / static_cast<double>(y.size());
}

struct Moments {
  double mean = 0.0;
  double variance = 1.0;
};

/// sum_i (y_i - E[Y_i | theta])^2 / Var(Y_i | theta).
double chi_squared_d(const ScalarData& y, std::span<const Moments> moments);

/// (1/N) sum_i (y_i - theta' x_i)^2.
double mse_d(const RegressionData& y, const Eigen::VectorXd& theta);

/// Per-topic word/document mutual information: IMI(w, d | k) = H(d|k) - H(d|k, w).
struct IMIMatrix {
  std::size_t topics = 0;
  std::size_t vocab = 0;
  /// Row-major topics x vocab; NaN where word w has no token in topic k.
  std::vector<double> values;
  /// H(d|k); 0 for a topic with no tokens.
  std::vector<double> conditional_entropy;

  double at(std::size_t k, std::size_t w) const { return values[k * vocab + w]; }
  bool defined(std::size_t k, std::size_t w) const { return !std::isnan(at(k, w)); }
};

/// IMI from hard token-topic assignments. `assignments[i]` is the topic of
/// token i and must lie in [0, topics); word ids must lie in [0, vocab).
IMIMatrix imi_d(const Corpus& tokens, std::span<const int> assignments, std::size_t topics, std::size_t vocab);

/// Mean |a - b| over cells of topic k defined in both matrices, per topic;
/// NaN for a topic with no common defined cell.
std::vector<double> imi_topic_deviance(const IMIMatrix& a, const IMIMatrix& b);

}  // namespace popcheck
