#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "popcheck/discrepancy.hpp"
#include "popcheck/models/linear_regression.hpp"

using namespace popcheck;

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace

TEST_CASE("posterior with no data is the prior", "[regression]") {
  const auto post = blr_posterior(Eigen::MatrixXd(0, 3), Eigen::VectorXd(0), 2.5);
  CHECK(post.mean().norm() == 0.0);
  CHECK(post.covariance().isApprox(2.5 * Eigen::MatrixXd::Identity(3, 3)));
}

TEST_CASE("one-dimensional closed form", "[regression]") {
  Eigen::MatrixXd X(1, 1);
  X << 1.0;
  Eigen::VectorXd y(1);
  y << 2.0;
  const auto post = blr_posterior(X, y, 1.0);
  CHECK(post.mean()(0) == Catch::Approx(1.0));
  CHECK(post.covariance()(0, 0) == Catch::Approx(0.5));
}

TEST_CASE("posterior density matches a quadrature oracle", "[regression][oracle]") {
  Rng rng(1);
  const int N = 15;
  Eigen::MatrixXd X(N, 1);
  Eigen::VectorXd y(N);
  for (int i = 0; i < N; ++i) {
    X(i, 0) = rng.uniform(-1.0, 2.0);
    y(i) = 0.8 * X(i, 0) + rng.normal();
  }
  const double c = 1.7;
  const auto post = blr_posterior(X, y, c);

  // Unnormalized log prior + log likelihood on a grid, normalized by trapezoid.
  const double lo = -4.0, hi = 5.0;
  const int steps = 90000;
  const double dx = (hi - lo) / steps;
  std::vector<double> logp(steps + 1);
  double top = -INFINITY;
  for (int s = 0; s <= steps; ++s) {
    const double t = lo + s * dx;
    double lp = -0.5 * t * t / c;
    for (int i = 0; i < N; ++i) lp -= 0.5 * (y(i) - t * X(i, 0)) * (y(i) - t * X(i, 0));
    logp[s] = lp;
    top = std::max(top, lp);
  }
  double z = 0.0;
  for (int s = 0; s <= steps; ++s) z += ((s == 0 || s == steps) ? 0.5 : 1.0) * std::exp(logp[s] - top) * dx;
  double sup = 0.0;
  for (int s = 0; s <= steps; s += 10) {
    Eigen::VectorXd t(1);
    t << lo + s * dx;
    const double oracle = std::exp(logp[s] - top) / z;
    sup = std::max(sup, std::abs(std::exp(post.log_density(t)) - oracle));
  }
  CHECK(sup < 1e-3);
}

TEST_CASE("posterior covariance is SPD and the mean shrinks with c", "[regression][property]") {
  const auto sim = simulate_regression_data(30, 8, 2);
  double prev = INFINITY;
  for (double log_c = 4.0; log_c >= -8.0; log_c -= 0.5) {
    const auto post = blr_posterior(sim.X, sim.y, std::exp(log_c));
    const Eigen::MatrixXd cov = post.covariance();
    REQUIRE((cov - cov.transpose()).norm() < 1e-12 * cov.norm());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    REQUIRE(es.eigenvalues().minCoeff() > 0.0);
    const double norm = post.mean().norm();
    REQUIRE(norm < prev);
    prev = norm;
  }
  CHECK(prev < 0.05);
}

TEST_CASE("posterior draws have the posterior moments", "[regression]") {
  const auto sim = simulate_regression_data(20, 3, 3);
  const auto post = blr_posterior(sim.X, sim.y, 1.0);
  Rng rng(4);
  const int n = 40000;
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(3);
  Eigen::MatrixXd second = Eigen::MatrixXd::Zero(3, 3);
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd t = post.sample(rng);
    mean += t / n;
    second += t * t.transpose() / n;
  }
  const Eigen::MatrixXd cov = second - mean * mean.transpose();
  const Eigen::MatrixXd truth = post.covariance();
  for (int j = 0; j < 3; ++j) CHECK(std::abs(mean(j) - post.mean()(j)) < 4.0 * std::sqrt(truth(j, j) / n));
  CHECK((cov - truth).norm() < 0.05 * truth.norm());
}

TEST_CASE("non-finite inputs are rejected", "[regression]") {
  Eigen::MatrixXd X(2, 1);
  X << 1.0, NAN;
  Eigen::VectorXd y(2);
  y << 1.0, 2.0;
  CHECK_THROWS_AS(blr_posterior(X, y, 1.0), std::invalid_argument);
  X << 1.0, 2.0;
  CHECK_THROWS_AS(blr_posterior(X, y, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(blr_posterior(X, Eigen::VectorXd(3), 1.0), std::invalid_argument);
}

TEST_CASE("predictive sampling", "[regression]") {
  const auto sim = simulate_regression_data(10, 2, 5);
  const auto design = sim.data();
  Rng rng(6);
  const auto zero = blr_predictive_sample(Eigen::VectorXd::Zero(2), design, 10000, rng);
  double m = 0.0;
  for (const auto& pt : zero.observations) m += pt.response / 10000.0;
  CHECK(std::abs(m) < 0.03);
  CHECK(zero.observations[13].covariates == design.observations[3].covariates);

  Eigen::VectorXd theta(2);
  theta << 1.5, -0.5;
  const auto exact = blr_predictive_sample(theta, design, 10, rng, 0.0);
  CHECK(mse_d(exact, theta) == 0.0);

  Rng a(7), b(7);
  const auto ya = blr_predictive_sample(theta, design, 5, a);
  const auto yb = blr_predictive_sample(theta, design, 5, b);
  for (int i = 0; i < 5; ++i) CHECK(ya.observations[i].response == yb.observations[i].response);
}

TEST_CASE("simulated regression data", "[regression]") {
  const auto sim = simulate_regression_data(50, 100, 8);
  CHECK(sim.X.rows() == 50);
  CHECK(sim.X.cols() == 100);
  CHECK(sim.y.size() == 50);
  CHECK(sim.X.minCoeff() >= 0.0);
  CHECK(sim.X.maxCoeff() <= 1.0);
  const Eigen::VectorXd r = sim.y - sim.X * sim.theta_true;
  const double var = (r.array() - r.mean()).square().sum() / 49.0;
  CHECK(std::abs(var - 1.0) < 0.45);
  const auto again = simulate_regression_data(50, 100, 8);
  CHECK(again.y == sim.y);
}

TEST_CASE("prior and posterior checks against closed forms", "[regression][oracle]") {
  // 1-dim model with x = 1 everywhere, d = mean response, g = indicator.
  // Prior predictive of the mean of n responses: N(0, c + 1/n);
  // posterior predictive: N(m, 1/(1/c + N) + 1/n).
  const double c = 4.0;
  const std::size_t N = 25;
  Rng rng(9);
  RegressionData y;
  for (std::size_t i = 0; i < N; ++i) y.observations.push_back({{1.0}, 1.0 + rng.normal()});
  double ybar = 0.0;
  for (const auto& pt : y.observations) ybar += pt.response / N;
  const BayesianLinearRegression model(1, c);
  using D = ModelDiscrepancy<BayesianLinearRegression>;
  const auto d = D::simple([](const RegressionData& s) {
    double m = 0.0;
    for (const auto& pt : s.observations) m += pt.response;
    return m / static_cast<double>(s.size());
  });
  CheckConfig cfg;
  cfg.replications = 20000;
  cfg.seed = 10;

  const double prior_var = c + 1.0 / N;
  const double post_prec = 1.0 / c + N;
  const double post_mean = N * ybar / post_prec;
  const double post_var = 1.0 / post_prec + 1.0 / N;
  CHECK(prior_var > post_var);

  const auto prior = run_prior_pc(model, y, d, DistanceKind::indicator, cfg);
  const double prior_exact = 1.0 - normal_cdf(ybar / std::sqrt(prior_var));
  CHECK(std::abs(prior.estimate - prior_exact) < 3.0 * prior.std_error);

  const auto ppc = run_ppc(model, y, d, DistanceKind::indicator, cfg);
  const double ppc_exact = 1.0 - normal_cdf((ybar - post_mean) / std::sqrt(post_var));
  CHECK(std::abs(ppc.estimate - ppc_exact) < 3.0 * ppc.std_error);

  // Spread of d(y_rep) itself, from the absolute distance to a fixed zero reference.
  double s_prior = 0.0, s_post = 0.0;
  for (int r = 0; r < 4000; ++r) {
    Rng a = Rng::substream(11, {static_cast<std::uint64_t>(r)});
    const auto tp = model.prior_sample(a);
    const auto tq = model.posterior_sample(y, a);
    const double dp = std::get<double>(d(model.predictive_sample(tp, y, N, a), tp));
    const double dq = std::get<double>(d(model.predictive_sample(tq, y, N, a), tq));
    s_prior += dp * dp / 4000.0;
    s_post += (dq - post_mean) * (dq - post_mean) / 4000.0;
  }
  CHECK(s_prior > s_post);
  CHECK(s_prior == Catch::Approx(prior_var).epsilon(0.1));
  CHECK(s_post == Catch::Approx(post_var).epsilon(0.1));
}

TEST_CASE("population sampler", "[regression]") {
  Eigen::VectorXd theta(3);
  theta << 1.0, 0.0, -1.0;
  const RegressionPopulation pop(theta);
  Rng rng(12);
  const auto y = pop(20000, rng);
  CHECK(y.size() == 20000);
  CHECK(std::abs(mse_d(y, theta) - 1.0) < 0.05);
}
