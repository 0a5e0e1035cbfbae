#include <cmath>

#include "json_util.hpp"
#include "popcheck/io.hpp"
#include "popcheck/models/linear_regression.hpp"

namespace popcheck {

namespace {

enum : std::uint64_t { kDataStream = 0, kCheckStream = 1 };

std::string p_label(double p) {
  return "p_bootstrap_" + format_double(p);
}

}  // namespace

std::vector<std::string> regression_methods(double p_bootstrap) {
  return {"ppc", "ideal", "cv", "oob", "double_bootstrap", p_label(p_bootstrap)};
}

void RegressionExperimentConfig::validate() const {
  if (log_c.empty()) throw ConfigError("regression: prior variance grid is empty");
  for (double v : log_c) {
    if (!std::isfinite(v)) throw ConfigError("regression: log_c values must be finite");
  }
  if (n < 2 || p < 1) throw ConfigError("regression: need n >= 2 and p >= 1");
  if (!(p_bootstrap >= 0.0 && p_bootstrap <= 1.0)) throw ConfigError("regression: p_bootstrap must lie in [0, 1]");
}

RegressionExperimentConfig RegressionExperimentConfig::from_json(const nlohmann::json& j) {
  using detail::get_or;
  detail::require_keys(j, "regression config", {"n", "p", "log_c", "log_c_min", "log_c_max", "grid_points", "p_bootstrap"});
  RegressionExperimentConfig c;
  c.n = get_or(j, "n", c.n);
  c.p = get_or(j, "p", c.p);
  if (j.contains("log_c")) {
    c.log_c = get_or<std::vector<double>>(j, "log_c", {});
  } else {
    c.log_c = linspace(get_or(j, "log_c_min", -4.0), get_or(j, "log_c_max", 4.0), get_or<std::size_t>(j, "grid_points", 8));
  }
  c.p_bootstrap = get_or(j, "p_bootstrap", c.p_bootstrap);
  c.validate();
  return c;
}

std::vector<RegressionRow> run_regression_experiment(const RegressionExperimentConfig& cfg, const RunSettings& run) {
  cfg.validate();
  const auto sim = simulate_regression_data(cfg.n, cfg.p, derive_seed(run.seed, {kDataStream}));
  const RegressionData data = sim.data();
  const RegressionPopulation population(sim.theta_true);
  const auto d = blr_mse_discrepancy();
  const auto g = DistanceKind::absolute;
  const auto methods = regression_methods(cfg.p_bootstrap);
  const std::vector<SplitScheme> schemes{SplitScheme::cross_validation(), SplitScheme::bootstrap_oob(),
                                         SplitScheme::double_bootstrap(), SplitScheme::p_bootstrap(cfg.p_bootstrap)};

  std::vector<RegressionRow> rows;
  for (std::size_t i = 0; i < cfg.log_c.size(); ++i) {
    const double log_c = cfg.log_c[i];
    const BayesianLinearRegression model(static_cast<Eigen::Index>(cfg.p), std::exp(log_c));
    CheckConfig check;
    check.replications = run.replications;
    check.threads = run.threads;
    for (std::size_t k = 0; k < methods.size(); ++k) {
      check.seed = derive_seed(run.seed, {kCheckStream, i, k});
      CheckResult r;
      if (k == 0) {
        r = run_ppc(model, data, d, g, check);
      } else if (k == 1) {
        r = run_popc_ideal(model, data, population, d, g, check);
      } else {
        r = run_popc_estimated(model, data, schemes[k - 2], d, g, check);
      }
      rows.push_back({log_c, methods[k], r.estimate, r.std_error});
    }
  }
  return rows;
}

void write_regression_csv(const std::filesystem::path& path, const std::vector<RegressionRow>& rows) {
  CsvWriter csv(path, {"log_c", "method", "value", "se"});
  for (const auto& r : rows) csv.row({format_double(r.log_c), r.method, format_double(r.value), format_double(r.se)});
  csv.close();
}

}  // namespace popcheck
