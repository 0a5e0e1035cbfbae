#include <cmath>

#include "json_util.hpp"
#include "popcheck/discrepancy.hpp"
#include "popcheck/io.hpp"
#include "popcheck/models/dirichlet_process.hpp"
#include "popcheck/models/linear_regression.hpp"

namespace popcheck {

namespace {

using detail::get_or;

enum : std::uint64_t { kDataStream = 0 };

const nlohmann::json& section(const nlohmann::json& config, const std::string& key) {
  static const nlohmann::json empty = nlohmann::json::object();
  return config.contains(key) ? config.at(key) : empty;
}

std::string pick(const nlohmann::json& config, const std::string& key, const std::vector<std::string>& valid,
                 std::optional<std::string> fallback = std::nullopt) {
  if (!config.contains(key)) {
    if (fallback) return *fallback;
    throw ConfigError("config field '" + key + "' is required (valid: " + detail::join(valid) + ")");
  }
  const auto name = get_or<std::string>(config, key, {});
  if (std::find(valid.begin(), valid.end(), name) == valid.end()) {
    throw ConfigError("unknown " + key + " '" + name + "' (valid: " + detail::join(valid) + ")");
  }
  return name;
}

SplitScheme parse_scheme(const nlohmann::json& config) {
  if (!config.contains("scheme")) throw ConfigError("check 'popc_estimated' requires a 'scheme' object");
  const auto& s = config.at("scheme");
  detail::require_keys(s, "scheme", {"kind", "m", "p", "oob_fresh_size"});
  const auto kind = pick(s, "kind", {"cv", "oob", "double_bootstrap", "p_bootstrap"});
  SplitScheme scheme;
  switch (split_kind_from_string(kind)) {
    case SplitKind::cross_validation:
      scheme = SplitScheme::cross_validation();
      if (s.contains("m")) scheme.m = get_or<std::size_t>(s, "m", 0);
      break;
    case SplitKind::bootstrap_oob:
      scheme = SplitScheme::bootstrap_oob();
      if (s.contains("oob_fresh_size")) scheme.oob_fresh_size = get_or<std::size_t>(s, "oob_fresh_size", 0);
      break;
    case SplitKind::double_bootstrap:
      scheme = SplitScheme::double_bootstrap();
      break;
    case SplitKind::p_bootstrap:
      scheme = SplitScheme::p_bootstrap(get_or(s, "p", 0.632));
      break;
  }
  return scheme;
}

struct Common {
  std::string check;
  DistanceKind g;
  CheckConfig cfg;
};

template <class M, class Population>
CheckResult dispatch(const M& model, const Dataset<typename M::observation_type>& y, const ModelDiscrepancy<M>& d,
                     const Population& population, const Common& c, const nlohmann::json& config) {
  if (c.check == "ppc") return run_ppc(model, y, d, c.g, c.cfg);
  if (c.check == "prior_pc") return run_prior_pc(model, y, d, c.g, c.cfg);
  if (c.check == "popc_ideal") {
    if (!population) throw ConfigError("check 'popc_ideal' needs a population (simulated data only)");
    return run_popc_ideal(model, y, *population, d, c.g, c.cfg);
  }
  return run_popc_estimated(model, y, parse_scheme(config), d, c.g, c.cfg);
}

CheckResult run_dp(const nlohmann::json& config, const Common& c, const RunSettings& run) {
  const auto& params = section(config, "params");
  detail::require_keys(params, "params", {"alpha", "base_mean", "base_variance", "bandwidth"});
  const NormalDensity base{get_or(params, "base_mean", 5.0), get_or(params, "base_variance", 2.0)};
  std::optional<double> bw;
  if (params.contains("bandwidth")) bw = get_or(params, "bandwidth", 0.0);
  const DirichletProcessModel model(get_or(params, "alpha", 1.0), base, bw);

  const auto& pop = section(config, "population");
  detail::require_keys(pop, "population", {"mean", "variance"});
  const NormalDensity population{get_or(pop, "mean", 5.0), get_or(pop, "variance", 2.0)};
  if (!(population.variance > 0.0)) throw ConfigError("population variance must be positive");

  const auto& data = section(config, "data");
  detail::require_keys(data, "data", {"values", "n"});
  ScalarData y;
  if (data.contains("values")) {
    y.observations = get_or<std::vector<double>>(data, "values", {});
  } else {
    Rng rng = Rng::substream(run.seed, {kDataStream});
    const auto n = get_or<std::size_t>(data, "n", 10);
    for (std::size_t i = 0; i < n; ++i) y.observations.push_back(population.sample(rng));
  }

  const auto d_name = pick(config, "discrepancy", custom_discrepancy_names("dp"));
  const auto d = d_name == "mean" ? Discrepancy<double, DirichletProcessModel::latent_type>::simple(mean_d, "mean")
                                  : dp_log_predictive_discrepancy();
  std::optional<std::function<ScalarData(std::size_t, Rng&)>> sampler;
  if (!data.contains("values") || config.contains("population")) {
    sampler = [population](std::size_t size, Rng& rng) {
      ScalarData out;
      for (std::size_t i = 0; i < size; ++i) out.observations.push_back(population.sample(rng));
      return out;
    };
  }
  return dispatch(model, y, d, sampler, c, config);
}

CheckResult run_regression(const nlohmann::json& config, const Common& c, const RunSettings& run) {
  const auto& data = section(config, "data");
  detail::require_keys(data, "data", {"path", "n", "p"});
  RegressionData y;
  std::optional<RegressionPopulation> population;
  if (data.contains("path")) {
    y = read_regression_csv(get_or<std::string>(data, "path", {}));
    if (y.empty()) throw ConfigError("regression data file has no rows");
  } else {
    const auto sim = simulate_regression_data(get_or<std::size_t>(data, "n", 50), get_or<std::size_t>(data, "p", 100),
                                              derive_seed(run.seed, {kDataStream}));
    y = sim.data();
    population.emplace(sim.theta_true);
  }
  const auto& params = section(config, "params");
  detail::require_keys(params, "params", {"prior_variance"});
  const auto dim = static_cast<Eigen::Index>(y[0].covariates.size());
  const BayesianLinearRegression model(dim, get_or(params, "prior_variance", 1.0));
  pick(config, "discrepancy", custom_discrepancy_names("linear_regression"));
  return dispatch(model, y, blr_mse_discrepancy(), population, c, config);
}

}  // namespace

std::vector<std::string> custom_model_names() { return {"dp", "linear_regression"}; }

std::vector<std::string> custom_check_names() { return {"ppc", "prior_pc", "popc_ideal", "popc_estimated"}; }

std::vector<std::string> custom_discrepancy_names(const std::string& model) {
  if (model == "dp") return {"mean", "log_predictive"};
  return {"mse"};
}

CheckResult run_custom(const nlohmann::json& config, const RunSettings& run) {
  detail::require_keys(config, "custom config",
                       {"model", "check", "discrepancy", "distance", "replications", "seed", "rep_size", "threads",
                        "params", "data", "population", "scheme"});
  const auto model = pick(config, "model", custom_model_names());
  Common c;
  c.check = pick(config, "check", custom_check_names());
  const auto distance = pick(config, "distance", {"indicator", "absolute"}, "indicator");
  c.g = distance_from_string(distance);
  c.cfg.replications = run.replications;
  c.cfg.seed = run.seed;
  c.cfg.threads = run.threads;
  if (config.contains("rep_size")) c.cfg.rep_size = get_or<std::size_t>(config, "rep_size", 0);
  try {
    c.cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return model == "dp" ? run_dp(config, c, run) : run_regression(config, c, run);
}

}  // namespace popcheck
