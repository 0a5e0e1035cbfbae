#include <cmath>

#include "json_util.hpp"
#include "popcheck/discrepancy.hpp"
#include "popcheck/io.hpp"

namespace popcheck {

namespace {

enum : std::uint64_t { kDataStream = 0, kCheckStream = 1 };
enum : std::uint64_t { kPpc = 0, kPopc = 1 };

}  // namespace

void DpExperimentConfig::validate() const {
  if (alphas.empty()) throw ConfigError("dp: alpha grid is empty");
  for (double a : alphas) {
    if (!(a > 0.0) || !std::isfinite(a)) throw ConfigError("dp: alpha values must be positive and finite");
  }
  if (n < 2) throw ConfigError("dp: n must be at least 2");
  if (!(base.variance > 0.0) || !(population.variance > 0.0)) throw ConfigError("dp: variances must be positive");
  if (bandwidth && !(*bandwidth > 0.0)) throw ConfigError("dp: bandwidth must be positive");
}

DpExperimentConfig DpExperimentConfig::from_json(const nlohmann::json& j) {
  using detail::get_or;
  detail::require_keys(j, "dp config",
                       {"alphas", "log_alpha_min", "log_alpha_max", "grid_points", "n", "base_mean", "base_variance",
                        "population_mean", "population_variance", "bandwidth"});
  DpExperimentConfig c;
  if (j.contains("alphas")) {
    c.alphas = get_or<std::vector<double>>(j, "alphas", {});
  } else {
    c.alphas = log_spaced(get_or(j, "log_alpha_min", -3.0), get_or(j, "log_alpha_max", 6.0),
                          get_or<std::size_t>(j, "grid_points", 40));
  }
  c.n = get_or(j, "n", c.n);
  c.base = {get_or(j, "base_mean", c.base.mean), get_or(j, "base_variance", c.base.variance)};
  c.population = {get_or(j, "population_mean", c.population.mean),
                  get_or(j, "population_variance", c.population.variance)};
  if (j.contains("bandwidth")) c.bandwidth = get_or(j, "bandwidth", 0.0);
  c.validate();
  return c;
}

std::vector<DpRow> run_dp_experiment(const DpExperimentConfig& cfg, const RunSettings& run) {
  cfg.validate();
  Rng data_rng = Rng::substream(run.seed, {kDataStream});
  ScalarData y_obs;
  for (std::size_t i = 0; i < cfg.n; ++i) y_obs.observations.push_back(cfg.population.sample(data_rng));

  const auto population = [&](std::size_t size, Rng& rng) {
    ScalarData out;
    out.observations.reserve(size);
    for (std::size_t i = 0; i < size; ++i) out.observations.push_back(cfg.population.sample(rng));
    return out;
  };
  const auto d = dp_log_predictive_discrepancy();

  std::vector<DpRow> rows;
  rows.reserve(cfg.alphas.size());
  for (std::size_t i = 0; i < cfg.alphas.size(); ++i) {
    const double alpha = cfg.alphas[i];
    const DirichletProcessModel model(alpha, cfg.base, cfg.bandwidth);
    CheckConfig check;
    check.replications = run.replications;
    check.threads = run.threads;

    check.seed = derive_seed(run.seed, {kCheckStream, i, kPpc});
    const auto ppc = run_ppc(model, y_obs, d, DistanceKind::indicator, check);
    check.seed = derive_seed(run.seed, {kCheckStream, i, kPopc});
    const auto popc = run_popc_ideal(model, y_obs, population, d, DistanceKind::indicator, check);

    rows.push_back({alpha, std::log(alpha), ppc.estimate, ppc.std_error, popc.estimate, popc.std_error});
  }
  return rows;
}

void write_dp_csv(const std::filesystem::path& path, const std::vector<DpRow>& rows) {
  CsvWriter csv(path, {"alpha", "log_alpha", "ppc_pvalue", "ppc_se", "popc_pvalue", "popc_se"});
  for (const auto& r : rows) {
    csv.row({format_double(r.alpha), format_double(r.log_alpha), format_double(r.ppc_pvalue), format_double(r.ppc_se),
             format_double(r.popc_pvalue), format_double(r.popc_se)});
  }
  csv.close();
}

}  // namespace popcheck
