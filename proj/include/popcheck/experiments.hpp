#pragma once

// Experiment drivers behind the popcheck command line.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "popcheck/check.hpp"
#include "popcheck/models/dirichlet_process.hpp"

namespace popcheck {

struct RunSettings {
  std::uint64_t seed = 0;
  std::size_t replications = 500;
  unsigned threads = 1;
};

/// Thrown for configuration problems; the CLI reports them and exits nonzero.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// `count` points evenly spaced in log space over [exp(lo), exp(hi)].
std::vector<double> log_spaced(double lo, double hi, std::size_t count);
std::vector<double> linspace(double lo, double hi, std::size_t count);

// ---------------------------------------------------------------------------
// Dirichlet process sweep over alpha

struct DpExperimentConfig {
  std::vector<double> alphas = log_spaced(-3.0, 6.0, 40);
  std::size_t n = 10;
  NormalDensity base{5.0, 2.0};
  NormalDensity population{5.0, 2.0};
  std::optional<double> bandwidth;

  void validate() const;
  static DpExperimentConfig from_json(const nlohmann::json& j);
};

struct DpRow {
  double alpha = 0.0;
  double log_alpha = 0.0;
  double ppc_pvalue = 0.0;
  double ppc_se = 0.0;
  double popc_pvalue = 0.0;
  double popc_se = 0.0;
};

std::vector<DpRow> run_dp_experiment(const DpExperimentConfig& cfg, const RunSettings& run);
void write_dp_csv(const std::filesystem::path& path, const std::vector<DpRow>& rows);

// ---------------------------------------------------------------------------
// Linear regression sweep over the prior variance c

struct RegressionExperimentConfig {
  std::size_t n = 50;
  std::size_t p = 100;
  std::vector<double> log_c = linspace(-4.0, 4.0, 8);
  double p_bootstrap = 0.632;

  void validate() const;
  static RegressionExperimentConfig from_json(const nlohmann::json& j);
};

struct RegressionRow {
  double log_c = 0.0;
  std::string method;
  double value = 0.0;
  double se = 0.0;
};

/// Method labels in output order.
std::vector<std::string> regression_methods(double p_bootstrap = 0.632);

std::vector<RegressionRow> run_regression_experiment(const RegressionExperimentConfig& cfg, const RunSettings& run);
void write_regression_csv(const std::filesystem::path& path, const std::vector<RegressionRow>& rows);

// ---------------------------------------------------------------------------
// LDA deviance ratio over the number of topics

struct LdaExperimentConfig {
  std::vector<std::size_t> topics{2, 5, 10, 25, 50};
  /// Synthetic corpus; ignored when `corpus` is set.
  std::size_t docs = 200;
  std::size_t vocab = 200;
  std::size_t true_topics = 5;
  std::size_t doc_length = 100;
  std::optional<std::filesystem::path> corpus;
  double eta = 0.1;
  double alpha = 0.1;
  /// Documents withheld from fitting and checked with half splits.
  std::size_t heldout_docs = 50;
  double split_fraction = 0.5;
  std::size_t fit_sweeps = 200;
  std::size_t local_sweeps = 20;

  void validate() const;
  static LdaExperimentConfig from_json(const nlohmann::json& j);
};

struct LdaRow {
  std::size_t topics = 0;
  double ppc_deviance = 0.0;
  double popc_deviance = 0.0;
  double ratio = 0.0;
  /// Smallest per-topic mean deviance of the population check.
  double per_topic_min_deviance = 0.0;
};

std::vector<LdaRow> run_lda_experiment(const LdaExperimentConfig& cfg, const RunSettings& run);
void write_lda_csv(const std::filesystem::path& path, const std::vector<LdaRow>& rows);

// ---------------------------------------------------------------------------
// User-configured single check

/// Valid names for the custom command's config fields.
std::vector<std::string> custom_model_names();
std::vector<std::string> custom_check_names();
std::vector<std::string> custom_discrepancy_names(const std::string& model);

/// Runs the check described by `config`. Replications, seed and threads come
/// from `run`; the caller merges them with any values in the config.
CheckResult run_custom(const nlohmann::json& config, const RunSettings& run);

/// result.json: the CheckResult (estimate, std_error, metadata, trace).
nlohmann::json result_to_json(const CheckResult& result);
CheckResult result_from_json(const nlohmann::json& j);
void write_trace_csv(const std::filesystem::path& path, const CheckResult& result);

/// Reads and parses a JSON document; parse errors carry the line and column.
nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace popcheck
