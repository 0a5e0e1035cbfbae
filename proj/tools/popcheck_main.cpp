// popcheck <dp|regression|lda|custom> --config <path> --out <dir> --seed <u64>
//          --replications <R> [--threads <n>]

#include <filesystem>
#include <iostream>

#include "CLI11.hpp"

#include "popcheck/experiments.hpp"
#include "popcheck/io.hpp"

namespace fs = std::filesystem;
using namespace popcheck;

namespace {

struct Options {
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  std::size_t replications = 500;
  unsigned threads = 1;
  bool replications_given = false;
  bool seed_given = false;
  bool threads_given = false;
};

nlohmann::json load_config(const Options& opt) {
  if (opt.config.empty()) return nlohmann::json::object();
  return read_json_file(opt.config);
}

RunSettings settings(const Options& opt) {
  return {opt.seed, opt.replications, opt.threads};
}

int cmd_dp(const Options& opt) {
  const auto cfg = DpExperimentConfig::from_json(load_config(opt));
  write_dp_csv(fs::path(opt.out) / "dp.csv", run_dp_experiment(cfg, settings(opt)));
  return 0;
}

int cmd_regression(const Options& opt) {
  const auto cfg = RegressionExperimentConfig::from_json(load_config(opt));
  write_regression_csv(fs::path(opt.out) / "regression.csv", run_regression_experiment(cfg, settings(opt)));
  return 0;
}

int cmd_lda(const Options& opt) {
  const auto cfg = LdaExperimentConfig::from_json(load_config(opt));
  write_lda_csv(fs::path(opt.out) / "lda.csv", run_lda_experiment(cfg, settings(opt)));
  return 0;
}

int cmd_custom(const Options& opt) {
  if (opt.config.empty()) throw ConfigError("custom requires --config");
  auto config = load_config(opt);
  RunSettings run = settings(opt);
  // Flags win over the config file; the file wins over flag defaults.
  try {
    if (!opt.replications_given && config.contains("replications")) run.replications = config.at("replications").get<std::size_t>();
    if (!opt.seed_given && config.contains("seed")) run.seed = config.at("seed").get<std::uint64_t>();
    if (!opt.threads_given && config.contains("threads")) run.threads = config.at("threads").get<unsigned>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  const auto result = run_custom(config, run);
  write_text_file(fs::path(opt.out) / "result.json", result_to_json(result).dump(2) + "\n");
  write_trace_csv(fs::path(opt.out) / "trace.csv", result);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Population and posterior predictive checks"};
  app.require_subcommand(1, 1);
  Options opt;

  auto add_common = [&](CLI::App* sub, bool config_required) {
    auto* c = sub->add_option("--config", opt.config, "JSON configuration file");
    if (config_required) c->required();
    c->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "Output directory")->required();
    sub->add_option("--seed", opt.seed, "Master seed");
    sub->add_option("--replications", opt.replications, "Monte Carlo replications per check");
    sub->add_option("--threads", opt.threads, "Worker threads (0 = all cores)");
  };

  auto* dp = app.add_subcommand("dp", "Dirichlet process sweep over alpha");
  auto* reg = app.add_subcommand("regression", "Linear regression sweep over the prior variance");
  auto* lda = app.add_subcommand("lda", "LDA deviance ratio over the number of topics");
  auto* custom = app.add_subcommand("custom", "Single check described by a config file");
  add_common(dp, false);
  add_common(reg, false);
  add_common(lda, false);
  add_common(custom, true);

  CLI11_PARSE(app, argc, argv);
  for (auto* sub : app.get_subcommands()) {
    opt.replications_given = sub->count("--replications") > 0;
    opt.seed_given = sub->count("--seed") > 0;
    opt.threads_given = sub->count("--threads") > 0;
  }

  try {
    if (opt.replications_given && opt.replications == 0) throw ConfigError("--replications must be >= 1");
    fs::create_directories(opt.out);
    if (dp->parsed()) return cmd_dp(opt);
    if (reg->parsed()) return cmd_regression(opt);
    if (lda->parsed()) return cmd_lda(opt);
    return cmd_custom(opt);
  } catch (const std::exception& e) {
    std::cerr << "popcheck: " << e.what() << "\n";
    return 1;
  }
}
