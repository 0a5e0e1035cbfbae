// acceptance <1-7|all> [--cli <path to popcheck>] [--work <dir>]
//
// Prints one line per clause and a final PASS/FAIL line per criterion.
// Exit status is nonzero when any requested criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "popcheck/check.hpp"
#include "popcheck/discrepancy.hpp"
#include "popcheck/experiments.hpp"
#include "popcheck/io.hpp"
#include "popcheck/models/lda.hpp"
#include "popcheck/models/linear_regression.hpp"
#include "popcheck/resampling.hpp"

using namespace popcheck;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances and settings.
constexpr std::uint64_t kSeed = 1;

constexpr std::size_t kDpReplications = 10000;
constexpr double kDpPopcLowMax = 0.05;
constexpr double kDpPopcHighLo = 0.35;
constexpr double kDpPopcHighHi = 0.65;
constexpr double kDpPpcLowMin = 0.15;
constexpr double kDpBumpLo = 1.0;
constexpr double kDpBumpHi = 100.0;
constexpr double kDpBumpSe = 3.0;
constexpr double kDpSeconds = 60.0;

constexpr std::size_t kRegReplications = 500;
constexpr double kRegPpcSpearmanMax = -0.8;
constexpr double kRegIdealSpearmanMin = 0.8;
constexpr std::size_t kRegOverestimateMin = 6;
constexpr double kRegSeconds = 120.0;

constexpr std::size_t kLdaReplications = 200;
constexpr double kLdaGrowthMin = 2.0;
constexpr double kLdaSeconds = 180.0;

constexpr std::size_t kResampleN = 100;
constexpr std::size_t kResampleTrials = 10000;
constexpr double kOobTolerance = 0.01;
constexpr double kCvTolerance = 0.01;

constexpr std::size_t kNullReplications = 10000;
constexpr double kSeMultiple = 3.0;

constexpr double kQuadratureSupError = 1e-3;
constexpr double kImiExact = 1e-12;

struct Report {
  bool ok = true;
  void clause(bool pass, const std::string& text) {
    std::cout << "  [" << (pass ? "pass" : "FAIL") << "] " << text << "\n";
    ok = ok && pass;
  }
};

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    for (std::size_t k = i; k <= j; ++k) r[order[k]] = 0.5 * static_cast<double>(i + j) + 1.0;
    i = j + 1;
  }
  return r;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  const auto rx = ranks(x), ry = ranks(y);
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / rx.size();
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / ry.size();
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// ---------------------------------------------------------------------------

bool criterion_dp() {
  Report rep;
  const auto t0 = std::chrono::steady_clock::now();
  const DpExperimentConfig cfg;
  const auto rows = run_dp_experiment(cfg, {kSeed, kDpReplications, 1});
  const double secs = seconds_since(t0);
  const auto& lo = rows.front();
  const auto& hi = rows.back();
  rep.clause(lo.popc_pvalue < kDpPopcLowMax,
             "PoPC at alpha=e^-3 is " + fmt(lo.popc_pvalue) + " (< " + fmt(kDpPopcLowMax) + ")");
  rep.clause(hi.popc_pvalue >= kDpPopcHighLo && hi.popc_pvalue <= kDpPopcHighHi,
             "PoPC at alpha=e^6 is " + fmt(hi.popc_pvalue) + " (in [" + fmt(kDpPopcHighLo) + ", " + fmt(kDpPopcHighHi) + "])");
  rep.clause(lo.ppc_pvalue > kDpPpcLowMin, "PPC at alpha=e^-3 is " + fmt(lo.ppc_pvalue) + " (> " + fmt(kDpPpcLowMin) + ")");

  // Local minimum inside [1, 100]: the smallest PPC value over that window
  // lies below both curve endpoints by more than kDpBumpSe combined se.
  std::size_t best = rows.size();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].alpha < kDpBumpLo || rows[i].alpha > kDpBumpHi) continue;
    if (best == rows.size() || rows[i].ppc_pvalue < rows[best].ppc_pvalue) best = i;
  }
  bool bump = best < rows.size();
  std::string detail = "no grid point in [1, 100]";
  if (bump) {
    const auto& b = rows[best];
    auto below = [&](const DpRow& end) {
      return end.ppc_pvalue - b.ppc_pvalue > kDpBumpSe * std::hypot(end.ppc_se, b.ppc_se);
    };
    bump = below(lo) && below(hi);
    detail = "PPC minimum over [1, 100] is " + fmt(b.ppc_pvalue) + " at alpha=" + fmt(b.alpha) + "; endpoints " +
             fmt(lo.ppc_pvalue) + ", " + fmt(hi.ppc_pvalue);
  }
  rep.clause(bump, detail);
  rep.clause(secs < kDpSeconds, "runtime " + fmt(secs) + " s (< " + fmt(kDpSeconds) + ")");
  return rep.ok;
}

bool criterion_regression() {
  Report rep;
  const auto t0 = std::chrono::steady_clock::now();
  const RegressionExperimentConfig cfg;
  const auto rows = run_regression_experiment(cfg, {kSeed, kRegReplications, 1});
  const double secs = seconds_since(t0);

  std::map<std::string, std::vector<double>> curve;
  for (const auto& r : rows) curve[r.method].push_back(r.value);
  const auto methods = regression_methods(cfg.p_bootstrap);
  const std::string ppc = methods[0], ideal = methods[1], cv = methods[2], oob = methods[3], dbl = methods[4],
                    pb = methods[5];

  const double s_ppc = spearman(cfg.log_c, curve[ppc]);
  const double s_ideal = spearman(cfg.log_c, curve[ideal]);
  rep.clause(s_ppc <= kRegPpcSpearmanMax, "Spearman(PPC, log c) = " + fmt(s_ppc) + " (<= " + fmt(kRegPpcSpearmanMax) + ")");
  rep.clause(s_ideal >= kRegIdealSpearmanMin,
             "Spearman(ideal PoPC, log c) = " + fmt(s_ideal) + " (>= " + fmt(kRegIdealSpearmanMin) + ")");
  for (const auto& m : {oob, dbl, pb}) {
    const double s = spearman(cfg.log_c, curve[m]);
    rep.clause(s * s_ideal > 0.0, "trend sign of " + m + " (" + fmt(s) + ") matches ideal");
  }

  auto mad = [&](const std::string& m) {
    double s = 0.0;
    for (std::size_t i = 0; i < cfg.log_c.size(); ++i) s += std::abs(curve[m][i] - curve[ideal][i]);
    return s / static_cast<double>(cfg.log_c.size());
  };
  std::string closest;
  std::ostringstream mads;
  for (const auto& m : {cv, oob, dbl, pb}) {
    mads << " " << m << "=" << fmt(mad(m));
    if (closest.empty() || mad(m) < mad(closest)) closest = m;
  }
  rep.clause(closest == pb, "smallest MAD from ideal:" + mads.str());

  for (const auto& m : {cv, oob}) {
    std::size_t above = 0;
    for (std::size_t i = 0; i < cfg.log_c.size(); ++i) above += curve[m][i] >= curve[ideal][i];
    rep.clause(above >= kRegOverestimateMin, m + " >= ideal on " + std::to_string(above) + " of " +
                                                 std::to_string(cfg.log_c.size()) + " points");
  }
  rep.clause(secs < kRegSeconds, "runtime " + fmt(secs) + " s (< " + fmt(kRegSeconds) + ")");
  return rep.ok;
}

bool criterion_lda() {
  Report rep;
  const auto t0 = std::chrono::steady_clock::now();
  const LdaExperimentConfig cfg;
  const auto rows = run_lda_experiment(cfg, {kSeed, kLdaReplications, 1});
  const double secs = seconds_since(t0);
  double r5 = NAN, r50 = NAN;
  std::ostringstream all;
  for (const auto& r : rows) {
    all << " K=" << r.topics << ":" << fmt(r.ratio);
    if (r.topics == 5) r5 = r.ratio;
    if (r.topics == 50) r50 = r.ratio;
  }
  std::cout << "  ratios" << all.str() << "\n";
  rep.clause(r50 >= kLdaGrowthMin * r5, "ratio(K=50) / ratio(K=5) = " + fmt(r50 / r5) + " (>= " + fmt(kLdaGrowthMin) + ")");
  rep.clause(r50 > 1.0, "ratio(K=50) = " + fmt(r50) + " (> 1)");
  rep.clause(secs < kLdaSeconds, "runtime " + fmt(secs) + " s (< " + fmt(kLdaSeconds) + ")");
  return rep.ok;
}

bool criterion_resampling() {
  Report rep;
  const std::size_t n = kResampleN;
  Rng rng(kSeed);
  double oob = 0.0;
  for (std::size_t t = 0; t < kResampleTrials; ++t) {
    const auto s = oob_split_indices(n, rng);
    oob += s ? static_cast<double>(s->fresh.size()) / n / kResampleTrials : 0.0;
  }
  const double expected = std::pow(1.0 - 1.0 / n, static_cast<double>(n));
  rep.clause(std::abs(oob - expected) <= kOobTolerance, "oob fraction " + fmt(oob) + " vs " + fmt(expected));

  std::map<std::vector<std::size_t>, double> freq;
  for (std::size_t t = 0; t < kResampleTrials; ++t) {
    auto s = cv_split_indices(5, 2, rng);
    std::sort(s.obs.begin(), s.obs.end());
    freq[s.obs] += 1.0 / kResampleTrials;
  }
  double worst = 0.0;
  for (const auto& [k, f] : freq) worst = std::max(worst, std::abs(f - 0.1));
  rep.clause(freq.size() == 10 && worst <= kCvTolerance,
             std::to_string(freq.size()) + " cv subsets, max |freq - 0.1| = " + fmt(worst));

  bool p0 = true, p1 = true;
  for (std::size_t t = 0; t < kResampleTrials; ++t) {
    const auto a = p_bootstrap_indices(n, 0.0, rng);
    if (a) {
      const std::set<std::size_t> in(a->obs.begin(), a->obs.end());
      for (auto i : a->fresh) p0 = p0 && in.count(i) == 1;
    } else {
      p0 = false;
    }
    const auto b = p_bootstrap_indices(n, 1.0, rng);
    if (b) {
      const std::set<std::size_t> in(b->obs.begin(), b->obs.end());
      for (auto i : b->fresh) p1 = p1 && in.count(i) == 0;
    }
  }
  rep.clause(p0, "p=0: y_new drawn from the bootstrap sample on every trial");
  rep.clause(p1, "p=1: y_new drawn from out-of-bag points on every trial");
  return rep.ok;
}

/// Predictive and population are both N(0, 1).
struct StandardNormal {
  using observation_type = double;
  using latent_type = LatentState<double>;
  latent_type posterior_sample(const ScalarData&, Rng&) const { return {}; }
  ScalarData predictive_sample(const latent_type&, const ScalarData&, std::size_t n, Rng& rng) const {
    ScalarData out;
    for (std::size_t i = 0; i < n; ++i) out.observations.push_back(rng.normal());
    return out;
  }
};

bool criterion_null() {
  Report rep;
  const StandardNormal model;
  ScalarData y;
  Rng rng(kSeed);
  for (int i = 0; i < 20; ++i) y.observations.push_back(rng.normal());
  CheckConfig cfg;
  cfg.replications = kNullReplications;
  cfg.seed = kSeed;
  const auto res = run_popc_ideal(
      model, y, [&](std::size_t n, Rng& r) { return model.predictive_sample({}, y, n, r); },
      ModelDiscrepancy<StandardNormal>::simple(mean_d, "mean"), DistanceKind::indicator, cfg);
  rep.clause(std::abs(res.estimate - 0.5) < kSeMultiple * res.std_error,
             "estimate " + fmt(res.estimate) + ", se " + fmt(res.std_error));
  return rep.ok;
}

/// theta uniform on {0, 1}; y_i ~ Bernoulli(q_theta).
struct CoinModel {
  using observation_type = double;
  using latent_type = LatentState<int>;
  double q[2] = {0.2, 0.7};
  latent_type posterior_sample(const ScalarData&, Rng& rng) const { return {rng.bernoulli(0.5) ? 1 : 0, {}}; }
  ScalarData predictive_sample(const latent_type& t, const ScalarData&, std::size_t n, Rng& rng) const {
    ScalarData out;
    for (std::size_t i = 0; i < n; ++i) out.observations.push_back(rng.bernoulli(q[t.global]) ? 1.0 : 0.0);
    return out;
  }
};

bool criterion_oracles() {
  Report rep;
  {
    // (a) 1-D regression posterior against a normalized grid.
    Rng rng(kSeed);
    const int N = 15;
    Eigen::MatrixXd X(N, 1);
    Eigen::VectorXd y(N);
    for (int i = 0; i < N; ++i) {
      X(i, 0) = rng.uniform(-1.0, 2.0);
      y(i) = 0.8 * X(i, 0) + rng.normal();
    }
    const double c = 1.7;
    const auto post = blr_posterior(X, y, c);
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
    for (int s = 0; s <= steps; ++s) {
      Eigen::VectorXd t(1);
      t << lo + s * dx;
      sup = std::max(sup, std::abs(std::exp(post.log_density(t)) - std::exp(logp[s] - top) / z));
    }
    rep.clause(sup < kQuadratureSupError, "(a) regression posterior sup error " + fmt(sup));
  }
  {
    // (b) PPC with d = number of ones in 3 draws and y_obs holding a single
    // one; the exact value averages P(count > 1 | theta) over theta.
    const CoinModel model;
    ScalarData y;
    y.observations = {1.0, 0.0, 0.0};
    CheckConfig cfg;
    cfg.replications = kNullReplications;
    cfg.seed = kSeed;
    const auto d = ModelDiscrepancy<CoinModel>::simple([](const ScalarData& s) {
      return std::accumulate(s.observations.begin(), s.observations.end(), 0.0);
    });
    const auto res = run_ppc(model, y, d, DistanceKind::indicator, cfg);
    double exact = 0.0;
    for (double q : model.q) {
      exact += 0.5 * (3 * q * q * (1 - q) + q * q * q);
    }
    rep.clause(std::abs(res.estimate - exact) < kSeMultiple * res.std_error,
               "(b) enumeration " + fmt(exact) + ", estimate " + fmt(res.estimate) + " se " + fmt(res.std_error));
  }
  {
    // (c) IMI from raw entropies over explicit conditional tables.
    Rng rng(kSeed);
    const std::size_t K = 3, V = 6, D = 5;
    Corpus corpus;
    std::vector<int> labels;
    for (int i = 0; i < 400; ++i) {
      corpus.observations.push_back({static_cast<std::int32_t>(rng.index(D)), static_cast<std::int32_t>(rng.index(V))});
      labels.push_back(static_cast<int>(rng.index(K)));
    }
    const auto imi = imi_d(corpus, labels, K, V);
    auto H = [](const std::map<int, double>& counts) {
      double n = 0.0, h = 0.0;
      for (const auto& [k, c] : counts) n += c;
      for (const auto& [k, c] : counts) h -= c / n * std::log(c / n);
      return h;
    };
    double worst = 0.0;
    bool nan_ok = true;
    for (std::size_t k = 0; k < K; ++k) {
      std::map<int, double> dk;
      for (std::size_t i = 0; i < corpus.size(); ++i)
        if (labels[i] == static_cast<int>(k)) dk[corpus[i].doc] += 1.0;
      for (std::size_t w = 0; w < V; ++w) {
        std::map<int, double> dkw;
        for (std::size_t i = 0; i < corpus.size(); ++i)
          if (labels[i] == static_cast<int>(k) && corpus[i].word == static_cast<int>(w)) dkw[corpus[i].doc] += 1.0;
        if (dkw.empty()) {
          nan_ok = nan_ok && !imi.defined(k, w);
          continue;
        }
        worst = std::max(worst, std::abs(imi.at(k, w) - (H(dk) - H(dkw))));
      }
    }
    rep.clause(worst <= kImiExact && nan_ok, "(c) IMI max error " + fmt(worst));
  }
  {
    // (d) Local posterior labels on 3 tokens and 2 topics against the 8
    // enumerated configurations.
    Eigen::MatrixXd topics(2, 3);
    topics << 0.6, 0.3, 0.1,  //
        0.1, 0.3, 0.6;
    const double alpha = 0.5;
    Corpus doc;
    doc.observations = {{0, 0}, {0, 1}, {0, 2}};
    std::vector<double> post(8);
    double total = 0.0;
    for (int cfg = 0; cfg < 8; ++cfg) {
      double w = 1.0;
      int n0 = 0;
      for (int i = 0; i < 3; ++i) {
        const int k = (cfg >> i) & 1;
        w *= topics(k, doc[static_cast<std::size_t>(i)].word);
        n0 += k == 0;
      }
      w *= std::exp(std::lgamma(n0 + alpha) + std::lgamma(3 - n0 + alpha) - 2.0 * std::lgamma(alpha));
      post[static_cast<std::size_t>(cfg)] = w;
      total += w;
    }
    const std::size_t runs = kNullReplications;
    std::vector<double> freq(8, 0.0);
    for (std::size_t r = 0; r < runs; ++r) {
      Rng rng = Rng::substream(kSeed, {r});
      const auto z = lda_local_posterior(doc, topics, alpha, 10, rng);
      int cfg = 0;
      for (int i = 0; i < 3; ++i) cfg |= z.assignments[static_cast<std::size_t>(i)] << i;
      freq[static_cast<std::size_t>(cfg)] += 1.0 / runs;
    }
    bool ok = true;
    double worst = 0.0;
    for (int cfg = 0; cfg < 8; ++cfg) {
      const double p = post[static_cast<std::size_t>(cfg)] / total;
      const double se = std::sqrt(p * (1 - p) / runs);
      worst = std::max(worst, std::abs(freq[static_cast<std::size_t>(cfg)] - p) / se);
      ok = ok && std::abs(freq[static_cast<std::size_t>(cfg)] - p) < kSeMultiple * se;
    }
    rep.clause(ok, "(d) local posterior: max deviation " + fmt(worst) + " se over 8 configurations");
  }
  return rep.ok;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool criterion_determinism(const std::string& cli, const fs::path& work) {
  Report rep;
  if (cli.empty()) {
    rep.clause(false, "no --cli path given");
    return false;
  }
  fs::create_directories(work);
  const std::map<std::string, std::string> configs{
      {"dp", R"({"grid_points": 6, "n": 10})"},
      {"regression", R"({"n": 20, "p": 10, "log_c": [-2, 0, 2]})"},
      {"lda", R"({"topics": [2, 4], "docs": 40, "vocab": 30, "true_topics": 3, "doc_length": 20,
                  "heldout_docs": 10, "fit_sweeps": 20, "local_sweeps": 5})"},
      {"custom", R"({"model": "linear_regression", "check": "popc_estimated", "discrepancy": "mse",
                     "data": {"n": 30, "p": 5}, "scheme": {"kind": "p_bootstrap", "p": 0.632}})"},
  };
  const std::map<std::string, std::vector<std::string>> outputs{
      {"dp", {"dp.csv"}}, {"regression", {"regression.csv"}}, {"lda", {"lda.csv"}}, {"custom", {"result.json", "trace.csv"}}};
  for (const auto& [cmd, json] : configs) {
    const fs::path cfg = work / (cmd + ".json");
    std::ofstream(cfg, std::ios::binary) << json;
    std::vector<std::string> results;
    bool ran = true;
    for (const char* threads : {"1", "1", "3"}) {
      const fs::path out = work / (cmd + "_t" + threads + "_" + std::to_string(results.size()));
      fs::remove_all(out);
      const std::string line = "\"" + cli + "\" " + cmd + " --config \"" + cfg.string() + "\" --out \"" + out.string() +
                               "\" --seed 7 --replications 40 --threads " + threads;
      ran = ran && std::system(line.c_str()) == 0;
      std::string bytes;
      for (const auto& f : outputs.at(cmd)) bytes += slurp(out / f) + '\x1f';
      results.push_back(bytes);
    }
    const bool same = ran && results[0].size() > outputs.at(cmd).size() && results[0] == results[1] && results[0] == results[2];
    rep.clause(same, cmd + ": identical bytes over two 1-thread runs and a 3-thread run");
  }
  return rep.ok;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string which = "all", cli;
  fs::path work = fs::temp_directory_path() / "popcheck_acceptance";
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--cli" && i + 1 < args.size()) {
      cli = args[++i];
    } else if (args[i] == "--work" && i + 1 < args.size()) {
      work = args[++i];
    } else {
      which = args[i];
    }
  }
  const std::vector<std::pair<std::string, std::function<bool()>>> criteria{
      {"dp alpha sweep", criterion_dp},
      {"regression prior-variance sweep", criterion_regression},
      {"lda deviance ratio", criterion_lda},
      {"resampler statistics", criterion_resampling},
      {"null calibration", criterion_null},
      {"oracle equivalence", criterion_oracles},
      {"cli determinism", [&] { return criterion_determinism(cli, work); }},
  };
  bool all_ok = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (which != "all" && which != std::to_string(i + 1)) continue;
    std::cout << "criterion " << i + 1 << " (" << criteria[i].first << ")\n";
    bool ok = false;
    try {
      ok = criteria[i].second();
    } catch (const std::exception& e) {
      std::cout << "  error: " << e.what() << "\n";
    }
    std::cout << "criterion " << i + 1 << ": " << (ok ? "PASS" : "FAIL") << "\n";
    all_ok = all_ok && ok;
  }
  return all_ok ? 0 : 1;
}
