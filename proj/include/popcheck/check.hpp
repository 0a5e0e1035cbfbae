#pragma once

// Predictive checks: prior, posterior (PPC), ideal population (PoPC) and
// resampling-estimated population checks. Every check is a Monte Carlo
// average of a distance g between two discrepancy values, one on replicated
// data and one on a reference data set.

#include <array>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "popcheck/dataset.hpp"
#include "popcheck/resampling.hpp"
#include "popcheck/rng.hpp"

namespace popcheck {

// ---------------------------------------------------------------------------
// Discrepancies and distances

/// Scalar or vector discrepancy value. Vector components may be NaN to mark
/// an undefined entry; such components are skipped by vector-deviance.
using DiscrepancyValue = std::variant<double, std::vector<double>>;

enum class DiscrepancyKind { simple, realized_global, realized_local };

/// Declared output shape of a discrepancy. `dim == 0` is scalar.
struct Arity {
  std::size_t dim = 0;
  static Arity scalar() { return {}; }
  static Arity vector(std::size_t d) { return {d}; }
  bool is_scalar() const noexcept { return dim == 0; }
};

enum class DistanceKind { indicator, absolute, vector_deviance };

std::string to_string(DistanceKind kind);
DistanceKind distance_from_string(const std::string& name);

/// g(a, b). indicator is 1{a > b} (ties give 0), absolute is |a - b|, and
/// vector-deviance is the mean of |a_i - b_i| over components defined in both.
double evaluate_distance(DistanceKind g, const DiscrepancyValue& a, const DiscrepancyValue& b);

/// Global latent plus optional per-group locals.
template <class Global, class Local = std::monostate>
struct LatentState {
  Global global{};
  std::map<GroupLabel, Local> locals;
};

/// A discrepancy d(y) or d(y, theta) over data of type Obs.
template <class Obs, class Latent>
class Discrepancy {
 public:
  using Evaluator = std::function<DiscrepancyValue(const Dataset<Obs>&, const Latent&)>;

  Discrepancy(DiscrepancyKind kind, Arity arity, Evaluator evaluator, std::string name = {})
      : kind_(kind), arity_(arity), evaluator_(std::move(evaluator)), name_(std::move(name)) {
    if (!evaluator_) throw std::invalid_argument("Discrepancy: empty evaluator");
  }

  /// Wraps a function of data alone.
  static Discrepancy simple(std::function<double(const Dataset<Obs>&)> fn, std::string name = {}) {
    return Discrepancy(
        DiscrepancyKind::simple, Arity::scalar(),
        [fn = std::move(fn)](const Dataset<Obs>& y, const Latent&) { return DiscrepancyValue{fn(y)}; },
        std::move(name));
  }

  /// Wraps a scalar function of data and the global latent.
  static Discrepancy realized(std::function<double(const Dataset<Obs>&, const Latent&)> fn,
                              std::string name = {}) {
    return Discrepancy(
        DiscrepancyKind::realized_global, Arity::scalar(),
        [fn = std::move(fn)](const Dataset<Obs>& y, const Latent& t) { return DiscrepancyValue{fn(y, t)}; },
        std::move(name));
  }

  DiscrepancyKind kind() const noexcept { return kind_; }
  Arity arity() const noexcept { return arity_; }
  const std::string& name() const noexcept { return name_; }
  bool realized() const noexcept { return kind_ != DiscrepancyKind::simple; }

  DiscrepancyValue operator()(const Dataset<Obs>& y, const Latent& latent) const {
    DiscrepancyValue v = evaluator_(y, latent);
    check_arity(v);
    return v;
  }

 private:
  void check_arity(const DiscrepancyValue& v) const {
    if (arity_.is_scalar()) {
      if (!std::holds_alternative<double>(v)) throw std::logic_error("Discrepancy: expected scalar output");
    } else {
      const auto* vec = std::get_if<std::vector<double>>(&v);
      if (vec == nullptr || vec->size() != arity_.dim) {
        throw std::logic_error("Discrepancy: output dimension does not match declared arity");
      }
    }
  }

  DiscrepancyKind kind_;
  Arity arity_;
  Evaluator evaluator_;
  std::string name_;
};

// ---------------------------------------------------------------------------
// Model contract

template <class M>
concept PredictiveModel = requires(const M& m, const Dataset<typename M::observation_type>& data,
                                   const typename M::latent_type& latent, std::size_t n, Rng& rng) {
  typename M::observation_type;
  typename M::latent_type;
  { m.posterior_sample(data, rng) } -> std::convertible_to<typename M::latent_type>;
  // `data` is a design template: conditional models take the covariates of
  // point i from data[i % data.size()]; unconditional models ignore it.
  { m.predictive_sample(latent, data, n, rng) } -> std::convertible_to<Dataset<typename M::observation_type>>;
};

template <class M>
concept PriorModel = PredictiveModel<M> && requires(const M& m, Rng& rng) {
  { m.prior_sample(rng) } -> std::convertible_to<typename M::latent_type>;
};

template <class M>
using ModelDiscrepancy = Discrepancy<typename M::observation_type, typename M::latent_type>;

// ---------------------------------------------------------------------------
// Configuration and results

struct CheckConfig {
  std::size_t replications = 500;
  std::uint64_t seed = 0;
  /// Size of each replicated data set; defaults to |y_obs|.
  std::optional<std::size_t> rep_size;
  /// Worker threads; 0 means hardware concurrency. Never affects results.
  unsigned threads = 1;

  void validate() const;
};

struct CheckMetadata {
  std::string check;
  std::size_t replications = 0;
  std::uint64_t seed = 0;
  std::size_t rep_size = 0;
  std::string scheme;
  std::string distance;
  /// Indicator evaluations with d_rep == d_ref, which contribute 0.
  std::size_t ties = 0;
  /// Estimated checks: replications whose split had to be redrawn.
  std::size_t split_retries = 0;
};

struct CheckResult {
  double estimate = 0.0;
  double std_error = 0.0;
  std::vector<double> per_rep_values;
  CheckMetadata metadata;
};

/// Fills estimate (mean) and std_error (sample sd / sqrt(R)) from the trace.
CheckResult make_result(std::vector<double> per_rep_values, CheckMetadata metadata);

struct Summary {
  double estimate = 0.0;
  double std_error = 0.0;
  double min = 0.0;
  double max = 0.0;
  static constexpr std::size_t bins = 20;
  /// bins + 1 equally spaced edges over [min, max].
  std::array<double, bins + 1> bin_edges{};
  std::array<std::size_t, bins> counts{};
};

Summary summarize(const CheckResult& result);

/// Raised when a replication fails; carries the replication index.
class CheckError : public std::runtime_error {
 public:
  CheckError(std::size_t replication, const std::string& what)
      : std::runtime_error("replication " + std::to_string(replication) + ": " + what),
        replication_(replication) {}
  std::size_t replication() const noexcept { return replication_; }

 private:
  std::size_t replication_;
};

/// One replication's contribution.
struct RepOutcome {
  double value = 0.0;
  bool tie = false;
  bool retried = false;
};

using ReplicationBody = std::function<RepOutcome(std::size_t replication, Rng& rng)>;

/// Evaluates `body` for r = 0..R-1, each with the stream keyed by (seed, r),
/// on up to `threads` workers. Outcomes are returned in replication order.
/// The first failing replication (lowest index) is rethrown as CheckError.
std::vector<RepOutcome> run_replications(std::size_t replications, std::uint64_t seed, unsigned threads,
                                         const ReplicationBody& body);

/// Runs the replications and reduces them into a CheckResult.
CheckResult run_check(const CheckConfig& cfg, CheckMetadata metadata, const ReplicationBody& body);

/// Maximum number of redraws of an estimated-check split whose y_new is empty.
inline constexpr std::size_t kMaxSplitRetries = 100;

namespace detail {

inline RepOutcome score(DistanceKind g, const DiscrepancyValue& rep, const DiscrepancyValue& ref) {
  RepOutcome out;
  out.value = evaluate_distance(g, rep, ref);
  if (g == DistanceKind::indicator) out.tie = std::get<double>(rep) == std::get<double>(ref);
  return out;
}

inline CheckMetadata metadata(std::string check, const CheckConfig& cfg, std::size_t rep_size, DistanceKind g,
                              std::string scheme = {}) {
  CheckMetadata m;
  m.check = std::move(check);
  m.replications = cfg.replications;
  m.seed = cfg.seed;
  m.rep_size = rep_size;
  m.scheme = std::move(scheme);
  m.distance = to_string(g);
  return m;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Checks

/// Posterior predictive check: E[g(d(y_rep, theta), d(y_obs, theta)) | y_obs].
/// One theta per replication feeds both discrepancy arguments.
template <PredictiveModel M>
CheckResult run_ppc(const M& model, const Dataset<typename M::observation_type>& y_obs,
                    const ModelDiscrepancy<M>& d, DistanceKind g, const CheckConfig& cfg) {
  cfg.validate();
  if (y_obs.empty()) throw std::invalid_argument("run_ppc: y_obs is empty");
  const std::size_t rep_size = cfg.rep_size.value_or(y_obs.size());
  return run_check(cfg, detail::metadata("ppc", cfg, rep_size, g), [&](std::size_t, Rng& rng) {
    const auto theta = model.posterior_sample(y_obs, rng);
    const auto y_rep = model.predictive_sample(theta, y_obs, rep_size, rng);
    return detail::score(g, d(y_rep, theta), d(y_obs, theta));
  });
}

/// Prior predictive check: as run_ppc with theta drawn from the prior.
template <PriorModel M>
CheckResult run_prior_pc(const M& model, const Dataset<typename M::observation_type>& y_obs,
                         const ModelDiscrepancy<M>& d, DistanceKind g, const CheckConfig& cfg) {
  cfg.validate();
  if (y_obs.empty()) throw std::invalid_argument("run_prior_pc: y_obs is empty");
  const std::size_t rep_size = cfg.rep_size.value_or(y_obs.size());
  return run_check(cfg, detail::metadata("prior_pc", cfg, rep_size, g), [&](std::size_t, Rng& rng) {
    const auto theta = model.prior_sample(rng);
    const auto y_rep = model.predictive_sample(theta, y_obs, rep_size, rng);
    return detail::score(g, d(y_rep, theta), d(y_obs, theta));
  });
}

/// Ideal population check: E[g(d(y_rep, theta), d(y_new, theta)) | y_obs, F]
/// with theta ~ p(theta | y_obs), y_rep ~ p(y | theta) and y_new ~ F.
///
/// `population(size, rng)` must return a fresh data set of `size` points.
template <PredictiveModel M, class Population>
  requires std::invocable<const Population&, std::size_t, Rng&>
CheckResult run_popc_ideal(const M& model, const Dataset<typename M::observation_type>& y_obs,
                           const Population& population, const ModelDiscrepancy<M>& d, DistanceKind g,
                           const CheckConfig& cfg) {
  cfg.validate();
  if (y_obs.empty()) throw std::invalid_argument("run_popc_ideal: y_obs is empty");
  const std::size_t rep_size = cfg.rep_size.value_or(y_obs.size());
  return run_check(cfg, detail::metadata("popc_ideal", cfg, rep_size, g), [&](std::size_t, Rng& rng) {
    const auto theta = model.posterior_sample(y_obs, rng);
    const Dataset<typename M::observation_type> y_new = population(rep_size, rng);
    if (y_new.size() != rep_size) throw std::runtime_error("population sampler returned the wrong size");
    const auto y_rep = model.predictive_sample(theta, y_new, y_new.size(), rng);
    return detail::score(g, d(y_rep, theta), d(y_new, theta));
  });
}

/// Population check estimated from a fixed pool `y`: each replication splits
/// y into (y_obs, y_new) with `scheme`, conditions on y_obs, and replicates
/// data the size of y_new. Splits with empty y_new are redrawn up to
/// kMaxSplitRetries times.
template <PredictiveModel M>
CheckResult run_popc_estimated(const M& model, const Dataset<typename M::observation_type>& y,
                               const SplitScheme& scheme, const ModelDiscrepancy<M>& d, DistanceKind g,
                               const CheckConfig& cfg) {
  cfg.validate();
  if (y.size() < 2) throw std::invalid_argument("run_popc_estimated: need at least 2 observations");
  scheme.validate(y.size());
  auto meta = detail::metadata("popc_estimated", cfg, 0, g, to_string(scheme));
  auto result = run_check(cfg, std::move(meta), [&](std::size_t, Rng& rng) {
    bool retried = false;
    for (std::size_t attempt = 0; attempt <= kMaxSplitRetries; ++attempt) {
      auto split = scheme.draw(y, rng);
      if (!split) {
        retried = true;
        continue;
      }
      const auto y_obs = y.subset(split->obs);
      const auto y_new = y.subset(split->fresh);
      const auto theta = model.posterior_sample(y_obs, rng);
      const auto y_rep = model.predictive_sample(theta, y_new, y_new.size(), rng);
      RepOutcome out = detail::score(g, d(y_rep, theta), d(y_new, theta));
      out.retried = retried;
      return out;
    }
    throw std::runtime_error("split produced an empty y_new " + std::to_string(kMaxSplitRetries + 1) +
                             " times in a row");
  });
  return result;
}

}  // namespace popcheck
