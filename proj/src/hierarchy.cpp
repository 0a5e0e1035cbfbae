#include "popcheck/hierarchy.hpp"

#include <algorithm>

namespace popcheck {

std::string to_string(GroupReference ref) {
  return ref == GroupReference::fresh ? "fresh" : "observed";
}

CheckResult omnibus_check(std::span<const CheckResult> per_group_results, std::optional<std::span<const double>> weights) {
  const std::size_t J = per_group_results.size();
  if (J == 0) throw std::invalid_argument("omnibus_check: no group results");
  if (weights && weights->size() != J) throw std::invalid_argument("omnibus_check: one weight per group required");

  double w_sum = 0.0, est = 0.0, var = 0.0;
  CheckResult out;
  out.per_rep_values.reserve(J);
  for (std::size_t j = 0; j < J; ++j) {
    const double w = weights ? (*weights)[j] : 1.0;
    if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("omnibus_check: weights must be finite and >= 0");
    const auto& r = per_group_results[j];
    w_sum += w;
    est += w * r.estimate;
    var += w * w * r.std_error * r.std_error;
    out.per_rep_values.push_back(r.estimate);
    out.metadata.ties += r.metadata.ties;
    out.metadata.split_retries += r.metadata.split_retries;
  }
  if (!(w_sum > 0.0)) throw std::invalid_argument("omnibus_check: weights sum to zero");
  out.estimate = est / w_sum;
  out.std_error = std::sqrt(var) / w_sum;

  const auto& first = per_group_results.front().metadata;
  out.metadata.check = "omnibus";
  out.metadata.replications = first.replications;
  out.metadata.seed = first.seed;
  out.metadata.rep_size = first.rep_size;
  out.metadata.distance = first.distance;
  out.metadata.scheme = std::to_string(J) + " groups";
  return out;
}

std::vector<GroupLabel> subsample_groups(std::span<const GroupLabel> labels, std::size_t max_groups, Rng& rng) {
  std::vector<GroupLabel> pool(labels.begin(), labels.end());
  std::sort(pool.begin(), pool.end());
  pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
  if (pool.size() > max_groups) {
    for (std::size_t i = 0; i < max_groups; ++i) std::swap(pool[i], pool[i + rng.index(pool.size() - i)]);
    pool.resize(max_groups);
    std::sort(pool.begin(), pool.end());
  }
  return pool;
}

}  // namespace popcheck
