#pragma once

// Per-group and omnibus population checks for models with a global latent
// theta and per-group locals z_j.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "popcheck/check.hpp"
#include "popcheck/dataset.hpp"
#include "popcheck/rng.hpp"

namespace popcheck {

/// Local sampling contract. `local_predictive_sample` may write into z
/// (for instance the topic labels of the tokens it generates).
template <class M>
concept HierarchicalModel =
    requires(const M& m, const typename M::global_type& theta, typename M::local_type& z,
             const Dataset<typename M::observation_type>& y, GroupLabel j, std::size_t n, Rng& rng) {
      typename M::observation_type;
      typename M::global_type;
      typename M::local_type;
      { m.has_group(j) } -> std::convertible_to<bool>;
      { m.local_prior_sample(theta, rng) } -> std::convertible_to<typename M::local_type>;
      { m.local_predictive_sample(theta, z, j, n, rng) } -> std::convertible_to<Dataset<typename M::observation_type>>;
      { m.local_posterior_sample(theta, y, rng) } -> std::convertible_to<typename M::local_type>;
    };

/// Models whose locals carry per-observation state (for instance topic
/// labels) implement align_local, which attaches z to a reference data set.
template <class M>
concept AligningModel =
    HierarchicalModel<M> && requires(const M& m, const typename M::global_type& theta,
                                     const typename M::local_type& z,
                                     const Dataset<typename M::observation_type>& y, Rng& rng) {
      { m.align_local(theta, z, y, rng) } -> std::convertible_to<typename M::local_type>;
    };

template <class Obs>
struct GroupSplit {
  GroupLabel label = 0;
  Dataset<Obs> y_obs;
  Dataset<Obs> y_new;
  /// Positions within the group.
  std::vector<std::size_t> obs_indices;
  std::vector<std::size_t> new_indices;
};

/// Uniformly random partition of one group with ceil(fraction * size)
/// points in y_new. A grouped data set must carry a single label, which is
/// used in place of `label`.
template <class Obs>
GroupSplit<Obs> within_group_split(const Dataset<Obs>& group, double fraction, Rng& rng, GroupLabel label = 0) {
  const std::size_t n = group.size();
  if (n < 2) throw std::invalid_argument("within_group_split: group needs at least 2 points, has " + std::to_string(n));
  if (!(fraction > 0.0 && fraction < 1.0)) throw std::invalid_argument("within_group_split: fraction must lie in (0, 1)");
  if (group.grouped()) {
    label = group.group_ids->front();
    for (GroupLabel g : *group.group_ids) {
      if (g != label) throw std::invalid_argument("within_group_split: data set spans more than one group");
    }
  }
  const auto n_new = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n)));
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  for (std::size_t i = 0; i < n_new; ++i) std::swap(perm[i], perm[i + rng.index(n - i)]);

  GroupSplit<Obs> out;
  out.label = label;
  out.new_indices.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_new));
  out.obs_indices.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_new), perm.end());
  std::sort(out.new_indices.begin(), out.new_indices.end());
  std::sort(out.obs_indices.begin(), out.obs_indices.end());
  out.y_obs = group.subset(out.obs_indices);
  out.y_new = group.subset(out.new_indices);
  return out;
}

/// d(y_j, z_j, theta) for one group.
template <class M>
struct LocalDiscrepancy {
  using Data = Dataset<typename M::observation_type>;
  using Evaluator =
      std::function<DiscrepancyValue(const Data&, const typename M::local_type&, const typename M::global_type&)>;

  Arity arity;
  Evaluator evaluator;
  std::string name;

  static constexpr DiscrepancyKind kind = DiscrepancyKind::realized_local;

  DiscrepancyValue operator()(const Data& y, const typename M::local_type& z,
                              const typename M::global_type& theta) const {
    return evaluator(y, z, theta);
  }
};

/// d({y_j}, {z_j}, theta) over a collection of groups.
template <class M>
struct CollectionDiscrepancy {
  using Data = Dataset<typename M::observation_type>;
  using Evaluator = std::function<DiscrepancyValue(std::span<const Data>, std::span<const typename M::local_type>,
                                                   const typename M::global_type&)>;

  Arity arity;
  Evaluator evaluator;
  std::string name;

  DiscrepancyValue operator()(std::span<const Data> y, std::span<const typename M::local_type> z,
                              const typename M::global_type& theta) const {
    return evaluator(y, z, theta);
  }
};

/// Which half of a group split serves as the reference data set.
enum class GroupReference {
  /// y_new_j: the population check.
  fresh,
  /// y_obs_j in place of y_new_j: the posterior predictive baseline.
  observed,
};

std::string to_string(GroupReference ref);

namespace detail {

template <class M>
struct GroupDraw {
  typename M::local_type z_rep;
  Dataset<typename M::observation_type> y_rep;
  typename M::local_type z_ref;
};

/// z_rep ~ p(z | theta), y_rep ~ p(y | z_rep, theta) sized as |y_new_j|, and
/// z_ref ~ p(z | y_obs_j, theta). Only y_obs_j is read when sampling z_ref.
/// The posterior draw already covers y_obs_j; for a fresh reference an
/// aligning model extends it to the points of y_new_j.
template <HierarchicalModel M>
GroupDraw<M> draw_group(const M& model, const typename M::global_type& theta,
                        const GroupSplit<typename M::observation_type>& split, GroupReference reference, Rng& rng) {
  GroupDraw<M> out{model.local_prior_sample(theta, rng), {}, {}};
  out.y_rep = model.local_predictive_sample(theta, out.z_rep, split.label, split.y_new.size(), rng);
  out.z_ref = model.local_posterior_sample(theta, split.y_obs, rng);
  if constexpr (AligningModel<M>) {
    if (reference == GroupReference::fresh) out.z_ref = model.align_local(theta, out.z_ref, split.y_new, rng);
  }
  return out;
}

template <HierarchicalModel M>
void require_group(const M& model, GroupLabel label) {
  if (!model.has_group(label)) {
    throw std::invalid_argument("group " + std::to_string(label) + " is absent from the model state");
  }
}

}  // namespace detail

/// E[g(d(y_rep_j, z_rep_j, theta), d(y_ref_j, z_ref_j, theta))] for one group
/// with theta fixed (drawn from p(theta | y_obs) upstream).
template <HierarchicalModel M>
CheckResult per_group_check(const M& model, const typename M::global_type& theta,
                            const GroupSplit<typename M::observation_type>& split, const LocalDiscrepancy<M>& d,
                            DistanceKind g, const CheckConfig& cfg,
                            GroupReference reference = GroupReference::fresh) {
  cfg.validate();
  detail::require_group(model, split.label);
  if (split.y_new.empty()) throw std::invalid_argument("per_group_check: y_new_j is empty");
  const auto& ref = reference == GroupReference::fresh ? split.y_new : split.y_obs;
  auto meta = detail::metadata("per_group", cfg, split.y_new.size(), g,
                               "group " + std::to_string(split.label) + " " + to_string(reference));
  return run_check(cfg, std::move(meta), [&](std::size_t, Rng& rng) {
    auto draw = detail::draw_group(model, theta, split, reference, rng);
    return detail::score(g, d(draw.y_rep, draw.z_rep, theta), d(ref, draw.z_ref, theta));
  });
}

/// Per-replication values of a collection discrepancy, kept for callers that
/// need more than the scalar distance (such as per-topic deviances).
using CollectionObserver =
    std::function<void(std::size_t replication, const DiscrepancyValue& rep, const DiscrepancyValue& ref)>;

/// As per_group_check, but every replication draws all groups and evaluates a
/// single discrepancy over the whole collection.
template <HierarchicalModel M>
CheckResult collection_check(const M& model, const typename M::global_type& theta,
                             std::span<const GroupSplit<typename M::observation_type>> splits,
                             const CollectionDiscrepancy<M>& d, DistanceKind g, const CheckConfig& cfg,
                             GroupReference reference = GroupReference::fresh,
                             const CollectionObserver& observer = {}) {
  using Data = Dataset<typename M::observation_type>;
  cfg.validate();
  if (splits.empty()) throw std::invalid_argument("collection_check: no groups");
  std::size_t total_new = 0;
  for (const auto& s : splits) {
    detail::require_group(model, s.label);
    if (s.y_new.empty()) throw std::invalid_argument("collection_check: y_new of group " + std::to_string(s.label) + " is empty");
    total_new += s.y_new.size();
  }
  std::vector<Data> refs;
  refs.reserve(splits.size());
  for (const auto& s : splits) refs.push_back(reference == GroupReference::fresh ? s.y_new : s.y_obs);

  auto meta = detail::metadata("collection", cfg, total_new, g,
                               std::to_string(splits.size()) + " groups " + to_string(reference));
  return run_check(cfg, std::move(meta), [&](std::size_t r, Rng& rng) {
    std::vector<Data> y_rep;
    std::vector<typename M::local_type> z_rep, z_ref;
    y_rep.reserve(splits.size());
    z_rep.reserve(splits.size());
    z_ref.reserve(splits.size());
    for (const auto& s : splits) {
      auto draw = detail::draw_group(model, theta, s, reference, rng);
      y_rep.push_back(std::move(draw.y_rep));
      z_rep.push_back(std::move(draw.z_rep));
      z_ref.push_back(std::move(draw.z_ref));
    }
    const DiscrepancyValue d_rep = d(std::span<const Data>(y_rep), std::span<const typename M::local_type>(z_rep), theta);
    const DiscrepancyValue d_ref = d(std::span<const Data>(refs), std::span<const typename M::local_type>(z_ref), theta);
    if (observer) observer(r, d_rep, d_ref);
    return detail::score(g, d_rep, d_ref);
  });
}

/// Weighted mean of per-group estimates (unweighted by default), with
/// std_error sqrt(sum w_j^2 se_j^2) / sum w_j, which is sqrt(sum se_j^2) / J
/// for equal weights. per_rep_values holds the group estimates.
CheckResult omnibus_check(std::span<const CheckResult> per_group_results,
                          std::optional<std::span<const double>> weights = std::nullopt);

/// Sorted random subset of at most `max_groups` labels, used as the plug-in
/// sample of groups from the super-population. All labels when there are
/// few enough.
std::vector<GroupLabel> subsample_groups(std::span<const GroupLabel> labels, std::size_t max_groups, Rng& rng);

inline constexpr std::size_t kDefaultGroupSubsample = 1000;

}  // namespace popcheck
