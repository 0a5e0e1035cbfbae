#pragma once

// Splits of a fixed pool into (y_obs, y_new). Membership is by pool index:
// duplicate values are distinct observations.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "popcheck/dataset.hpp"
#include "popcheck/rng.hpp"

namespace popcheck {

/// Pool indices of the conditioning set and the fresh ("new") set.
struct IndexSplit {
  std::vector<std::size_t> obs;
  std::vector<std::size_t> fresh;
};

/// m points without replacement for obs, the rest for fresh. Needs 1 <= m < n.
IndexSplit cv_split_indices(std::size_t n, std::size_t m, Rng& rng);

/// Bootstrap obs of size n; fresh is the out-of-bag complement, or, when
/// `fresh_size` is given, that many iid draws from the out-of-bag points.
/// Returns nullopt when every index was drawn (empty out-of-bag set).
std::optional<IndexSplit> oob_split_indices(std::size_t n, Rng& rng,
                                            std::optional<std::size_t> fresh_size = std::nullopt);

/// Two independent bootstrap samples of size n.
IndexSplit double_bootstrap_indices(std::size_t n, Rng& rng);

/// Bootstrap obs; fresh is n iid draws from p * Emp(out-of-bag) + (1 - p) * Emp(obs).
/// Returns nullopt when p > 0 and the out-of-bag set is empty.
std::optional<IndexSplit> p_bootstrap_indices(std::size_t n, double p, Rng& rng);

/// Sorted pool indices in [0, n) absent from `drawn`.
std::vector<std::size_t> out_of_bag(std::size_t n, std::span<const std::size_t> drawn);

/// Empirical distribution over a pool of observations.
template <class Obs>
class EmpiricalDistribution {
 public:
  explicit EmpiricalDistribution(const Dataset<Obs>& pool) : pool_(&pool) {}

  std::vector<std::size_t> draw_indices(std::size_t m, bool with_replacement, Rng& rng) const {
    const std::size_t n = pool_->size();
    if (n == 0) throw std::invalid_argument("EmpiricalDistribution: empty pool");
    if (!with_replacement) {
      if (m > n) throw std::invalid_argument("EmpiricalDistribution: m exceeds pool size without replacement");
      std::vector<std::size_t> idx(n);
      for (std::size_t i = 0; i < n; ++i) idx[i] = i;
      for (std::size_t i = 0; i < m; ++i) std::swap(idx[i], idx[i + rng.index(n - i)]);
      idx.resize(m);
      return idx;
    }
    std::vector<std::size_t> idx(m);
    for (auto& i : idx) i = rng.index(n);
    return idx;
  }

  Dataset<Obs> draw(std::size_t m, bool with_replacement, Rng& rng) const {
    const auto idx = draw_indices(m, with_replacement, rng);
    return pool_->subset(idx);
  }

 private:
  const Dataset<Obs>* pool_;
};

enum class SplitKind { cross_validation, bootstrap_oob, double_bootstrap, p_bootstrap };

/// Resampling unit for grouped data.
enum class SplitUnit { point, group };

/// A rule that produces (y_obs, y_new) from a pool.
struct SplitScheme {
  SplitKind kind = SplitKind::bootstrap_oob;
  /// Cross-validation conditioning size; defaults to ceil(n / 2).
  std::optional<std::size_t> m;
  /// p-bootstrap mixture weight on out-of-bag points.
  double p = 0.632;
  /// Out-of-bag only: draw this many fresh points from the out-of-bag set
  /// instead of taking the whole complement.
  std::optional<std::size_t> oob_fresh_size;
  /// With grouped data, resample whole groups instead of points.
  SplitUnit unit = SplitUnit::point;

  static SplitScheme cross_validation(std::optional<std::size_t> m = std::nullopt) {
    SplitScheme s;
    s.kind = SplitKind::cross_validation;
    s.m = m;
    return s;
  }
  static SplitScheme bootstrap_oob() { return SplitScheme{}; }
  static SplitScheme double_bootstrap() {
    SplitScheme s;
    s.kind = SplitKind::double_bootstrap;
    return s;
  }
  static SplitScheme p_bootstrap(double p) {
    SplitScheme s;
    s.kind = SplitKind::p_bootstrap;
    s.p = p;
    return s;
  }

  /// Checks the parameters against a pool of `n` resampling units.
  void validate(std::size_t n) const;

  /// Index split over `n` units; nullopt signals an empty y_new.
  std::optional<IndexSplit> draw_units(std::size_t n, Rng& rng) const;

  /// Split of a data set at the configured unit. Grouped data with
  /// unit == group resamples group labels (in order of first appearance) and
  /// expands each drawn group to all of its points.
  template <class Obs>
  std::optional<IndexSplit> draw(const Dataset<Obs>& y, Rng& rng) const {
    if (unit == SplitUnit::point || !y.grouped()) return draw_units(y.size(), rng);
    return draw_grouped(*y.group_ids, rng);
  }

 private:
  std::optional<IndexSplit> draw_grouped(const std::vector<GroupLabel>& group_ids, Rng& rng) const;
};

std::string to_string(const SplitScheme& scheme);
/// Parses "cv", "oob", "double_bootstrap" or "p_bootstrap".
SplitKind split_kind_from_string(const std::string& name);

template <class Obs>
struct DatasetSplit {
  Dataset<Obs> obs;
  Dataset<Obs> fresh;
  IndexSplit indices;
};

template <class Obs>
DatasetSplit<Obs> materialize(const Dataset<Obs>& y, IndexSplit split) {
  DatasetSplit<Obs> out;
  out.obs = y.subset(split.obs);
  out.fresh = y.subset(split.fresh);
  out.indices = std::move(split);
  return out;
}

template <class Obs>
DatasetSplit<Obs> cv_split(const Dataset<Obs>& y, std::size_t m, Rng& rng) {
  return materialize(y, cv_split_indices(y.size(), m, rng));
}

template <class Obs>
std::optional<DatasetSplit<Obs>> oob_split(const Dataset<Obs>& y, Rng& rng) {
  auto s = oob_split_indices(y.size(), rng);
  if (!s) return std::nullopt;
  return materialize(y, std::move(*s));
}

template <class Obs>
DatasetSplit<Obs> double_bootstrap_split(const Dataset<Obs>& y, Rng& rng) {
  return materialize(y, double_bootstrap_indices(y.size(), rng));
}

template <class Obs>
std::optional<DatasetSplit<Obs>> p_bootstrap_split(const Dataset<Obs>& y, double p, Rng& rng) {
  auto s = p_bootstrap_indices(y.size(), p, rng);
  if (!s) return std::nullopt;
  return materialize(y, std::move(*s));
}

}  // namespace popcheck
