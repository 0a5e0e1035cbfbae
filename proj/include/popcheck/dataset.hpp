#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace popcheck {

using GroupLabel = std::int64_t;

/// Covariates and response of one regression observation.
struct RegressionPoint {
  std::vector<double> covariates;
  double response = 0.0;
};

/// One word occurrence in a corpus.
struct Token {
  std::int32_t doc = 0;
  std::int32_t word = 0;

  friend bool operator==(const Token&, const Token&) = default;
};

/// Ordered multiset of homogeneous observations, optionally grouped.
///
/// Observations are identified by their position: two equal values at
/// different positions are distinct observations.
template <class Obs>
struct Dataset {
  using observation_type = Obs;

  std::vector<Obs> observations;
  std::optional<std::vector<GroupLabel>> group_ids;

  Dataset() = default;
  explicit Dataset(std::vector<Obs> obs) : observations(std::move(obs)) {}
  Dataset(std::vector<Obs> obs, std::vector<GroupLabel> groups)
      : observations(std::move(obs)), group_ids(std::move(groups)) {
    validate();
  }

  std::size_t size() const noexcept { return observations.size(); }
  bool empty() const noexcept { return observations.empty(); }
  bool grouped() const noexcept { return group_ids.has_value(); }
  const Obs& operator[](std::size_t i) const { return observations[i]; }

  void validate() const {
    if (group_ids && group_ids->size() != observations.size()) {
      throw std::invalid_argument("Dataset: group_ids length " + std::to_string(group_ids->size()) +
                                  " does not match " + std::to_string(observations.size()) +
                                  " observations");
    }
  }

  /// Observations at `indices`, in that order; duplicates are kept.
  Dataset subset(std::span<const std::size_t> indices) const {
    Dataset out;
    out.observations.reserve(indices.size());
    if (group_ids) out.group_ids.emplace().reserve(indices.size());
    for (std::size_t i : indices) {
      if (i >= observations.size()) throw std::out_of_range("Dataset::subset: index out of range");
      out.observations.push_back(observations[i]);
      if (group_ids) out.group_ids->push_back((*group_ids)[i]);
    }
    return out;
  }
};

using ScalarData = Dataset<double>;
using RegressionData = Dataset<RegressionPoint>;
using Corpus = Dataset<Token>;

}  // namespace popcheck
