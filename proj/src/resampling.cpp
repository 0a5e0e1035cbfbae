#include "popcheck/resampling.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace popcheck {

namespace {

std::vector<std::size_t> bootstrap(std::size_t n, Rng& rng) {
  std::vector<std::size_t> idx(n);
  for (auto& i : idx) i = rng.index(n);
  return idx;
}

}  // namespace

std::vector<std::size_t> out_of_bag(std::size_t n, std::span<const std::size_t> drawn) {
  std::vector<bool> seen(n, false);
  for (std::size_t i : drawn) seen.at(i) = true;
  std::vector<std::size_t> rest;
  for (std::size_t i = 0; i < n; ++i) {
    if (!seen[i]) rest.push_back(i);
  }
  return rest;
}

IndexSplit cv_split_indices(std::size_t n, std::size_t m, Rng& rng) {
  if (m < 1 || m >= n) {
    throw std::invalid_argument("cv_split: need 1 <= m < n (m=" + std::to_string(m) + ", n=" + std::to_string(n) +
                                ")");
  }
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  for (std::size_t i = 0; i < m; ++i) std::swap(idx[i], idx[i + rng.index(n - i)]);
  IndexSplit s;
  s.obs.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(m));
  s.fresh = out_of_bag(n, s.obs);
  return s;
}

std::optional<IndexSplit> oob_split_indices(std::size_t n, Rng& rng, std::optional<std::size_t> fresh_size) {
  if (n == 0) throw std::invalid_argument("oob_split: empty pool");
  IndexSplit s;
  s.obs = bootstrap(n, rng);
  auto rest = out_of_bag(n, s.obs);
  if (rest.empty()) return std::nullopt;
  if (fresh_size) {
    if (*fresh_size < 1) throw std::invalid_argument("oob_split: fresh size must be >= 1");
    s.fresh.resize(*fresh_size);
    for (auto& i : s.fresh) i = rest[rng.index(rest.size())];
  } else {
    s.fresh = std::move(rest);
  }
  return s;
}

IndexSplit double_bootstrap_indices(std::size_t n, Rng& rng) {
  if (n == 0) throw std::invalid_argument("double_bootstrap_split: empty pool");
  IndexSplit s;
  s.obs = bootstrap(n, rng);
  s.fresh = bootstrap(n, rng);
  return s;
}

std::optional<IndexSplit> p_bootstrap_indices(std::size_t n, double p, Rng& rng) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p_bootstrap_split: p must lie in [0, 1]");
  if (n == 0) throw std::invalid_argument("p_bootstrap_split: empty pool");
  IndexSplit s;
  s.obs = bootstrap(n, rng);
  const auto rest = out_of_bag(n, s.obs);
  if (rest.empty() && p > 0.0) return std::nullopt;
  s.fresh.resize(n);
  for (auto& i : s.fresh) {
    if (rng.bernoulli(p)) {
      i = rest[rng.index(rest.size())];
    } else {
      i = s.obs[rng.index(s.obs.size())];
    }
  }
  return s;
}

void SplitScheme::validate(std::size_t n) const {
  switch (kind) {
    case SplitKind::cross_validation: {
      const std::size_t mm = m.value_or((n + 1) / 2);
      if (mm < 1 || mm >= n) throw std::invalid_argument("cross-validation needs 1 <= m < n");
      break;
    }
    case SplitKind::p_bootstrap:
      if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p-bootstrap needs p in [0, 1]");
      [[fallthrough]];
    case SplitKind::bootstrap_oob:
    case SplitKind::double_bootstrap:
      if (n < 1) throw std::invalid_argument("bootstrap needs a nonempty pool");
      break;
  }
}

std::optional<IndexSplit> SplitScheme::draw_units(std::size_t n, Rng& rng) const {
  switch (kind) {
    case SplitKind::cross_validation: return cv_split_indices(n, m.value_or((n + 1) / 2), rng);
    case SplitKind::bootstrap_oob: return oob_split_indices(n, rng, oob_fresh_size);
    case SplitKind::double_bootstrap: return double_bootstrap_indices(n, rng);
    case SplitKind::p_bootstrap: return p_bootstrap_indices(n, p, rng);
  }
  throw std::invalid_argument("SplitScheme: unknown kind");
}

std::optional<IndexSplit> SplitScheme::draw_grouped(const std::vector<GroupLabel>& group_ids, Rng& rng) const {
  std::unordered_map<GroupLabel, std::size_t> slot;
  std::vector<std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < group_ids.size(); ++i) {
    auto [it, inserted] = slot.try_emplace(group_ids[i], members.size());
    if (inserted) members.emplace_back();
    members[it->second].push_back(i);
  }
  auto units = draw_units(members.size(), rng);
  if (!units) return std::nullopt;
  auto expand = [&](const std::vector<std::size_t>& groups) {
    std::vector<std::size_t> points;
    for (std::size_t g : groups) points.insert(points.end(), members[g].begin(), members[g].end());
    return points;
  };
  IndexSplit s;
  s.obs = expand(units->obs);
  s.fresh = expand(units->fresh);
  return s;
}

std::string to_string(const SplitScheme& scheme) {
  std::ostringstream os;
  switch (scheme.kind) {
    case SplitKind::cross_validation:
      os << "cv";
      if (scheme.m) os << "(m=" << *scheme.m << ")";
      break;
    case SplitKind::bootstrap_oob: os << "oob"; break;
    case SplitKind::double_bootstrap: os << "double_bootstrap"; break;
    case SplitKind::p_bootstrap: os << "p_bootstrap(p=" << scheme.p << ")"; break;
  }
  if (scheme.unit == SplitUnit::group) os << "[group]";
  return os.str();
}

SplitKind split_kind_from_string(const std::string& name) {
  if (name == "cv" || name == "cross_validation") return SplitKind::cross_validation;
  if (name == "oob" || name == "bootstrap_oob") return SplitKind::bootstrap_oob;
  if (name == "double_bootstrap") return SplitKind::double_bootstrap;
  if (name == "p_bootstrap") return SplitKind::p_bootstrap;
  throw std::invalid_argument("unknown split scheme '" + name + "' (valid: cv, oob, double_bootstrap, p_bootstrap)");
}

}  // namespace popcheck
