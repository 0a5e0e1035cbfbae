#include "popcheck/check.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

namespace popcheck {

std::string to_string(DistanceKind kind) {
  switch (kind) {
    case DistanceKind::indicator: return "indicator";
    case DistanceKind::absolute: return "absolute";
    case DistanceKind::vector_deviance: return "vector_deviance";
  }
  return "unknown";
}

DistanceKind distance_from_string(const std::string& name) {
  if (name == "indicator") return DistanceKind::indicator;
  if (name == "absolute") return DistanceKind::absolute;
  if (name == "vector_deviance") return DistanceKind::vector_deviance;
  throw std::invalid_argument("unknown distance '" + name + "' (valid: indicator, absolute, vector_deviance)");
}

double evaluate_distance(DistanceKind g, const DiscrepancyValue& a, const DiscrepancyValue& b) {
  if (a.index() != b.index()) throw std::invalid_argument("evaluate_distance: arity mismatch");
  switch (g) {
    case DistanceKind::indicator:
    case DistanceKind::absolute: {
      const auto* x = std::get_if<double>(&a);
      if (x == nullptr) throw std::invalid_argument("evaluate_distance: " + to_string(g) + " needs scalars");
      const double y = std::get<double>(b);
      return g == DistanceKind::indicator ? (*x > y ? 1.0 : 0.0) : std::abs(*x - y);
    }
    case DistanceKind::vector_deviance: {
      const auto* x = std::get_if<std::vector<double>>(&a);
      if (x == nullptr) throw std::invalid_argument("evaluate_distance: vector_deviance needs vectors");
      const auto& y = std::get<std::vector<double>>(b);
      if (x->size() != y.size()) throw std::invalid_argument("evaluate_distance: vector length mismatch");
      double total = 0.0;
      std::size_t defined = 0;
      for (std::size_t i = 0; i < x->size(); ++i) {
        if (std::isnan((*x)[i]) || std::isnan(y[i])) continue;
        total += std::abs((*x)[i] - y[i]);
        ++defined;
      }
      if (defined == 0) throw std::invalid_argument("evaluate_distance: no component defined in both vectors");
      return total / static_cast<double>(defined);
    }
  }
  throw std::invalid_argument("evaluate_distance: unknown distance");
}

void CheckConfig::validate() const {
  if (replications < 1) throw std::invalid_argument("CheckConfig: replications must be >= 1");
  if (rep_size && *rep_size < 1) throw std::invalid_argument("CheckConfig: rep_size must be >= 1");
}

CheckResult make_result(std::vector<double> per_rep_values, CheckMetadata metadata) {
  CheckResult r;
  r.per_rep_values = std::move(per_rep_values);
  r.metadata = std::move(metadata);
  const std::size_t n = r.per_rep_values.size();
  if (n == 0) return r;
  double sum = 0.0;
  for (double v : r.per_rep_values) sum += v;
  r.estimate = sum / static_cast<double>(n);
  if (n > 1) {
    double ss = 0.0;
    for (double v : r.per_rep_values) ss += (v - r.estimate) * (v - r.estimate);
    r.std_error = std::sqrt(ss / static_cast<double>(n - 1)) / std::sqrt(static_cast<double>(n));
  }
  return r;
}

Summary summarize(const CheckResult& result) {
  const auto& v = result.per_rep_values;
  if (v.empty()) throw std::invalid_argument("summarize: no replications");
  Summary s;
  s.estimate = result.estimate;
  s.std_error = result.std_error;
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  s.min = *lo;
  s.max = *hi;
  const double width = (s.max - s.min) / static_cast<double>(Summary::bins);
  for (std::size_t i = 0; i <= Summary::bins; ++i) s.bin_edges[i] = s.min + width * static_cast<double>(i);
  s.bin_edges[Summary::bins] = s.max;
  for (double x : v) {
    std::size_t bin = 0;
    if (width > 0.0) {
      bin = static_cast<std::size_t>((x - s.min) / width);
      bin = std::min(bin, Summary::bins - 1);
    }
    ++s.counts[bin];
  }
  return s;
}

std::vector<RepOutcome> run_replications(std::size_t replications, std::uint64_t seed, unsigned threads,
                                         const ReplicationBody& body) {
  std::vector<RepOutcome> outcomes(replications);
  std::vector<std::exception_ptr> errors(replications);

  auto work = [&](std::size_t r) {
    try {
      Rng rng = Rng::substream(seed, {r});
      outcomes[r] = body(r, rng);
    } catch (...) {
      errors[r] = std::current_exception();
    }
  };

  unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, replications));
  if (workers <= 1) {
    for (std::size_t r = 0; r < replications; ++r) {
      work(r);
      if (errors[r]) break;
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t r = next.fetch_add(1); r < replications; r = next.fetch_add(1)) work(r);
      });
    }
  }

  for (std::size_t r = 0; r < replications; ++r) {
    if (!errors[r]) continue;
    try {
      std::rethrow_exception(errors[r]);
    } catch (const CheckError&) {
      throw;
    } catch (const std::exception& e) {
      throw CheckError(r, e.what());
    } catch (...) {
      throw CheckError(r, "unknown error");
    }
  }
  return outcomes;
}

CheckResult run_check(const CheckConfig& cfg, CheckMetadata metadata, const ReplicationBody& body) {
  cfg.validate();
  auto outcomes = run_replications(cfg.replications, cfg.seed, cfg.threads, body);
  std::vector<double> values;
  values.reserve(outcomes.size());
  for (const auto& o : outcomes) {
    values.push_back(o.value);
    if (o.tie) ++metadata.ties;
    if (o.retried) ++metadata.split_retries;
  }
  return make_result(std::move(values), std::move(metadata));
}

}  // namespace popcheck
