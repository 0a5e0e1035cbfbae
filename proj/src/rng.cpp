#include "popcheck/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace popcheck {

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> keys) noexcept {
  std::uint64_t h = mix64(master);
  for (std::uint64_t k : keys) {
    h = mix64(h ^ mix64(k + 0x632be59bd9b4e019ULL));
  }
  return h;
}

double Rng::uniform() {
  return std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
}

double Rng::uniform(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(engine_);
}

double Rng::normal(double mean, double sd) {
  return std::normal_distribution<double>(mean, sd)(engine_);
}

double Rng::gamma(double shape) {
  return std::gamma_distribution<double>(shape, 1.0)(engine_);
}

double Rng::student_t(double df) {
  return std::student_t_distribution<double>(df)(engine_);
}

bool Rng::bernoulli(double p) {
  if (p <= 0.0) return false;
  if (p >= 1.0) return true;
  return uniform() < p;
}

std::size_t Rng::index(std::size_t n) {
  if (n == 0) throw std::invalid_argument("Rng::index: empty range");
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
}

std::size_t Rng::categorical(std::span<const double> weights) {
  if (weights.empty()) throw std::invalid_argument("Rng::categorical: no weights");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw std::invalid_argument("Rng::categorical: weights must be nonnegative");
    total += w;
  }
  if (!(total > 0.0) || !std::isfinite(total)) throw std::invalid_argument("Rng::categorical: weights must have positive mass");
  double u = uniform() * total;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    u -= weights[k];
    if (u < 0.0) return k;
  }
  // Rounding can leave u marginally nonnegative; return the last positive cell.
  for (std::size_t k = weights.size(); k-- > 0;) {
    if (weights[k] > 0.0) return k;
  }
  return weights.size() - 1;
}

void Rng::dirichlet(std::span<const double> concentration, std::span<double> out) {
  if (concentration.size() != out.size()) throw std::invalid_argument("Rng::dirichlet: size mismatch");
  // Gamma draws in log space: for shape a < 1, G(a) = G(a + 1) * U^(1/a), which
  // stays finite when G(a) itself would underflow.
  double max_log = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < concentration.size(); ++k) {
    const double a = concentration[k];
    if (!(a > 0.0)) throw std::invalid_argument("Rng::dirichlet: concentrations must be positive");
    double log_g;
    if (a < 1.0) {
      const double u = 1.0 - uniform();  // (0, 1]
      log_g = std::log(gamma(a + 1.0)) + std::log(u) / a;
    } else {
      log_g = std::log(gamma(a));
    }
    out[k] = log_g;
    max_log = std::max(max_log, log_g);
  }
  double total = 0.0;
  for (auto& v : out) {
    v = std::exp(v - max_log);
    total += v;
  }
  for (auto& v : out) v /= total;
}

}  // namespace popcheck
