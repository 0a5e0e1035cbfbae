#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>

namespace popcheck {

/// Mixes a 64-bit value with the SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Derives a child seed from a master seed and an ordered list of integer
/// keys. Distinct key paths give statistically independent streams, so a
/// replication's entropy depends only on (master, keys) and never on the
/// order in which replications are executed.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> keys) noexcept;

/// Random stream used by every sampler in the library.
///
/// Wraps a 64-bit Mersenne Twister. Samplers take `Rng&` explicitly; nothing
/// in the library owns hidden global entropy.
class Rng {
 public:
  using engine_type = std::mt19937_64;

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Stream keyed by (master, keys...).
  static Rng substream(std::uint64_t master, std::initializer_list<std::uint64_t> keys) {
    return Rng(derive_seed(master, keys));
  }

  engine_type& engine() noexcept { return engine_; }

  /// Uniform on [0, 1).
  double uniform();
  double uniform(double lo, double hi);
  double normal(double mean = 0.0, double sd = 1.0);
  double gamma(double shape);
  double student_t(double df);
  bool bernoulli(double p);
  /// Uniform index in [0, n). Requires n > 0.
  std::size_t index(std::size_t n);
  /// Index drawn proportionally to nonnegative `weights`.
  std::size_t categorical(std::span<const double> weights);
  /// Fills `out` with a Dirichlet(concentration) draw.
  void dirichlet(std::span<const double> concentration, std::span<double> out);

 private:
  engine_type engine_;
};

}  // namespace popcheck
