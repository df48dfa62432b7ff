#pragma once

// Seeded random streams. The engine is std::mt19937_64, whose output
// sequence is fixed by the standard; the variate transforms live here instead
// of <random> distributions because the latter are implementation-defined,
// and output files must be identical across standard libraries.

#include <cstdint>
#include <random>

namespace snstf {

/// splitmix64 finalizer; used to derive independent substream seeds.
std::uint64_t mix64(std::uint64_t x);

/// Seed of substream `index` under a master seed. Substreams are tied to
/// fixed work blocks, never to threads.
std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0,1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

  double normal();

  /// Poisson variate. Inversion for small means, PTRS transformed rejection
  /// (Hormann 1993) otherwise.
  std::uint64_t poisson(double mean);

  /// Binomial thinning by direct Bernoulli trials; n is small in practice.
  std::uint64_t binomial(std::uint64_t n, double p);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace snstf
