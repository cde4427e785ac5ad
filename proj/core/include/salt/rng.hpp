#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace salt {

// splitmix64 finalizer; good 64-bit avalanche for seed derivation.
std::uint64_t mix_bits(std::uint64_t x);

// Combines a global seed with stream coordinates (e.g. epoch, instance index)
// into an independent stream seed: seed = hash(global_seed, a, b).
std::uint64_t derive_seed(std::uint64_t global_seed, std::uint64_t a, std::uint64_t b = 0);

// Deterministic random source. The engine is mt19937_64 (algorithm pinned by
// the standard) and all variate transforms are implemented here, so identical
// seeds give identical streams on every platform and toolchain.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64();

  // Uniform on [0, 1) with 53 random bits.
  double uniform();

  // Uniform integer in [0, n); n must be positive.
  std::size_t uniform_index(std::size_t n);

  // Standard normal via Box-Muller (second variate cached).
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  // In-place Fisher-Yates.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[uniform_index(i)]);
    }
  }

  // Number of raw engine draws consumed so far. Lets tests account for
  // exactly when fresh randomness was requested.
  std::uint64_t draw_count() const { return draws_; }

 private:
  std::mt19937_64 engine_;
  std::uint64_t draws_ = 0;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

}  // namespace salt
