#pragma once
#include <cstdint>
#include <string_view>
#include <vector>

namespace exgen {

// Splittable deterministic random source. Streams are identified by an
// immutable key; split() derives an independent child key without consuming
// draws, so adding a consumer never perturbs sibling streams.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  Rng split(std::string_view label) const;
  Rng split(std::uint64_t index) const;

  std::uint64_t next_u64();

  // Uniform draw in [lo, hi). Requires lo < hi.
  double uniform(double lo = 0.0, double hi = 1.0);
  // Standard normal via Box-Muller with cached spare.
  double normal();
  // Uniform integer in [0, n). Requires n >= 1.
  std::size_t index(std::size_t n);

  std::vector<double> uniform_vec(std::size_t n, double lo = 0.0, double hi = 1.0);
  std::vector<double> normal_vec(std::size_t n);

  std::uint64_t key() const { return key_; }

 private:
  Rng(std::uint64_t key, int);  // internal: key is already mixed

  std::uint64_t key_;
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Stable 64-bit hash used for sub-seed derivation (master seed, stage name,
// variant name) and content-independent stream labels.
std::uint64_t hash64(std::string_view s);
std::uint64_t mix64(std::uint64_t x);

}  // namespace exgen
