#pragma once

#include "pgap/algebra.hpp"

#include <cstdint>

namespace pgap {

// Counter-based generator: every draw is a pure function of (seed, stream, counter).
// Bits come from the splitmix64 finalizer applied to a keyed counter.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) : seed_(seed), stream_(stream) {}

  std::uint64_t bits(std::uint64_t counter) const;
  std::uint64_t next_bits() { return bits(counter_++); }
  // uniform in (0, 1)
  double uniform();
  // standard normal via Box-Muller
  double normal();
  cplx complex_normal();

  std::uint64_t counter() const { return counter_; }
  CounterRng substream(std::uint64_t stream) const { return CounterRng(seed_, stream_ * 0x9E3779B97F4A7C15ULL + stream + 1); }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x);

Mat random_complex(CounterRng& rng, long long rows, long long cols);
Vec random_vector(CounterRng& rng, long long n);
// Gaussian Hermitian matrix (GUE-like, unnormalized)
Mat random_hermitian(CounterRng& rng, long long dim);
// exp(-H) normalized for a random Hermitian H of the given scale: always full rank
Mat random_density(CounterRng& rng, long long dim, double scale = 1.0);

}  // namespace pgap
