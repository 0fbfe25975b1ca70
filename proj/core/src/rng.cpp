#include "pgap/rng.hpp"

#include <cmath>
#include <numbers>

namespace pgap {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t CounterRng::bits(std::uint64_t counter) const {
  return splitmix64(splitmix64(seed_ ^ splitmix64(stream_)) ^ counter);
}

double CounterRng::uniform() {
  // 53 random bits, shifted off zero
  return (static_cast<double>(next_bits() >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double t = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(t);
  have_spare_ = true;
  return r * std::cos(t);
}

cplx CounterRng::complex_normal() {
  const double re = normal();
  const double im = normal();
  return {re, im};
}

Mat random_complex(CounterRng& rng, long long rows, long long cols) {
  Mat m(rows, cols);
  for (long long j = 0; j < cols; ++j)
    for (long long i = 0; i < rows; ++i) m(i, j) = rng.complex_normal();
  return m;
}

Vec random_vector(CounterRng& rng, long long n) {
  Vec v(n);
  for (long long i = 0; i < n; ++i) v(i) = rng.complex_normal();
  return v;
}

Mat random_hermitian(CounterRng& rng, long long dim) {
  Mat g = random_complex(rng, dim, dim);
  return 0.5 * (g + g.adjoint());
}

Mat random_density(CounterRng& rng, long long dim, double scale) {
  Mat h = random_hermitian(rng, dim);
  h *= scale / std::max(op_norm(h), 1e-300);
  Mat rho = herm_func(h, [](double x) { return std::exp(-x); });
  return rho / rho.trace().real();
}

}  // namespace pgap
