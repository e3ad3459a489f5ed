#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "msym/algebra.hpp"

namespace msym {

// Deterministic small-rational sampler.  Only raw mt19937_64 output is used
// so streams are identical across standard libraries.
class RationalSampler {
 public:
  explicit RationalSampler(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next() { return eng_(); }

  // uniform integer in [lo, hi]
  long integer(long lo, long hi) {
    auto span = static_cast<std::uint64_t>(hi - lo + 1);
    return lo + static_cast<long>(eng_() % span);
  }

  // numerator in [-9, 9], denominator in {1, 2, 3}
  Rational small() {
    Rational r(integer(-9, 9), integer(1, 3));
    r.canonicalize();
    return r;
  }

  Rational small_nonzero() {
    Rational r;
    do r = small();
    while (r == 0);
    return r;
  }

  std::vector<Rational> point(std::size_t dim) {
    std::vector<Rational> p(dim);
    for (auto& x : p) x = small();
    return p;
  }

  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 eng_;
};

}  // namespace msym
