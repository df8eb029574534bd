#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace polyqre {

// Deterministic random source. Doubles are derived from raw mt19937_64 words
// rather than std distributions, whose output is implementation-defined; this
// keeps traces byte-identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard exponential via inversion; uniform() < 1 keeps the log finite.
  double exponential() { return -std::log(1.0 - uniform()); }

  // Flat Dirichlet over m coordinates (normalized exponentials).
  std::vector<double> dirichlet(int m) {
    std::vector<double> v(m);
    double s = 0.0;
    for (auto& t : v) {
      t = exponential();
      s += t;
    }
    for (auto& t : v) t /= s;
    return v;
  }

  std::uint64_t raw() { return eng_(); }

 private:
  std::mt19937_64 eng_;
};

}  // namespace polyqre
