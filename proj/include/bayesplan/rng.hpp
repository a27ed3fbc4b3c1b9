#pragma once

#include <cstdint>
#include <initializer_list>

namespace bayesplan {

// Counter-free 64-bit generator (splitmix64). Small state, cheap to fork,
// and fully portable: all downstream draws (uniform, normal, gamma) are
// derived from next() in this repository, never from std:: distributions,
// so identical seeds give identical streams on any platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform on [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform on the open interval (0, 1); safe as input to inverse CDFs.
  double uniform_open() {
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : next() % n; }

  // Standard normal draw via the inverse CDF.
  double gaussian();

  // Gamma(shape, rate) draw, Marsaglia-Tsang.
  double gamma(double shape, double rate);

 private:
  std::uint64_t state_;
};

// Deterministic seed derivation for nested experiment structure
// (experiment seed, env seed, planner index, repetition, time step, ...).
std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts);

}  // namespace bayesplan
