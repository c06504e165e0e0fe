#pragma once

#include <cstdint>
#include <string_view>

#include "bridgesim/util.hpp"

namespace bridgesim {

// Deterministic, splittable random source. Every stochastic stage derives
// its own stream from (seed, stream name, index), so results never depend
// on the order or thread in which stages happen to run. The generator and
// the normal transform are implemented here rather than taken from
// <random> because libstdc++'s distributions are not pinned across
// versions and reproducibility is a hard requirement.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  // splitmix64 scramble of (seed, fnv1a(stream), index)
  static std::uint64_t derive(std::uint64_t seed, std::string_view stream,
                              std::uint64_t index = 0);
  static Rng stream(std::uint64_t seed, std::string_view name,
                    std::uint64_t index = 0) {
    return Rng(derive(seed, name, index));
  }

  std::uint64_t next_u64();
  double uniform();  // [0, 1)
  double normal();   // N(0, 1), Box-Muller
  cplx cnormal();    // complex Gaussian, total variance 1

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace bridgesim
