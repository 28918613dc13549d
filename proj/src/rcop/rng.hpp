#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace rcop {

// Streams are derived from (seed, purpose, index) by hashing, so that two
// consumers keyed differently never share state and results do not depend on
// the order in which streams are created.
class Rng {
 public:
  using engine_type = std::mt19937_64;

  static Rng stream(std::uint64_t seed, std::string_view purpose, std::uint64_t index = 0);

  explicit Rng(std::uint64_t state) : engine_(state) {}

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
  double normal() { return normal_(engine_); }
  std::uint64_t below(std::uint64_t n) {
    return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(engine_);
  }

  engine_type& engine() { return engine_; }

 private:
  engine_type engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace rcop
