#pragma once

#include <cmath>
#include <cstdint>

namespace tamelab {

inline std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Counter-based stream: walker i of seed s always draws the same sequence,
// whichever thread runs it.
class WalkerRng {
 public:
  WalkerRng(std::uint64_t seed, std::uint64_t index)
      : state_(splitmix64_mix(seed ^ splitmix64_mix(index + 0x9e3779b97f4a7c15ULL))) {}

  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return splitmix64_mix(state_);
  }
  // (0, 1]
  double uniform() { return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53; }
  double exponential() { return -std::log(uniform()); }

 private:
  std::uint64_t state_;
};

}  // namespace tamelab
