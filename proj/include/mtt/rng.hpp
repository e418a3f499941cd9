#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace mtt {

// SplitMix64 finalizer. Used to derive independent child seeds from a master
// seed plus a counter path, so per-task / per-cell / per-rep streams are
// reproducible no matter how work is scheduled.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed,
                                 std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = splitmix64(seed ^ 0x6a09e667f3bcc908ULL);
  for (std::uint64_t v : path) h = splitmix64(h ^ splitmix64(v + 0x9e3779b97f4a7c15ULL));
  return h;
}

// Seeded generator with the handful of draws the project needs. All sampling
// goes through this wrapper so draw order (and thus bit-level reproducibility)
// is pinned in one place.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(splitmix64(seed ^ 0xa5a5a5a5deadbeefULL)) {}

  double uniform() { return unit_(gen_); }                       // U[0,1)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal() { return norm_(gen_); }                        // N(0,1)
  double normal(double mean, double sd) { return mean + sd * normal(); }

  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
  std::normal_distribution<double> norm_{0.0, 1.0};
};

}  // namespace mtt
