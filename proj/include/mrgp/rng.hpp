#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace mrgp {

// Deterministic random source. One instance drives one run of the engine;
// auxiliary streams (dataset sampling, shop instances) get their own seeds so
// that evaluation order never shifts the breeding stream.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // uniform in [0, 1)
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // inclusive bounds; Lemire multiply-shift (bias is O(span/2^64), irrelevant here)
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1u;
    const auto m = static_cast<unsigned __int128>(engine_()) * span;
    return lo + static_cast<std::int64_t>(static_cast<std::uint64_t>(m >> 64));
  }

  std::size_t index(std::size_t size) {
    return static_cast<std::size_t>(uniform_int(0, static_cast<std::int64_t>(size) - 1));
  }

  bool bernoulli(double p) { return uniform() < p; }

  // exponential with the given mean (inversion method)
  double exponential(double mean) { return -mean * std::log1p(-uniform()); }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i)
      std::swap(v[i - 1], v[static_cast<std::size_t>(uniform_int(0, static_cast<std::int64_t>(i) - 1))]);
  }

  // k distinct values from {0, ..., n-1}, order unspecified
  std::vector<int> sample_without_replacement(int n, int k) {
    std::vector<int> pool(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i;
    for (int i = 0; i < k; ++i) {
      const auto j = static_cast<std::size_t>(uniform_int(i, n - 1));
      std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
    }
    pool.resize(static_cast<std::size_t>(k));
    return pool;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace mrgp
