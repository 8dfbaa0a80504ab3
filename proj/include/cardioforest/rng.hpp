#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace cardio {

// splitmix64 finalizer. All randomness in the library flows through this
// mixer so results are identical across platforms and thread counts.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Derives a child seed from a parent seed and a tag. Used as the single
// seed-splitting scheme everywhere: per-tree seeds come from
// seed_mix(model_seed, tree_index), per-node feature streams from
// seed_mix(tree_seed, node_id), per-(model, fold) training seeds from
// seed_mix(seed_mix(global_seed, kModelSeedTag + model_index), fold_index).
inline std::uint64_t seed_mix(std::uint64_t parent, std::uint64_t tag) {
  return splitmix64(parent ^ splitmix64(tag + 0x9E3779B97F4A7C15ULL));
}

// Stream tags so distinct uses of the same parent seed never alias.
inline constexpr std::uint64_t kBootstrapTag = 0x626F6F74;   // bootstrap draw
inline constexpr std::uint64_t kFeatureTag = 0x66656174;     // feature subset
inline constexpr std::uint64_t kRowSampleTag = 0x726F7773;   // row subsample
inline constexpr std::uint64_t kColSampleTag = 0x636F6C73;   // column sample
inline constexpr std::uint64_t kGossTag = 0x676F7373;        // GOSS sampling
inline constexpr std::uint64_t kValSplitTag = 0x76616C69;    // validation split
inline constexpr std::uint64_t kFoldTag = 0x666F6C64;        // CV fold shuffle
inline constexpr std::uint64_t kModelSeedTag = 0x6D6F6400;   // + model index

// Counter-based generator on top of splitmix64.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 bits of precision.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Unbiased uniform integer in [0, n). Lemire's multiply-shift rejection.
  std::uint64_t next_below(std::uint64_t n) {
    unsigned __int128 m =
        static_cast<unsigned __int128>(next_u64()) * static_cast<unsigned __int128>(n);
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < n) {
      const std::uint64_t threshold = (0ULL - n) % n;
      while (lo < threshold) {
        m = static_cast<unsigned __int128>(next_u64()) * static_cast<unsigned __int128>(n);
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  // Standard normal via the Marsaglia polar method.
  double next_gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * next_double() - 1.0;
      v = 2.0 * next_double() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

  // Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(next_below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  // k distinct values from [0, n), ascending.
  std::vector<int> sample_without_replacement(int n, int k) {
    std::vector<int> pool(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i;
    for (int i = 0; i < k; ++i) {
      const int j = i + static_cast<int>(next_below(static_cast<std::uint64_t>(n - i)));
      std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
    }
    pool.resize(static_cast<std::size_t>(k));
    std::sort(pool.begin(), pool.end());
    return pool;
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace cardio
