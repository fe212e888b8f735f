#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace evonet {

namespace detail {

// splitmix64 finalizer; used both as an engine seeder and as a mixing step
// when deriving child stream seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace detail

// Derives a child seed from a parent seed and a path of tags. Streams built
// from distinct paths are statistically independent, which is what the
// per-layer / per-generation / per-individual stream scheme relies on.
inline std::uint64_t derive_seed(std::uint64_t seed) { return detail::splitmix64(seed); }

template <typename... Tags>
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag, Tags... rest) {
  return derive_seed(detail::splitmix64(seed ^ detail::splitmix64(tag)), rest...);
}

// Seeded random stream with hand-rolled draw helpers so that results are
// reproducible across standard library implementations.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(detail::splitmix64(seed ^ 0xda3e39cb94b95bdbULL)) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1).
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Uniform integer on [lo, hi] inclusive.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const auto span = static_cast<double>(hi - lo + 1);
    auto v = lo + static_cast<std::int64_t>(uniform01() * span);
    return std::min(v, hi);
  }

  bool coin(double p = 0.5) { return uniform01() < p; }

  // Standard normal via Box-Muller (no cached spare, two uniforms per draw).
  double normal() {
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(uniform_int(0, static_cast<std::int64_t>(i) - 1));
      std::swap(v[i - 1], v[j]);
    }
  }

  // n indices drawn without replacement from [0, pool), in draw order.
  std::vector<Eigen::Index> sample_without_replacement(Eigen::Index pool, Eigen::Index n) {
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(pool));
    for (Eigen::Index i = 0; i < pool; ++i) idx[static_cast<std::size_t>(i)] = i;
    const Eigen::Index take = std::min(n, pool);
    for (Eigen::Index i = 0; i < take; ++i) {
      const auto j = uniform_int(i, pool - 1);
      std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
    }
    idx.resize(static_cast<std::size_t>(take));
    return idx;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace evonet
