#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace edrisk {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent per-entity stream seed, so generation order never depends on
// scheduling.
inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(seed ^ splitmix64(stream));
}

// mt19937_64 is fully specified by the standard; the draw helpers are
// hand-rolled because std:: distributions are implementation-defined and
// would break cross-compiler reproducibility of generated cohorts.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Unbiased integer in [0, n) via rejection.
  std::uint64_t below(std::uint64_t n) {
    assert(n > 0);
    const std::uint64_t limit = ~0ULL / n * n;
    std::uint64_t v;
    do {
      v = gen_();
    } while (v >= limit);
    return v % n;
  }

  // Inclusive range.
  long long range(long long lo, long long hi) {
    assert(lo <= hi);
    return lo + static_cast<long long>(below(static_cast<std::uint64_t>(hi - lo + 1)));
  }

  // Uniform in [0, 1).
  double unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return unit() < p; }

  // Geometric count >= 0 with the given mean (0 when mean <= 0).
  long long geometric_count(double mean) {
    if (mean <= 0.0) return 0;
    const double p = 1.0 / (1.0 + mean);
    const double u = unit();
    return static_cast<long long>(std::floor(std::log1p(-u) / std::log1p(-p)));
  }

  // Index draw against a cumulative weight table (last entry = total mass).
  std::size_t weighted(std::span<const double> cumulative) {
    assert(!cumulative.empty());
    const double u = unit() * cumulative.back();
    std::size_t lo = 0, hi = cumulative.size() - 1;
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (cumulative[mid] <= u)
        lo = mid + 1;
      else
        hi = mid;
    }
    return lo;
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace edrisk
