#pragma once

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace intgeo {

// Thrown when a sampled group element fails post-hoc certification.
struct certification_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

constexpr int kMaxDim = 8;

constexpr std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::uint64_t r = 1;
  for (int i = 0; i < k; ++i) r = r * static_cast<std::uint64_t>(n - i) / static_cast<std::uint64_t>(i + 1);
  return r;
}

// Volume of the k-dimensional unit ball.
inline double unit_ball_volume(int k) {
  if (k < 0) throw std::invalid_argument("unit_ball_volume: negative dimension");
  return std::pow(std::numbers::pi, k / 2.0) / std::tgamma(k / 2.0 + 1.0);
}

// Surface area of the (k-1)-sphere in R^k.
inline double unit_sphere_area(int k) { return k * unit_ball_volume(k); }

// Neumaier compensated accumulator; MC reductions sum millions of terms.
class CompensatedSum {
 public:
  void add(double x) {
    double t = s_ + x;
    if (std::abs(s_) >= std::abs(x))
      c_ += (s_ - t) + x;
    else
      c_ += (x - t) + s_;
    s_ = t;
  }
  double value() const { return s_ + c_; }

 private:
  double s_ = 0.0, c_ = 0.0;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Stream-split rule: child stream i of a master seed. Used for worker/stratum
// RNGs so that results do not depend on scheduling.
inline std::uint64_t split_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(master ^ splitmix64(index + 1));
}

// ---- subset/bitmask combinatorics for alternating forms (n <= 8) ----

namespace detail {

struct SubsetTable {
  std::vector<std::uint8_t> masks;       // masks of the given popcount, increasing
  std::array<int, 256> rank;             // mask -> index in `masks` (or -1)
};

inline const SubsetTable& subset_table(int n, int k) {
  static std::array<std::array<SubsetTable, kMaxDim + 1>, kMaxDim + 1> tables = [] {
    std::array<std::array<SubsetTable, kMaxDim + 1>, kMaxDim + 1> t{};
    for (int n = 0; n <= kMaxDim; ++n)
      for (int k = 0; k <= kMaxDim; ++k) {
        auto& tab = t[n][k];
        tab.rank.fill(-1);
        for (int m = 0; m < (1 << n); ++m)
          if (std::popcount(static_cast<unsigned>(m)) == k) {
            tab.rank[m] = static_cast<int>(tab.masks.size());
            tab.masks.push_back(static_cast<std::uint8_t>(m));
          }
      }
    return t;
  }();
  if (n < 0 || n > kMaxDim || k < 0 || k > kMaxDim) throw std::invalid_argument("subset_table: out of range");
  return tables[n][k];
}

// Sign of the shuffle merging disjoint index sets A and B into sorted order:
// (-1)^{#{(a,b) in A x B : a > b}}.
inline int merge_sign(unsigned a, unsigned b) {
  int inv = 0;
  while (b) {
    unsigned low = b & (~b + 1);                   // lowest set bit of b
    inv += std::popcount(a & ~((low << 1) - 1));   // bits of a strictly above it
    b ^= low;
  }
  return (inv % 2) ? -1 : 1;
}

}  // namespace detail

}  // namespace intgeo
