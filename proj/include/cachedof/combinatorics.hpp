#pragma once

#include <bit>
#include <cassert>
#include <cstdint>
#include <vector>

namespace cachedof {

inline std::int64_t binomial(int n, int k) {
  assert(n >= 0 && k >= 0);
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::int64_t r = 1;
  for (int i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;  // exact: r*(n-k+i) is divisible by i here
  }
  return r;
}

using Mask = std::uint32_t;

inline int popcount(Mask m) { return std::popcount(m); }

// All k-subsets of {0,..,n-1} as bitmasks in ascending numeric order
// (colex order on element lists).
inline std::vector<Mask> subsets_of_size(int n, int k) {
  assert(n >= 0 && k >= 0 && n < 31);
  std::vector<Mask> out;
  if (k > n) return out;
  out.reserve(static_cast<std::size_t>(binomial(n, k)));
  if (k == 0) {
    out.push_back(0u);
    return out;
  }
  Mask full = (1u << n) - 1u;
  Mask m = (1u << k) - 1u;
  while (m <= full) {
    out.push_back(m);
    Mask c = m & (0u - m);  // Gosper: next pattern with equal popcount
    Mask r = m + c;
    if (r > full) break;
    m = (((r ^ m) >> 2) / c) | r;
  }
  return out;
}

inline std::vector<int> mask_to_list(Mask m) {
  std::vector<int> v;
  while (m) {
    v.push_back(std::countr_zero(m));
    m &= m - 1;
  }
  return v;
}

// Rank of `m` within subsets_of_size(n, popcount(m)):
// colex rank = sum_i C(e_i, i+1) over elements e_0 < e_1 < ...
inline std::int64_t subset_rank(Mask m) {
  std::int64_t rank = 0;
  int i = 0;
  while (m) {
    rank += binomial(std::countr_zero(m), i + 1);
    m &= m - 1;
    ++i;
  }
  return rank;
}

}  // namespace cachedof
