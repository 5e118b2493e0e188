#pragma once

#include <cstdint>
#include <vector>
#include <array>
#include <stdexcept>
#include <algorithm>

#include <boost/multiprecision/cpp_int.hpp>

namespace hypercc {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline BigInt big_binomial(long n, long k) {
  if (k < 0 || k > n || n < 0) return 0;
  k = std::min(k, n - k);
  BigInt r = 1;
  for (long i = 1; i <= k; ++i) {
    r *= (n - k + i);
    r /= i;
  }
  return r;
}

inline BigInt big_factorial(long n) {
  BigInt r = 1;
  for (long i = 2; i <= n; ++i) r *= i;
  return r;
}

inline BigInt big_pow(BigInt base, long e) {
  BigInt r = 1;
  while (e-- > 0) r *= base;
  return r;
}

// Small binomial table for subset ranking; values fit in 64 bits for the
// sizes used by observation storage (n <= ~2000 at r <= 3).
class BinomTable {
 public:
  BinomTable() = default;
  BinomTable(int n, int k) : n_(n), k_(k), c_((n + 1) * (k + 1), 0) {
    for (int i = 0; i <= n; ++i) {
      at(i, 0) = 1;
      for (int j = 1; j <= std::min(i, k); ++j) {
        at(i, j) = at(i - 1, j - 1) + (i - 1 >= j ? at(i - 1, j) : 0);
      }
    }
  }
  uint64_t operator()(int n, int k) const {
    if (k < 0 || k > n || n < 0) return 0;
    return c_[size_t(n) * (k_ + 1) + k];
  }

 private:
  uint64_t& at(int n, int k) { return c_[size_t(n) * (k_ + 1) + k]; }
  int n_ = 0, k_ = 0;
  std::vector<uint64_t> c_;
};

// Colexicographic rank of a strictly increasing tuple v[0] < ... < v[r-1]
// of 0-based vertex ids: rank = sum_i C(v[i], i+1).
inline uint64_t colex_rank(const std::vector<int>& v, const BinomTable& bt) {
  uint64_t r = 0;
  for (size_t i = 0; i < v.size(); ++i) r += bt(v[i], int(i) + 1);
  return r;
}

inline void colex_unrank(uint64_t rank, int r, std::vector<int>& out,
                         const BinomTable& bt) {
  out.assign(r, 0);
  for (int i = r; i >= 1; --i) {
    int v = i - 1;
    while (bt(v + 1, i) <= rank) ++v;
    out[i - 1] = v;
    rank -= bt(v, i);
  }
}

// Sorted r-multiset (i_1 <= ... <= i_r) maps to the strictly increasing
// tuple j_t = i_t + t - 1, ranked colexicographically among r-subsets of
// [n + r - 1].
inline uint64_t multiset_rank(const std::vector<int>& v, const BinomTable& bt) {
  uint64_t r = 0;
  for (size_t i = 0; i < v.size(); ++i) r += bt(v[i] + int(i), int(i) + 1);
  return r;
}

// Visit all strictly increasing r-tuples over {0,...,n-1}.
template <typename F>
void for_each_subset(int n, int r, F&& f) {
  if (r > n || r < 0) return;
  std::vector<int> v(r);
  for (int i = 0; i < r; ++i) v[i] = i;
  while (true) {
    f(const_cast<const std::vector<int>&>(v));
    int i = r - 1;
    while (i >= 0 && v[i] == n - r + i) --i;
    if (i < 0) break;
    ++v[i];
    for (int j = i + 1; j < r; ++j) v[j] = v[j - 1] + 1;
  }
}

// Visit all sorted r-multisets over {0,...,n-1}.
template <typename F>
void for_each_multiset(int n, int r, F&& f) {
  if (n <= 0 || r < 0) return;
  std::vector<int> v(r, 0);
  while (true) {
    f(const_cast<const std::vector<int>&>(v));
    int i = r - 1;
    while (i >= 0 && v[i] == n - 1) --i;
    if (i < 0) break;
    ++v[i];
    for (int j = i + 1; j < r; ++j) v[j] = v[i];
  }
}

// Visit all submasks of mask (including 0 and mask itself).
template <typename F>
void for_each_submask(uint32_t mask, F&& f) {
  uint32_t sub = mask;
  while (true) {
    f(sub);
    if (sub == 0) break;
    sub = (sub - 1) & mask;
  }
}

inline int popcount32(uint32_t x) { return __builtin_popcount(x); }

// Enumerate masks over [k] with a fixed popcount, ascending.
inline std::vector<uint32_t> masks_with_popcount(int k, int c) {
  std::vector<uint32_t> out;
  for (uint32_t m = 0; m < (1u << k); ++m)
    if (popcount32(m) == c) out.push_back(m);
  return out;
}

}  // namespace hypercc
