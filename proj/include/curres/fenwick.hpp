#pragma once

#include <bit>
#include <cstdint>
#include <vector>

namespace curres {

/// Binary indexed tree over positions 0..n-1 with point updates, prefix sums
/// and order-statistic search, all O(log n).
template <typename T>
class FenwickTree {
 public:
  explicit FenwickTree(int n = 0) : tree_(n + 1), n_(n) {}

  int size() const noexcept { return n_; }

  void add(int pos, T delta) noexcept {
    for (++pos; pos <= n_; pos += pos & -pos) tree_[pos] += delta;
  }

  /// Sum over positions [0, pos]; pos = -1 gives 0.
  T prefix(int pos) const noexcept {
    T res{};
    for (++pos; pos > 0; pos -= pos & -pos) res += tree_[pos];
    return res;
  }

  /// Smallest pos with prefix(pos) >= value, or n when the total is below
  /// value. Requires non-negative entries.
  int lower_bound(T value) const noexcept {
    int pos = 0;
    for (int step = std::bit_floor(static_cast<std::uint32_t>(n_ > 0 ? n_ : 1)); step > 0;
         step >>= 1) {
      if (int next = pos + step; next <= n_ && tree_[next] < value) {
        pos = next;
        value -= tree_[next];
      }
    }
    return pos;
  }

 private:
  std::vector<T> tree_;
  int n_;
};

}  // namespace curres
