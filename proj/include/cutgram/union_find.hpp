#pragma once

#include <cstddef>
#include <numeric>
#include <vector>

namespace cutgram {

/// Disjoint sets over 0..n-1. The root of each set is its smallest element,
/// which makes class representatives independent of merge order.
class UnionFind {
 public:
  explicit UnionFind(std::size_t n = 0) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }

  std::size_t size() const noexcept { return parent_.size(); }

  std::size_t find(std::size_t x) {
    std::size_t root = x;
    while (parent_[root] != root) root = parent_[root];
    while (parent_[x] != root) {
      std::size_t next = parent_[x];
      parent_[x] = root;
      x = next;
    }
    return root;
  }

  /// Returns the surviving root, or `size()` if x and y were already joined.
  std::size_t unite(std::size_t x, std::size_t y) {
    x = find(x);
    y = find(y);
    if (x == y) return size();
    if (y < x) std::swap(x, y);
    parent_[y] = x;
    return x;
  }

  bool same(std::size_t x, std::size_t y) { return find(x) == find(y); }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace cutgram
