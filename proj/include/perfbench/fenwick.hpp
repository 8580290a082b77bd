#pragma once

#include <cstdint>
#include <vector>

namespace perfbench {

/// Binary indexed tree over counts, 1-based positions.
class FenwickTree {
 public:
  explicit FenwickTree(std::size_t n) : tree_(n + 1, 0) {}

  void add(std::size_t pos, std::int64_t delta) {
    for (; pos < tree_.size(); pos += pos & (~pos + 1)) tree_[pos] += delta;
  }

  // sum of counts at positions [1, pos]
  std::int64_t prefix_sum(std::size_t pos) const {
    std::int64_t s = 0;
    for (; pos > 0; pos -= pos & (~pos + 1)) s += tree_[pos];
    return s;
  }

 private:
  std::vector<std::int64_t> tree_;
};

}  // namespace perfbench
