#pragma once

#include <bit>
#include <stdexcept>
#include <utility>
#include <vector>

#include "pcrf/semiring.hpp"

namespace pcrf {

/// Folds of contiguous ranges of a fixed value sequence. Row r of the table
/// holds the fold of every window of length 2^r, built by doubling. Queries
/// over min-plus use the classic two-overlapping-windows lookup; that needs an
/// idempotent plus, so every other semiring takes the disjoint greedy
/// decomposition into O(log N) windows instead.
template <SemiringLike S>
class IntervalFold {
 public:
  using value_type = typename S::value_type;

  IntervalFold() = default;

  explicit IntervalFold(std::vector<value_type> w) {
    if (w.empty()) return;
    rows_.push_back(std::move(w));
    // rows_[r][i] covers [i, i + 2^r); stop once a window spans everything
    for (int r = 1; (1u << r) <= rows_[0].size(); ++r) {
      const auto& prev = rows_[r - 1];
      int half = 1 << (r - 1);
      std::vector<value_type> row(prev.size() - half);
      for (size_t i = 0; i < row.size(); ++i) row[i] = S::plus(prev[i], prev[i + half]);
      rows_.push_back(std::move(row));
    }
  }

  int size() const { return rows_.empty() ? 0 : static_cast<int>(rows_[0].size()); }

  /// Fold over positions [i, j], 1-based inclusive.
  value_type fold(int i, int j) const {
    if (i < 1 || j > size() || i > j) throw std::out_of_range("interval fold outside [1, N]");
    unsigned len = static_cast<unsigned>(j - i + 1);
    if constexpr (std::is_same_v<S, MinPlus>) {
      int r = std::bit_width(len) - 1;
      return S::plus(rows_[r][i - 1], rows_[r][j - (1 << r)]);
    } else {
      value_type acc = S::zero();
      for (int pos = i - 1; len != 0;) {
        int r = std::bit_width(len) - 1;
        acc = S::plus(acc, rows_[r][pos]);
        pos += 1 << r;
        len -= 1u << r;
      }
      return acc;
    }
  }

 private:
  std::vector<std::vector<value_type>> rows_;
};

}  // namespace pcrf
