#pragma once

#include <cmath>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "pcrf/bank.hpp"
#include "pcrf/semiring.hpp"

namespace pcrf {

/// Brute-force reference implementations. Deliberately direct: every labeling
/// is enumerated and every (interval, word) occurrence is scanned. Inputs are
/// refused when |D|^n exceeds 2^20.

namespace oracle {

inline long long labeling_count(const PatternBank& bank) {
  long long total = 1;
  for (int s = 0; s < bank.n; ++s) {
    total *= bank.letters();
    if (total > (1ll << 20)) throw ModelError("oracle refuses models with |D|^n > 2^20");
  }
  return total;
}

/// Labeling for an enumeration index; index order equals lexicographic order.
inline Word labeling_of_index(const PatternBank& bank, long long idx) {
  Word x(bank.n);
  for (int s = bank.n - 1; s >= 0; --s) {
    x[s] = static_cast<int>(idx % bank.letters());
    idx /= bank.letters();
  }
  return x;
}

/// Direct evaluation of the labeling's cost: combine the cost of every
/// pattern occurrence inside x.
template <SemiringLike S>
typename S::value_type labeling_cost(const PatternBank& bank, const Word& x) {
  auto v = S::one();
  int n = static_cast<int>(x.size());
  for (int id = 0; id < bank.size(); ++id) {
    const Word& w = bank.word(id);
    int len = static_cast<int>(w.size());
    for (int start = 1; start + len - 1 <= n; ++start) {
      bool hit = true;
      for (int t = 0; t < len && hit; ++t) hit = x[start - 1 + t] == w[t];
      if (hit) v = S::times(v, pattern_cost<S>(bank, id, start + len - 1));
    }
  }
  return v;
}

template <SemiringLike S>
std::vector<typename S::value_type> enumerate_costs(const PatternBank& bank) {
  long long total = labeling_count(bank);
  std::vector<typename S::value_type> out(total);
  for (long long i = 0; i < total; ++i) out[i] = labeling_cost<S>(bank, labeling_of_index(bank, i));
  return out;
}

namespace detail {

// Compensated summation keeps the reference sums trustworthy at 1e-9 scales.
struct Kahan {
  long double sum = 0.0L, carry = 0.0L;
  void add(long double v) {
    long double y = v - carry;
    long double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

}  // namespace detail

template <SemiringLike S>
typename S::value_type brute_force_Z(const PatternBank& bank) {
  if constexpr (std::is_same_v<S, SumProduct>) {
    detail::Kahan acc;
    long long total = labeling_count(bank);
    for (long long i = 0; i < total; ++i)
      acc.add(labeling_cost<S>(bank, labeling_of_index(bank, i)));
    return static_cast<double>(acc.sum);
  } else {
    auto z = S::zero();
    long long total = labeling_count(bank);
    for (long long i = 0; i < total; ++i)
      z = S::plus(z, labeling_cost<S>(bank, labeling_of_index(bank, i)));
    return z;
  }
}

/// Sum of f over labelings whose substring at [i, i+|u|-1] equals u.
template <SemiringLike S>
typename S::value_type brute_force_interval_weight(const PatternBank& bank, const Word& u, int i) {
  long long total = labeling_count(bank);
  detail::Kahan acc;
  auto z = S::zero();
  for (long long idx = 0; idx < total; ++idx) {
    Word x = labeling_of_index(bank, idx);
    bool hit = true;
    for (std::size_t t = 0; t < u.size() && hit; ++t) hit = x[i - 1 + t] == u[t];
    if (!hit) continue;
    if constexpr (std::is_same_v<S, SumProduct>)
      acc.add(labeling_cost<S>(bank, x));
    else
      z = S::plus(z, labeling_cost<S>(bank, x));
  }
  if constexpr (std::is_same_v<S, SumProduct>) return static_cast<double>(acc.sum);
  return z;
}

/// One positioned word with its summed weight over all labelings containing
/// it there. `start` is 1-based.
struct PositionedWeight {
  std::string word;
  int start;
  double weight;
};

/// Weights Z(u at [i, j]) for every positioned word that extends leftward to
/// some bank occurrence's suffix and rightward to some bank occurrence's
/// prefix. Candidate placements are derived straight from the bank: u must be
/// a suffix of a bank word no longer than j and a prefix of one fitting
/// before position n+1.
inline std::vector<PositionedWeight> brute_force_marginals(const PatternBank& bank) {
  std::vector<PositionedWeight> out;
  std::set<Word> candidates;
  for (int g = 0; g < bank.size(); ++g) {
    const Word& w = bank.word(g);
    for (std::size_t a = 0; a < w.size(); ++a) candidates.insert(Word(w.begin() + a, w.end()));
  }
  for (const Word& u : candidates) {
    int len = static_cast<int>(u.size());
    for (int i = 1; i + len - 1 <= bank.n; ++i) {
      int j = i + len - 1;
      bool left = false, right = false;
      for (int g = 0; g < bank.size() && !(left && right); ++g) {
        const Word& w = bank.word(g);
        int m = static_cast<int>(w.size());
        if (m < len) continue;
        if (m <= j && std::equal(u.begin(), u.end(), w.end() - len)) left = true;
        if (m <= bank.n - i + 1 && std::equal(u.begin(), u.end(), w.begin())) right = true;
      }
      if (left && right)
        out.push_back({bank.spell(u), i, brute_force_interval_weight<SumProduct>(bank, u, i)});
    }
  }
  return out;
}

/// Minimum total energy and its lexicographically smallest witness.
inline std::pair<double, Word> brute_force_map(const PatternBank& bank) {
  long long total = labeling_count(bank);
  double best = std::numeric_limits<double>::infinity();
  Word arg;
  for (long long i = 0; i < total; ++i) {
    Word x = labeling_of_index(bank, i);
    double e = labeling_cost<MinPlus>(bank, x);
    if (e < best) {
      best = e;
      arg = std::move(x);
    }
  }
  return {best, arg};
}

}  // namespace oracle
}  // namespace pcrf
