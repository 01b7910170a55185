#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "pcrf/bank.hpp"
#include "pcrf/inference_ring.hpp"
#include "pcrf/pattern_system.hpp"

namespace pcrf {

/// Counter-based generator: the k-th output mixes seed + k with splitmix64,
/// so independent streams need only distinct seeds and a stream can be
/// replayed or split without shared mutable state.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t start = 0) : key_(seed), ctr_(start) {}

  std::uint64_t next() {
    std::uint64_t z = key_ + ctr_++ * 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Uniform draw from [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t key_, ctr_;
};

/// Walker/Vose table for weighted index draws: one uniform picks a slot, a
/// second settles slot versus alias, so a draw costs O(1) after the O(N)
/// build. Index i is returned with probability w_i / sum(w).
class AliasTable {
 public:
  AliasTable() = default;

  explicit AliasTable(const std::vector<double>& w) : prob_(w.size()), alias_(w.size(), 0) {
    double total = 0;
    for (double v : w) {
      PCRF_CHECK(v >= 0 && std::isfinite(v), "alias weights must be finite and non-negative");
      total += v;
    }
    if (!(total > 0)) throw ModelError("discrete draw has no mass");
    int n = static_cast<int>(w.size());
    int any_pos = 0;
    while (w[any_pos] == 0.0) ++any_pos;
    std::vector<double> scaled(n);
    std::vector<int> small, large;
    for (int i = 0; i < n; ++i) {
      scaled[i] = w[i] * n / total;
      (scaled[i] < 1.0 ? small : large).push_back(i);
    }
    while (!small.empty() && !large.empty()) {
      int s = small.back(), l = large.back();
      small.pop_back();
      prob_[s] = scaled[s];
      alias_[s] = l;
      scaled[l] -= 1.0 - scaled[s];
      if (scaled[l] < 1.0) {
        large.pop_back();
        small.push_back(l);
      }
    }
    // leftovers are 1 up to rounding, except that a zero-mass slot stays
    // unselectable and must not alias to another zero slot
    for (int i : large) prob_[i] = 1.0;
    for (int i : small) {
      prob_[i] = w[i] == 0.0 ? 0.0 : 1.0;
      if (w[i] == 0.0) alias_[i] = any_pos;
    }
  }

  int size() const { return static_cast<int>(prob_.size()); }
  bool empty() const { return prob_.empty(); }

  int draw(CounterRng& rng) const {
    int i = std::min(size() - 1, static_cast<int>(rng.uniform() * size()));
    return rng.uniform() < prob_[i] ? i : alias_[i];
  }

 private:
  std::vector<double> prob_;
  std::vector<int> alias_;
};

/// Node set one sampling step draws from, as preorder index intervals of the
/// previous layer: the subtree of the dropped pattern minus the dropped
/// subtrees of its extension children. Intervals are disjoint and ascending.
struct DeltaPlan {
  std::vector<std::pair<int, int>> ranges;  // [lo, hi) node intervals
  int count = 0;
};

/// Per-layer table of DeltaPlans for every non-empty pattern, with the
/// counting identity (the plans of layer s+1 cover layer s exactly |D| times
/// over) checked at build time.
class DeltaIndex {
 public:
  explicit DeltaIndex(const PatternCore& core) : core_(&core) {
    PCRF_CHECK(core.variant() == Variant::Prefixes, "sampling runs on the prefix system");
    plans_.resize(core.n() + 1);
    for (int s_next = 1; s_next <= core.n(); ++s_next) {
      const Layer& next = core.layer(s_next);
      const Layer& prev = core.layer(s_next - 1);
      plans_[s_next].resize(next.size());
      long long covered = 0;
      for (int v = 0; v < next.size(); ++v) {
        if (v == next.epsilon_node) continue;
        DeltaPlan& plan = plans_[s_next][v];
        int top = drop_node(s_next, next.nodes[v].word);
        std::vector<std::pair<int, int>> holes;
        for (int c : next.children[v]) {
          int h = drop_node(s_next, next.nodes[c].word);
          holes.emplace_back(h, prev.nodes[h].subtree_end);
        }
        std::sort(holes.begin(), holes.end());
        int at = top;
        for (auto [lo, hi] : holes) {
          PCRF_CHECK(at <= lo && hi <= prev.nodes[top].subtree_end,
                     "dropped child subtrees nest inside the dropped pattern's");
          if (at < lo) plan.ranges.emplace_back(at, lo);
          at = hi;
        }
        if (at < prev.nodes[top].subtree_end)
          plan.ranges.emplace_back(at, prev.nodes[top].subtree_end);
        for (auto [lo, hi] : plan.ranges) plan.count += hi - lo;
        covered += plan.count;
      }
      PCRF_CHECK(covered == static_cast<long long>(prev.size()) * core.bank().letters(),
                 "step candidates cover the previous layer once per letter");
    }
  }

  const PatternCore& core() const { return *core_; }

  /// Plan for the pattern at `node` of layer `s_next`, drawing over layer
  /// s_next - 1. Undefined for the empty pattern.
  const DeltaPlan& plan(int s_next, int node) const { return plans_[s_next][node]; }

 private:
  int drop_node(int s_next, int word) const {
    int v = core_->node_in(s_next - 1, core_->prefix_link(word));
    PCRF_CHECK(v >= 0, "dropped patterns stay in the previous layer");
    return v;
  }

  const PatternCore* core_;
  std::vector<std::vector<DeltaPlan>> plans_;
};

/// Exact sampler for p(x) = f(x) / Z over the real field. A draw picks the
/// final layer's class proportionally to its message, then walks the chain
/// backward drawing each shorter class from the current plan, and reads the
/// labeling off the class words' last letters. `direct` rescans messages
/// every step; the alias modes draw each step in O(1), building tables on
/// first use or all upfront. The shared state is immutable after warm-up, so
/// threads may draw concurrently with their own generators once tables exist
/// (the precomputed mode guarantees that from the start).
class Sampler {
 public:
  enum class Mode { direct, alias, alias_precomputed };

  explicit Sampler(const PatternBank& bank, Mode mode = Mode::alias)
      : sys_(bank), deltas_(sys_.core), mode_(mode) {
    for (int s = 1; s <= sys_.core.n(); ++s) {
      const auto& c = sys_.model.tables(s).c;
      for (double v : c)
        if (!(v > 0) || !std::isfinite(v))
          throw ModelError("sampling requires strictly positive pattern costs");
    }
    if (mode_ != Mode::direct) {
      steps_.resize(sys_.core.n() + 1);
      top_ = AliasTable(sys_.messages.M(sys_.core.n()));
      if (mode_ == Mode::alias_precomputed)
        for (int s_next = 2; s_next <= sys_.core.n(); ++s_next) {
          const Layer& next = sys_.core.layer(s_next);
          steps_[s_next].resize(next.size());
          for (int v = 0; v < next.size(); ++v)
            if (v != next.epsilon_node) build_step(s_next, v);
        }
    }
  }

  const ChainSystem<SumProduct>& system() const { return sys_; }
  const DeltaIndex& deltas() const { return deltas_; }

  /// One labeling distributed as f(x) / Z.
  Word draw(CounterRng& rng) const {
    const PatternCore& core = sys_.core;
    int n = core.n();
    Word x(n);
    int node = mode_ == Mode::direct ? draw_direct(n, nullptr, rng) : top_.draw(rng);
    x[n - 1] = core.last_letter(core.layer(n).nodes[node].word);
    for (int s = n - 1; s >= 1; --s) {
      const DeltaPlan& plan = deltas_.plan(s + 1, node);
      if (mode_ == Mode::direct) {
        node = draw_direct(s, &plan, rng);
      } else {
        if (steps_[s + 1].empty()) steps_[s + 1].resize(core.layer(s + 1).size());
        StepTable& st = steps_[s + 1][node];
        if (st.table.empty()) build_step(s + 1, node);
        node = st.nodes[st.table.draw(rng)];
      }
      x[s - 1] = core.last_letter(core.layer(s).nodes[node].word);
    }
    return x;
  }

 private:
  struct StepTable {
    AliasTable table;
    std::vector<int> nodes;  // flattened plan, aligned with table indices
  };

  // linear scan over the candidate messages; plan == nullptr means the whole
  // final layer
  int draw_direct(int s, const DeltaPlan* plan, CounterRng& rng) const {
    const auto& m = sys_.messages.M(s);
    auto each = [&](auto&& fn) {
      if (plan == nullptr) {
        for (int v = 0; v < static_cast<int>(m.size()); ++v) fn(v);
      } else {
        for (auto [lo, hi] : plan->ranges)
          for (int v = lo; v < hi; ++v) fn(v);
      }
    };
    double total = 0;
    each([&](int v) { total += m[v]; });
    if (!(total > 0)) throw ModelError("no labeling mass remains at a sampling step");
    double u = rng.uniform() * total;
    int hit = -1;
    each([&](int v) {
      if (hit < 0 && (u -= m[v]) < 0) hit = v;
    });
    if (hit < 0) each([&](int v) {  // rounding pushed u past the end
      if (m[v] > 0) hit = v;
    });
    return hit;
  }

  void build_step(int s_next, int node) const {
    const DeltaPlan& plan = deltas_.plan(s_next, node);
    const auto& m = sys_.messages.M(s_next - 1);
    StepTable& st = steps_[s_next][node];
    st.nodes.reserve(plan.count);
    std::vector<double> w;
    w.reserve(plan.count);
    for (auto [lo, hi] : plan.ranges)
      for (int v = lo; v < hi; ++v) {
        st.nodes.push_back(v);
        w.push_back(m[v]);
      }
    st.table = AliasTable(w);
  }

  ChainSystem<SumProduct> sys_;
  DeltaIndex deltas_;
  Mode mode_;
  mutable std::vector<std::vector<StepTable>> steps_;  // [s_next][node]
  AliasTable top_;
};

}  // namespace pcrf
