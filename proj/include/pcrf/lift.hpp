#pragma once

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <utility>
#include <vector>

#include "pcrf/bank.hpp"
#include "pcrf/interval_sum.hpp"
#include "pcrf/pattern_system.hpp"
#include "pcrf/semiring.hpp"

namespace pcrf {

/// Subtree and path folds over one layer forest, built from a full vector of
/// per-node messages. W(v) folds the messages of v's whole subtree. V(a, b),
/// for b a strict descendant of a, folds exactly the messages counted in W(a)
/// but not in W(b); it is assembled from parent-edge values (the parent's own
/// message plus the subtree folds of the other children) composed along the
/// path by power-of-two jump pointers. child_fold answers range folds of W
/// over a node's ordered children.
template <SemiringLike S>
class LayerLift {
 public:
  using value_type = typename S::value_type;

  LayerLift(const Layer& layer, std::vector<value_type> m) : layer_(&layer), m_(std::move(m)) {
    int nn = layer.size();
    PCRF_CHECK(static_cast<int>(m_.size()) == nn, "one message per layer node");
    w_.resize(nn);
    for (int v = nn - 1; v >= 0; --v) {  // children precede parents in reverse preorder
      w_[v] = m_[v];
      for (int c : layer.children[v]) w_[v] = S::plus(w_[v], w_[c]);
    }
    folds_.resize(nn);
    int maxd = 0;
    for (int v = 0; v < nn; ++v) maxd = std::max(maxd, layer.depth[v]);
    int levels = maxd > 0 ? std::bit_width(static_cast<unsigned>(maxd)) : 0;
    up_.assign(levels, std::vector<int>(nn, -1));
    hop_.assign(levels, std::vector<value_type>(nn, S::zero()));
    std::vector<value_type> cw, pre, suf;
    for (int v = 0; v < nn; ++v) {
      const auto& kids = layer.children[v];
      if (kids.empty()) continue;
      cw.resize(kids.size());
      pre.assign(kids.size() + 1, S::zero());
      suf.assign(kids.size() + 1, S::zero());
      for (size_t i = 0; i < kids.size(); ++i) {
        cw[i] = w_[kids[i]];
        pre[i + 1] = S::plus(pre[i], cw[i]);
      }
      for (size_t i = kids.size(); i-- > 0;) suf[i] = S::plus(suf[i + 1], cw[i]);
      for (size_t i = 0; i < kids.size(); ++i) {
        up_[0][kids[i]] = v;
        hop_[0][kids[i]] = S::plus(m_[v], S::plus(pre[i], suf[i + 1]));
      }
      folds_[v] = IntervalFold<S>(cw);
    }
    for (int r = 1; r < levels; ++r)
      for (int v = 0; v < nn; ++v) {
        int mid = up_[r - 1][v];
        if (mid < 0) continue;
        up_[r][v] = up_[r - 1][mid];
        if (up_[r][v] >= 0) hop_[r][v] = S::plus(hop_[r - 1][mid], hop_[r - 1][v]);
      }
  }

  const Layer& layer() const { return *layer_; }
  const std::vector<value_type>& messages() const { return m_; }
  const value_type& W(int v) const { return w_[v]; }

  /// Fold of W over children lo..hi of v, 1-based inclusive in trie order.
  value_type child_fold(int v, int lo, int hi) const { return folds_[v].fold(lo, hi); }

  /// Fold of the messages under `anc` but not under `desc`. `desc` must be a
  /// strict descendant of `anc` within the layer forest.
  value_type V(int anc, int desc) const {
    const Layer& la = *layer_;
    if (anc < 0 || desc < 0 || desc >= la.size() || desc <= anc ||
        desc >= la.nodes[anc].subtree_end)
      throw std::invalid_argument("path fold requires a strict descendant");
    unsigned diff = static_cast<unsigned>(la.depth[desc] - la.depth[anc]);
    value_type acc = S::zero();
    int cur = desc;
    for (int r = 0; diff != 0; ++r, diff >>= 1)
      if (diff & 1u) {
        acc = S::plus(acc, hop_[r][cur]);
        cur = up_[r][cur];
      }
    PCRF_CHECK(cur == anc, "jump pointers land on the ancestor");
    return acc;
  }

 private:
  const Layer* layer_;
  std::vector<value_type> m_, w_;
  std::vector<IntervalFold<S>> folds_;
  std::vector<std::vector<int>> up_;
  std::vector<std::vector<value_type>> hop_;
};

}  // namespace pcrf
