#pragma once

#include <map>
#include <vector>

#include "pcrf/bank.hpp"
#include "pcrf/lift.hpp"
#include "pcrf/pattern_system.hpp"
#include "pcrf/semiring.hpp"

namespace pcrf {

/// Skeleton of one extended layer with respect to its distinguished nodes,
/// the members and the occurrence words. kSpecial marks distinguished nodes
/// and every branch point whose subtree meets them through two or more
/// children; kLink nodes see them through exactly one child and record the
/// first special node below as `down`; kBare subtrees miss them entirely.
/// The special nodes form a tree under nearest-special-ancestor links whose
/// size is at most twice the distinguished count, so a chain step can fold
/// whole bare subtrees and link paths without visiting them.
struct SpecialLayer {
  enum Kind : unsigned char { kBare, kLink, kSpecial };

  std::vector<Kind> kind;
  std::vector<int> down;            // kLink only: nearest special strict descendant
  std::vector<int> special_parent;  // nearest special strict ancestor, -1 at a root
  std::vector<int> specials;        // special nodes in layer preorder
  int distinguished = 0;
};

inline SpecialLayer build_special_layer(const Layer& layer) {
  int nn = layer.size();
  SpecialLayer out;
  out.kind.assign(nn, SpecialLayer::kBare);
  out.down.assign(nn, -1);
  out.special_parent.assign(nn, -1);
  std::vector<char> meets(nn, 0);
  for (int v = nn - 1; v >= 0; --v) {
    bool marked = layer.nodes[v].in_pi || layer.nodes[v].in_gamma;
    if (marked) ++out.distinguished;
    int hits = 0, via = -1;
    for (int c : layer.children[v])
      if (meets[c]) {
        ++hits;
        via = c;
      }
    meets[v] = marked || hits > 0;
    if (marked || hits >= 2)
      out.kind[v] = SpecialLayer::kSpecial;
    else if (hits == 1) {
      out.kind[v] = SpecialLayer::kLink;
      out.down[v] = out.kind[via] == SpecialLayer::kSpecial ? via : out.down[via];
    }
  }
  for (int v = 0; v < nn; ++v) {
    int p = layer.nodes[v].parent;
    if (p >= 0)
      out.special_parent[v] =
          out.kind[p] == SpecialLayer::kSpecial ? p : out.special_parent[p];
    if (out.kind[v] == SpecialLayer::kSpecial) out.specials.push_back(v);
  }
  PCRF_CHECK(static_cast<int>(out.specials.size()) <= 2 * out.distinguished - 1,
             "special skeleton exceeds twice the distinguished count");
  return out;
}

/// Chain messages over proper-prefix layers for an arbitrary semiring. Step s
/// extends every member of layer s-1 by one letter and folds the resulting
/// extended forest leaf to root, so each message again holds the fold over
/// one longest-suffix class; the layer-s messages are the restriction to the
/// member nodes, and the final value folds the whole last layer. `basic`
/// walks every extended node; `fast` visits only the special skeleton,
/// reading bare subtrees and link paths through subtree, range, and path
/// folds of the previous layer. Both modes produce the same values; rings
/// with large dynamic range are better served by the rescaled ring chain.
template <SemiringLike S>
class SemiringChain {
 public:
  using value_type = typename S::value_type;
  enum class Mode { basic, fast };

  explicit SemiringChain(const PatternBank& bank, Mode mode = Mode::fast)
      : core_(bank, Variant::ProperPrefixes), model_(core_) {
    m_.resize(core_.n() + 1);
    m_[0] = {S::one()};
    if (mode == Mode::basic)
      run_basic();
    else
      run_fast();
    z_ = S::zero();
    for (const auto& val : m_[core_.n()]) z_ = S::plus(z_, val);
  }

  const PatternCore& core() const { return core_; }
  const CostModel<S>& model() const { return model_; }
  value_type partition() const { return z_; }

  /// Messages of layer s, indexed by layer node.
  const std::vector<value_type>& M(int s) const { return m_[s]; }

  /// Extended-layer messages at step s, recomputed by the direct fold.
  std::vector<value_type> extended_messages(int s) const {
    std::vector<value_type> out;
    basic_step(s, out);
    return out;
  }

 private:
  int drop_node(int s, int word) const {
    int v = core_.node_in(s - 1, core_.prefix_link(word));
    PCRF_CHECK(v >= 0, "every extended word shortens into the previous layer");
    return v;
  }

  void restrict_to_layer(int s, const std::vector<value_type>& ext_m) {
    const Layer& ext = core_.extended_layer(s);
    const Layer& base = core_.layer(s);
    auto& out = m_[s];
    out.resize(base.size());
    for (int u = 0; u < base.size(); ++u) {
      int v = ext.node_of_word[base.nodes[u].word];
      PCRF_CHECK(v >= 0, "member words appear in the extended layer");
      out[u] = ext_m[v];
    }
  }

  void basic_step(int s, std::vector<value_type>& mhat) const {
    const Layer& ext = core_.extended_layer(s);
    const auto& phi = model_.extended_tables(s).phi;
    mhat.assign(ext.size(), S::zero());
    for (int v = ext.size() - 1; v >= 0; --v) {
      value_type inner =
          v == ext.epsilon_node ? S::zero() : m_[s - 1][drop_node(s, ext.nodes[v].word)];
      mhat[v] = S::times(phi[v], inner);
      // non-member children fold into the nearest member above them
      for (int c : ext.children[v])
        if (!ext.nodes[c].in_pi) mhat[v] = S::plus(mhat[v], mhat[c]);
    }
  }

  void run_basic() {
    std::vector<value_type> scratch;
    for (int s = 1; s <= core_.n(); ++s) {
      basic_step(s, scratch);
      restrict_to_layer(s, scratch);
    }
  }

  void run_fast() {
    std::vector<value_type> mhat, acc;
    for (int s = 1; s <= core_.n(); ++s) {
      const Layer& ext = core_.extended_layer(s);
      const auto& phi = model_.extended_tables(s).phi;
      const SpecialLayer& sp = special_layer(ext);
      LayerLift<S> lift(core_.layer(s - 1), m_[s - 1]);
      mhat.assign(ext.size(), S::zero());
      acc.assign(ext.size(), S::zero());
      for (auto it = sp.specials.rbegin(); it != sp.specials.rend(); ++it) {
        int v = *it;
        value_type inner = S::zero();
        if (v == ext.epsilon_node) {
          // a letter-closed bank marks every letter child, so these folds
          // normally stay empty
          for (int c : ext.children[v]) {
            if (sp.kind[c] == SpecialLayer::kBare)
              inner = S::plus(inner, lift.W(lift.layer().epsilon_node));
            else if (sp.kind[c] == SpecialLayer::kLink)
              inner = S::plus(inner, lift.V(lift.layer().epsilon_node,
                                            drop_node(s, ext.nodes[sp.down[c]].word)));
          }
        } else {
          int pv = drop_node(s, ext.nodes[v].word);
          inner = m_[s - 1][pv];
          const auto& kids = ext.children[v];
          PCRF_CHECK(kids.size() == lift.layer().children[pv].size(),
                     "extended children mirror the previous layer");
          int run = -1;  // start of the current stretch of bare children
          for (int i = 0; i <= static_cast<int>(kids.size()); ++i) {
            bool bare = i < static_cast<int>(kids.size()) &&
                        sp.kind[kids[i]] == SpecialLayer::kBare;
            if (bare) {
              if (run < 0) run = i;
              continue;
            }
            if (run >= 0) {
              inner = S::plus(inner, lift.child_fold(pv, run + 1, i));
              run = -1;
            }
            if (i < static_cast<int>(kids.size()) &&
                sp.kind[kids[i]] == SpecialLayer::kLink)
              inner = S::plus(inner, lift.V(drop_node(s, ext.nodes[kids[i]].word),
                                            drop_node(s, ext.nodes[sp.down[kids[i]]].word)));
          }
        }
        mhat[v] = S::plus(S::times(phi[v], inner), acc[v]);
        if (!ext.nodes[v].in_pi && sp.special_parent[v] >= 0)
          acc[sp.special_parent[v]] = S::plus(acc[sp.special_parent[v]], mhat[v]);
      }
      restrict_to_layer(s, mhat);
    }
  }

  const SpecialLayer& special_layer(const Layer& ext) {
    auto it = special_cache_.find(&ext);
    if (it == special_cache_.end())
      it = special_cache_.emplace(&ext, build_special_layer(ext)).first;
    return it->second;
  }

  PatternCore core_;
  CostModel<S> model_;
  std::vector<std::vector<value_type>> m_;
  value_type z_ = S::zero();
  std::map<const Layer*, SpecialLayer> special_cache_;
};

template <SemiringLike S>
typename S::value_type infer_basic(const PatternBank& bank) {
  return SemiringChain<S>(bank, SemiringChain<S>::Mode::basic).partition();
}

template <SemiringLike S>
typename S::value_type infer_fast(const PatternBank& bank) {
  return SemiringChain<S>(bank, SemiringChain<S>::Mode::fast).partition();
}

}  // namespace pcrf
