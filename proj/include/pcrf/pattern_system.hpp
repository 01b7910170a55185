#pragma once

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <functional>
#include <limits>
#include <memory>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "pcrf/bank.hpp"
#include "pcrf/semiring.hpp"

namespace pcrf {

/// Which working pattern set Π the layers are built from.
///  - Prefixes: all non-empty prefixes of bank words plus ε at every position;
///    layers keep words that fit inside [1, n] with room to complete rightward.
///  - ProperPrefixes: proper prefixes plus ε, with no right-side restriction.
///  - PrefixSuffix: words that extend to a full bank word on both sides within
///    the window; ε excluded.
///  - MapSimple: PrefixSuffix membership plus ε at every position.
///  - MapTildeExact: the minimal context-stable set (see pi_tilde_member) plus
///    ε at every position; opt-in replacement for MapSimple.
enum class Variant { Prefixes, ProperPrefixes, PrefixSuffix, MapSimple, MapTildeExact };

struct LayerNode {
  int word = -1;         // word-table id
  int parent = -1;       // Hasse parent (immediate proper suffix present in the layer)
  int subtree_end = -1;  // nodes [index+1, subtree_end) are the proper descendants
  bool in_gamma = false; // word is a bank word, so a pattern occurrence ends here
  bool in_pi = false;    // member of the variant set proper (vs auxiliary node)
};

/// One per-position pattern layer. Nodes are stored in trie preorder, so every
/// subtree is a contiguous index range and reverse index order is a valid
/// leaf-to-root traversal.
struct Layer {
  std::vector<LayerNode> nodes;
  std::vector<std::vector<int>> children;  // per node, in trie order
  std::vector<int> depth;                  // root distance within the layer forest
  std::vector<int> node_of_word;           // word id -> node index, -1 when absent
  std::vector<int> back_word;              // MAP variants: word id of the longest
  std::vector<int> back_delta;             //   proper prefix in Π and its end offset
  int epsilon_node = -1;
  int pi_count = 0;

  int size() const { return static_cast<int>(nodes.size()); }
};

namespace detail {

struct TableKeyHash {
  std::size_t operator()(const std::vector<std::uint64_t>& v) const {
    std::uint64_t h = 14695981039346656037ull;
    for (auto x : v) {
      h ^= x;
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }
};

}  // namespace detail

/// Immutable pattern-set machinery for one bank and one variant: the shared
/// word table, suffix trie, per-position layers with Hasse forests, and the
/// prefix/suffix interface sets. Layers for positions far from both boundaries
/// are built once and shared; the cache key saturates at the distances beyond
/// which membership provably cannot change.
class PatternCore {
 public:
  PatternCore(PatternBank bank, Variant variant) : bank_(std::move(bank)), variant_(variant) {
    if (bank_.n < 1) throw ModelError("sequence length must be at least 1");
    if (bank_.size() == 0) throw ModelError("pattern set is empty");
    if (!bank_.alphabet_closed())
      throw ModelError("alphabet is not closed: every letter must be a pattern word");
    stats_ = compute_bank_stats(bank_);
    build_word_table();
    build_reverse_trie();
    if (variant_ == Variant::MapTildeExact) i_inf_ = compute_I_delta(stats_.ell_max);
    build_all_layers();
  }

  PatternCore(const PatternCore&) = delete;
  PatternCore& operator=(const PatternCore&) = delete;

  const PatternBank& bank() const { return bank_; }
  Variant variant() const { return variant_; }
  int n() const { return bank_.n; }
  const BankStats& stats() const { return stats_; }

  int word_count() const { return static_cast<int>(words_.size()); }
  const Word& word(int id) const { return words_[id]; }
  int word_length(int id) const { return static_cast<int>(words_[id].size()); }
  int prefix_link(int id) const { return prefix_link_[id]; }
  int last_letter(int id) const { return last_letter_[id]; }
  int gamma_id(int id) const { return gamma_id_[id]; }
  std::string spell(int id) const { return bank_.spell(words_[id]); }

  int find_word(const Word& w) const {
    auto it = ids_.find(w);
    return it == ids_.end() ? -1 : it->second;
  }

  const Layer& layer(int s) const { return *layer_by_s_[s]; }
  int node_in(int s, int word_id) const { return layer_by_s_[s]->node_of_word[word_id]; }

  /// Membership of a non-empty word in Π_s for the core variant; ε follows
  /// epsilon_in_layer() instead.
  bool member(int w, int s) const {
    int len = word_length(w);
    if (len > s) return false;
    switch (variant_) {
      case Variant::Prefixes:
        return tail_[w] <= n() - s;
      case Variant::ProperPrefixes:
        return proper_prefix_[w];
      case Variant::PrefixSuffix:
      case Variant::MapSimple:
        return tail_[w] <= n() - s && head_[w] <= s - len;
      case Variant::MapTildeExact:
        return pi_tilde_member(w, s);
    }
    return false;
  }

  /// Extended layers (the letter extensions of the previous layer, plus ε).
  /// Built for the ProperPrefixes variant only, for s in [1, n].
  const Layer& extended_layer(int s) const {
    PCRF_CHECK(variant_ == Variant::ProperPrefixes && s >= 1, "extended layer unavailable");
    return *ext_layer_by_s_[s];
  }

  /// Word ids (possibly including ε) of I_delta: words admitting a context of
  /// delta extra letters on both sides in which no bank word strictly contains
  /// them. Monotonically shrinks as delta grows; fixed for delta >= ell_max.
  std::set<int> compute_I_delta(int delta) const {
    std::set<int> out;
    for (int w = 0; w < word_count(); ++w)
      if (word_in_I_delta(w, delta)) out.insert(w);
    return out;
  }

  /// Non-empty words that are simultaneously a prefix and a suffix of bank
  /// words, as word ids.
  std::set<int> interface_words() const {
    std::set<int> out;
    for (int w = 1; w < word_count(); ++w)
      if (tail_[w] < kInf && head_[w] < kInf) out.insert(w);
    return out;
  }

  const std::set<int>& I_infinity() const {
    PCRF_CHECK(variant_ == Variant::MapTildeExact, "I_infinity cached for the exact MAP variant only");
    return i_inf_;
  }

  /// Positional membership test for the exact MAP set: the word, ending at s,
  /// together with some same-line witnesses a (extending it leftward to a bank
  /// word) and g (rightward), admits a line completion in which no bank word
  /// strictly contains the witness-extended placement on both sides.
  bool pi_tilde_member(int w, int s) const {
    int len = word_length(w);
    if (len > s) return false;
    int i = s - len + 1;
    for (int left : completions_left(w)) {
      int alen = word_length(left) - len;
      if (i - alen < 1) continue;
      for (int right : completions_right(w)) {
        int glen = word_length(right) - len;
        if (s + glen > n()) continue;
        int room_x = i - alen - 1;
        int room_y = n() - s - glen;
        if (context_escape(w, left, right, room_x, room_y)) return true;
      }
    }
    return false;
  }

  /// Cost of the layer word `w` as a pattern ending at `s`, with overrides.
  template <SemiringLike S>
  typename S::value_type cost_at(int w, int s) const {
    int g = gamma_id_[w];
    if (g < 0) return S::one();
    auto v = S::one();
    for (double e : bank_.base_energies(g)) v = S::times(v, S::cost_from_energy(e));
    if (!override_by_end_.empty()) {
      auto it = override_by_end_.find(pack_override(g, s));
      if (it != override_by_end_.end())
        for (double e : it->second) v = S::times(v, S::cost_from_energy(e));
    }
    return v;
  }

  /// Cache key for a position's cost tables: the layer's structural key plus
  /// the relative pattern of override entries whose occurrence ends within
  /// ell_max of s. Positions with equal keys provably have equal tables.
  std::vector<std::uint64_t> table_key(int s) const {
    std::vector<std::uint64_t> key;
    auto [l, r] = key_parts(s);
    key.push_back((static_cast<std::uint64_t>(l) << 32) | static_cast<std::uint64_t>(r));
    for (int off = 0; off < stats_.ell_max; ++off) {
      int e = s - off;
      if (e < 1) break;
      for (const auto& o : bank_.overrides()) {
        int olen = static_cast<int>(bank_.word(o.word).size());
        if (o.start + olen - 1 != e) continue;
        key.push_back((static_cast<std::uint64_t>(o.word) << 32) | static_cast<std::uint64_t>(off));
        std::uint64_t bits;
        static_assert(sizeof bits == sizeof o.energy);
        std::memcpy(&bits, &o.energy, sizeof bits);
        key.push_back(bits);
      }
    }
    return key;
  }

  std::vector<std::uint64_t> extended_table_key(int s) const {
    auto key = table_key(s);
    auto [l, r] = ext_key_parts(s);
    key[0] = (static_cast<std::uint64_t>(l) << 32) | static_cast<std::uint64_t>(r) | (1ull << 63);
    return key;
  }

 private:
  static constexpr int kInf = std::numeric_limits<int>::max() / 4;

  PatternBank bank_;
  Variant variant_;
  BankStats stats_;

  std::vector<Word> words_;  // id 0 is ε
  std::unordered_map<Word, int, WordHash> ids_;
  std::vector<int> prefix_link_, last_letter_, gamma_id_, tail_, head_;
  std::vector<bool> proper_prefix_;
  std::vector<std::vector<int>> left_completions_, right_completions_;  // per word: bank-word-as-table ids

  struct RNode {
    int stored = -1;
    std::vector<std::pair<int, int>> kids;  // (letter, rnode), letter-sorted
  };
  std::vector<RNode> rtrie_;
  std::vector<int> rnode_of_word_;

  std::unordered_map<std::uint64_t, Layer> layer_cache_, ext_layer_cache_;
  std::vector<const Layer*> layer_by_s_, ext_layer_by_s_;

  std::unordered_map<std::uint64_t, std::vector<double>> override_by_end_;
  std::set<int> i_inf_;

  std::uint64_t pack_override(int bank_word, int end) const {
    return static_cast<std::uint64_t>(bank_word) * (bank_.n + 2) + end;
  }

  int intern_word(const Word& w) {
    auto [it, fresh] = ids_.try_emplace(w, static_cast<int>(words_.size()));
    if (fresh) words_.push_back(w);
    return it->second;
  }

  void build_word_table() {
    intern_word(Word{});
    for (const Word& g : bank_.words())
      for (std::size_t m = 1; m <= g.size(); ++m) intern_word(Word(g.begin(), g.begin() + m));
    int prefix_count = static_cast<int>(words_.size());
    // Letter extensions of every proper prefix (the extended-layer universe).
    // Interned for all variants so that word ids are bank-stable.
    std::vector<bool> proper(prefix_count, false);
    proper[0] = true;
    for (const Word& g : bank_.words())
      for (std::size_t m = 1; m < g.size(); ++m) proper[ids_.at(Word(g.begin(), g.begin() + m))] = true;
    for (int id = 0; id < prefix_count; ++id) {
      if (!proper[id]) continue;
      for (int c = 0; c < bank_.letters(); ++c) {
        Word w = words_[id];
        w.push_back(c);
        intern_word(w);
      }
    }

    int count = static_cast<int>(words_.size());
    prefix_link_.assign(count, -1);
    last_letter_.assign(count, -1);
    gamma_id_.assign(count, -1);
    tail_.assign(count, kInf);
    head_.assign(count, kInf);
    proper_prefix_.assign(count, false);
    proper_prefix_[0] = true;
    left_completions_.assign(count, {});
    right_completions_.assign(count, {});

    for (int id = 1; id < count; ++id) {
      Word w = words_[id];
      last_letter_[id] = w.back();
      w.pop_back();
      prefix_link_[id] = ids_.at(w);
    }
    for (int g = 0; g < bank_.size(); ++g) {
      const Word& w = bank_.word(g);
      int full = ids_.at(w);
      gamma_id_[full] = g;
      for (std::size_t m = 0; m <= w.size(); ++m) {
        auto it = ids_.find(Word(w.begin(), w.begin() + m));  // prefixes always found
        int id = it->second;
        tail_[id] = std::min(tail_[id], static_cast<int>(w.size() - m));
        right_completions_[id].push_back(full);
        if (m < w.size()) proper_prefix_[id] = true;
      }
      for (std::size_t m = 0; m <= w.size(); ++m) {
        auto it = ids_.find(Word(w.end() - m, w.end()));  // suffixes only when interned
        if (it == ids_.end()) continue;
        int id = it->second;
        head_[id] = std::min(head_[id], static_cast<int>(w.size() - m));
        left_completions_[id].push_back(full);
      }
    }

    for (const auto& o : bank_.overrides()) {
      int end = o.start + static_cast<int>(bank_.word(o.word).size()) - 1;
      override_by_end_[pack_override(o.word, end)].push_back(o.energy);
    }
  }

  const std::vector<int>& completions_left(int w) const { return left_completions_[w]; }
  const std::vector<int>& completions_right(int w) const { return right_completions_[w]; }

  void build_reverse_trie() {
    rtrie_.clear();
    rtrie_.emplace_back();
    rnode_of_word_.assign(word_count(), -1);
    for (int id = 0; id < word_count(); ++id) {
      int at = 0;
      const Word& w = words_[id];
      for (auto it = w.rbegin(); it != w.rend(); ++it) {
        int next = -1;
        for (auto& [c, v] : rtrie_[at].kids)
          if (c == *it) { next = v; break; }
        if (next < 0) {
          next = static_cast<int>(rtrie_.size());
          rtrie_[at].kids.emplace_back(*it, next);
          rtrie_.emplace_back();
        }
        at = next;
      }
      rtrie_[at].stored = id;
      rnode_of_word_[id] = at;
    }
    for (auto& node : rtrie_) std::sort(node.kids.begin(), node.kids.end());
  }

  bool epsilon_in_layer() const { return variant_ != Variant::PrefixSuffix; }

  // Structural cache key: membership at s only depends on the distances to the
  // two boundaries, saturated past the horizon the variant can see.
  std::pair<int, int> key_parts(int s) const {
    int ell = stats_.ell_max;
    int lcap = ell, rcap = std::max(ell - 1, 0);
    if (variant_ == Variant::MapSimple) lcap = 2 * ell;              // back links probe ell further left
    if (variant_ == Variant::MapTildeExact) { lcap = 3 * ell; rcap = 2 * ell; }
    return {std::min(s, lcap), std::min(n() - s, rcap)};
  }

  std::pair<int, int> ext_key_parts(int s) const {
    return {std::min(s, stats_.ell_max + 1), std::min(n() - s, std::max(stats_.ell_max - 1, 0))};
  }

  static std::uint64_t pack_key(std::pair<int, int> p) {
    return (static_cast<std::uint64_t>(p.first) << 32) | static_cast<std::uint64_t>(p.second);
  }

  void build_all_layers() {
    layer_by_s_.assign(n() + 1, nullptr);
    bool map_variant = variant_ == Variant::MapSimple || variant_ == Variant::MapTildeExact;
    for (int s = 0; s <= n(); ++s) {
      std::uint64_t k = pack_key(key_parts(s));
      auto it = layer_cache_.find(k);
      if (it == layer_cache_.end()) {
        it = layer_cache_.emplace(k, build_layer(s, /*extended=*/false)).first;
        layer_by_s_[s] = &it->second;  // back links below may consult layer(p), p < s
        if (map_variant) fill_back_links(it->second, s);
      }
      layer_by_s_[s] = &it->second;
    }
    if (variant_ == Variant::ProperPrefixes) {
      ext_layer_by_s_.assign(n() + 1, nullptr);
      for (int s = 1; s <= n(); ++s) {
        std::uint64_t k = pack_key(ext_key_parts(s));
        auto it = ext_layer_cache_.find(k);
        if (it == ext_layer_cache_.end()) it = ext_layer_cache_.emplace(k, build_layer(s, true)).first;
        ext_layer_by_s_[s] = &it->second;
      }
    }
  }

  Layer build_layer(int s, bool extended) const {
    Layer out;
    out.node_of_word.assign(word_count(), -1);
    auto in_set = [&](int w) -> std::pair<bool, bool> {  // (present, in_pi)
      if (w == 0) {
        if (extended) return {true, member_base_epsilon(s)};
        if (!epsilon_in_layer()) return {false, false};
        bool pi = variant_ == Variant::MapTildeExact ? pi_tilde_member(0, s) : true;
        return {true, pi};
      }
      if (extended) {
        bool present = layer_by_s_[s - 1]->node_of_word[prefix_link_[w]] >= 0;
        return {present, present && member(w, s)};
      }
      bool present = member(w, s);
      return {present, present};
    };

    // DFS over the reversed-word trie; the nearest marked ancestor is the
    // Hasse parent, and letter-ordered descent makes node order canonical.
    std::function<void(int, int)> dfs = [&](int rnode, int anc) {
      int self = -1;
      int w = rtrie_[rnode].stored;
      if (w >= 0) {
        auto [present, pi] = in_set(w);
        if (present) {
          self = out.size();
          out.nodes.push_back({w, anc, -1, gamma_id_[w] >= 0, pi});
          out.children.emplace_back();
          out.depth.push_back(anc < 0 ? 0 : out.depth[anc] + 1);
          if (anc >= 0) out.children[anc].push_back(self);
          out.node_of_word[w] = self;
          if (w == 0) out.epsilon_node = self;
          if (pi) ++out.pi_count;
          anc = self;
        }
      }
      for (auto [c, kid] : rtrie_[rnode].kids) dfs(kid, anc);
      if (self >= 0) out.nodes[self].subtree_end = out.size();
    };
    dfs(0, -1);
    return out;
  }

  // ε_s as a ProperPrefixes member (it always is; kept explicit for clarity).
  bool member_base_epsilon(int) const { return true; }

  void fill_back_links(Layer& layer, int s) const {
    layer.back_word.assign(layer.size(), -1);
    layer.back_delta.assign(layer.size(), 0);
    for (int v = 0; v < layer.size(); ++v) {
      int w = layer.nodes[v].word;
      if (w == 0) continue;  // ε has no proper prefix
      int u = prefix_link_[w];
      for (int diff = 1;; ++diff, u = prefix_link_[u]) {
        int p = s - diff;
        PCRF_CHECK(p >= 0, "back-link walk left the line");
        if (layer_by_s_[p]->node_of_word[u] >= 0) {
          layer.back_word[v] = u;
          layer.back_delta[v] = diff;
          break;
        }
        if (u == 0) break;  // ε not in Π_p cannot happen for MAP variants; guarded anyway
      }
      PCRF_CHECK(layer.back_word[v] >= 0, "missing longest-proper-prefix link");
    }
  }

  // Is there a line completion (x of length at most room_x, y of length at
  // most room_y, free letters) in which no bank word strictly contains w's
  // placement within the witness context? Only letters within reach of a bank
  // word matter, so the enumeration is capped.
  bool context_escape(int w, int left, int right, int room_x, int room_y) const {
    int len = word_length(w);
    int cap = stats_.ell_max - len - 1;  // longest useful one-side extension
    if (cap < 1) return true;            // any strict two-side container is too long
    int alen = word_length(left) - len;
    int glen = word_length(right) - len;
    const Word& lw = word(left);   // a = lw[0 .. alen)
    const Word& rw = word(right);  // g = rw[len .. len+glen)
    int dx = std::clamp(std::min(room_x, cap - alen), 0, cap);
    int dy = std::clamp(std::min(room_y, cap - glen), 0, cap);

    std::vector<int> xs(dx, 0), ys(dy, 0);
    auto ok = [&]() {
      // left context letters, oldest first: xs then a; right: g then ys
      std::vector<int> lctx(xs);
      lctx.insert(lctx.end(), lw.begin(), lw.begin() + alen);
      std::vector<int> rctx(rw.begin() + len, rw.begin() + len + glen);
      rctx.insert(rctx.end(), ys.begin(), ys.end());
      int lmax = std::min<int>(static_cast<int>(lctx.size()), cap);
      for (int ul = 1; ul <= lmax; ++ul) {
        int rmax = std::min<int>(static_cast<int>(rctx.size()), stats_.ell_max - len - ul);
        for (int rl = 1; rl <= rmax; ++rl) {
          Word cand(lctx.end() - ul, lctx.end());
          cand.insert(cand.end(), word(w).begin(), word(w).end());
          cand.insert(cand.end(), rctx.begin(), rctx.begin() + rl);
          int id = find_word(cand);
          if (id >= 0 && gamma_id_[id] >= 0) return false;
        }
      }
      return true;
    };
    // Enumerate all capped contexts.
    std::function<bool(int)> enum_y = [&](int j) -> bool {
      if (j == dy) return ok();
      for (int c = 0; c < bank_.letters(); ++c) {
        ys[j] = c;
        if (enum_y(j + 1)) return true;
      }
      return false;
    };
    std::function<bool(int)> enum_x = [&](int i) -> bool {
      if (i == dx) return enum_y(0);
      for (int c = 0; c < bank_.letters(); ++c) {
        xs[i] = c;
        if (enum_x(i + 1)) return true;
      }
      return false;
    };
    return enum_x(0);
  }

  // Word-level membership in I_delta: same escape condition with delta free
  // letters on both sides and no line window.
  bool word_in_I_delta(int w, int delta) const {
    int len = word_length(w);
    int cap = std::max(stats_.ell_max - len - 1, 0);
    for (int left : completions_left(w)) {
      int alen = word_length(left) - len;
      for (int right : completions_right(w)) {
        int glen = word_length(right) - len;
        int dx = std::clamp(std::min(delta, cap - alen), 0, cap);
        int dy = std::clamp(std::min(delta, cap - glen), 0, cap);
        if (context_escape(w, left, right, dx, dy)) return true;
      }
    }
    return false;
  }
};

/// Per-position cost tables over a core's layers, for one semiring: c (the
/// pattern's own cost), phi (combined cost of all bank-word suffixes ending
/// here) and f (combined cost of every bank-word occurrence inside the
/// pattern's span). phi's chain recursion is sound only where every bank-word
/// suffix of a layer word is itself a layer word: the prefix layers (a bank
/// word always completes rightward from anywhere) and the letter-extension
/// layers (chopping a bank word's last letter leaves a proper prefix). It is
/// not sound on the proper-prefix layers themselves, so those only carry c.
template <SemiringLike S>
struct CostTables {
  std::vector<typename S::value_type> c, phi, f;
  bool has_phi = false, has_f = false;
};

template <SemiringLike S>
class CostModel {
 public:
  explicit CostModel(const PatternCore& core) : core_(&core) {
    if (core.variant() != Variant::Prefixes && core.variant() != Variant::ProperPrefixes)
      throw ModelError("cost tables are built for the prefix-closed variants only");
    bool full = core.variant() == Variant::Prefixes;
    tables_by_s_.assign(core.n() + 1, nullptr);
    for (int s = 0; s <= core.n(); ++s) {
      auto key = core.table_key(s);
      auto it = cache_.find(key);
      if (it == cache_.end())
        it = cache_.emplace(key, build(core.layer(s), s, s > 0 ? &tables(s - 1) : nullptr,
                                       /*with_phi=*/full, /*with_f=*/full))
                 .first;
      tables_by_s_[s] = &it->second;
    }
    if (core.variant() == Variant::ProperPrefixes) {
      ext_by_s_.assign(core.n() + 1, nullptr);
      for (int s = 1; s <= core.n(); ++s) {
        auto key = core.extended_table_key(s);
        auto it = cache_.find(key);
        if (it == cache_.end())
          it = cache_.emplace(key, build(core.extended_layer(s), s, nullptr, true, false)).first;
        ext_by_s_[s] = &it->second;
      }
    }
  }

  const PatternCore& core() const { return *core_; }
  const CostTables<S>& tables(int s) const { return *tables_by_s_[s]; }
  const CostTables<S>& extended_tables(int s) const { return *ext_by_s_[s]; }

 private:
  CostTables<S> build(const Layer& layer, int s, const CostTables<S>* prev, bool with_phi,
                      bool with_f) const {
    CostTables<S> t;
    int m = layer.size();
    t.c.resize(m);
    for (int v = 0; v < m; ++v) {
      const auto& nd = layer.nodes[v];
      t.c[v] = nd.in_gamma ? core_->cost_at<S>(nd.word, s) : S::one();
    }
    if (with_phi) {
      t.has_phi = true;
      t.phi.resize(m);
      for (int v = 0; v < m; ++v) {
        const auto& nd = layer.nodes[v];
        auto up = nd.parent >= 0 ? t.phi[nd.parent] : S::one();
        t.phi[v] = nd.in_gamma ? S::times(up, t.c[v]) : up;
      }
    }
    if (with_f) {
      t.has_f = true;
      t.f.resize(m);
      for (int v = 0; v < m; ++v) {
        const auto& nd = layer.nodes[v];
        if (nd.word == 0) {
          t.f[v] = S::one();
          continue;
        }
        PCRF_CHECK(prev != nullptr, "f recursion needs the previous layer");
        int pw = core_->prefix_link(nd.word);
        int pv = core_->layer(s - 1).node_of_word[pw];
        PCRF_CHECK(pv >= 0, "prefix of a layer word missing one layer back");
        t.f[v] = S::times(prev->f[pv], t.phi[v]);
      }
    }
    return t;
  }

  const PatternCore* core_;
  std::unordered_map<std::vector<std::uint64_t>, CostTables<S>, detail::TableKeyHash> cache_;
  std::vector<const CostTables<S>*> tables_by_s_, ext_by_s_;
};

}  // namespace pcrf
