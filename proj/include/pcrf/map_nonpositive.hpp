#pragma once

#include <map>
#include <set>
#include <unordered_map>
#include <vector>

#include "pcrf/fft.hpp"
#include "pcrf/pattern_system.hpp"

namespace pcrf {

/// True when every positioned occurrence cost is <= 0, overrides included.
/// The specialized minimizer below is only sound in that regime.
inline bool all_costs_nonpositive(const PatternBank& bank) {
  std::vector<double> base(bank.size(), 0.0);
  for (int g = 0; g < bank.size(); ++g) {
    for (double e : bank.base_energies(g)) base[g] += e;
    if (base[g] > 0.0) return false;
  }
  std::map<std::pair<int, int>, double> eff;
  for (const auto& o : bank.overrides()) {
    auto key = std::make_pair(o.word, o.start);
    eff.try_emplace(key, base[o.word]);
    eff[key] += o.energy;
  }
  for (const auto& [key, e] : eff)
    if (e > 0.0) return false;
  return true;
}

inline bool has_unit_gamma_word(const PatternBank& bank) {
  for (int g = 0; g < bank.size(); ++g)
    if (bank.word(g).size() == 1) return true;
  return false;
}

/// Total cost of the inner word's occurrences inside the outer word's window,
/// per end position of the outer word; index s of the result is that end.
/// Entries where the window does not fit on the line stay zero.  The inner
/// word must be a bank word, since only those carry costs.
inline std::vector<double> pair_cost_table(const PatternCore& core, const Word& alpha,
                                           const Word& beta, bool transform) {
  int n = core.n();
  int la = static_cast<int>(alpha.size()), lb = static_cast<int>(beta.size());
  std::vector<double> out(n + 1, 0.0);
  int bid = core.find_word(beta);
  PCRF_CHECK(bid >= 0 && core.gamma_id(bid) >= 0, "inner word of a cost table carries no costs");
  std::vector<double> lam = occurrence_mask(alpha, beta);
  if (lam.empty() || la > n) return out;
  std::vector<double> b(n - lb + 1);
  for (int j = 0; j + lb <= n; ++j) b[j] = core.cost_at<MinPlus>(bid, j + lb);
  std::vector<double> a = transform ? correlate(b, lam) : correlate_direct(b, lam);
  for (int i = 0; i < static_cast<int>(a.size()); ++i) out[i + la] = a[i];
  return out;
}

/// Window cost tables f(alpha at s) for every stable interior word, assembled
/// as the sum over bank words of their pair tables. Inner words in the given
/// set go through the sliding-product kernel (which picks its own transform
/// threshold); the rest are accumulated directly.
inline std::map<int, std::vector<double>> assemble_cost_tables(const PatternCore& core,
                                                               const std::set<int>& transform_gammas) {
  const PatternBank& bank = core.bank();
  std::map<int, std::vector<double>> out;
  for (int w : core.compute_I_delta(core.stats().ell_max)) {
    std::vector<double> table(core.n() + 1, 0.0);
    for (int g = 0; g < bank.size(); ++g) {
      std::vector<double> part =
          pair_cost_table(core, core.word(w), bank.word(g), transform_gammas.count(g) > 0);
      for (int s = 0; s <= core.n(); ++s) table[s] += part[s];
    }
    out.emplace(w, std::move(table));
  }
  return out;
}

/// Split rule from the length threshold: short inner words repeat as subwords
/// most often and profit first from the transform.
inline std::map<int, std::vector<double>> assemble_cost_tables_by_length(const PatternCore& core,
                                                                         int delta) {
  std::set<int> chosen;
  for (int g = 0; g < core.bank().size(); ++g)
    if (static_cast<int>(core.bank().word(g).size()) <= delta) chosen.insert(g);
  return assemble_cost_tables(core, chosen);
}

struct MapOptions {
  Variant variant = Variant::MapSimple;
  bool transform_tables = false;  // assemble window costs via pair tables
  int split_delta = 1;            // length threshold for the transform split
};

/// Minimum total cost over labelings, for banks with non-positive costs only.
/// One message per layer node; each node takes the cheaper of extending its
/// longest in-set proper prefix (paying the window cost difference) and
/// deferring to a longer word below it in the layer forest.  Argmin recovery
/// keeps one branch tag per node: extension wins ties, then the earliest
/// child in trie order, which lands on the lexicographically smallest
/// optimum when everything ties at zero.
class MapSolver {
 public:
  explicit MapSolver(const PatternBank& bank, MapOptions opt = {})
      : core_(bank, checked_variant(opt.variant)), opt_(opt) {
    if (!all_costs_nonpositive(bank))
      throw ModelError(
          "a pattern has positive cost; minimize with the general solver (infer_fast) instead");
    if (!has_unit_gamma_word(bank))
      throw ModelError("the bank has no single-letter word; close the alphabet first");
    build_suffix_costs();
    if (opt_.transform_tables)
      tables_ = assemble_cost_tables_by_length(core_, opt_.split_delta);
    run();
    backtrace();
  }

  double partition() const { return z_; }
  const Word& labeling() const { return labeling_; }
  const std::vector<double>& M(int s) const { return m_[s]; }
  long long comparisons(int s) const { return comps_[s]; }
  const PatternCore& core() const { return core_; }

 private:
  static Variant checked_variant(Variant v) {
    PCRF_CHECK(v == Variant::MapSimple || v == Variant::MapTildeExact,
               "the minimizer runs on the prefix-linked layer variants");
    return v;
  }

  // Bank words that are suffixes of each interned word; the per-position
  // cost increment of a word is the cost sum over this list.
  void build_suffix_costs() {
    int W = core_.word_count();
    gamma_suffixes_.resize(W);
    for (int w = 1; w < W; ++w) {
      const Word& word = core_.word(w);
      for (int t = 1; t <= static_cast<int>(word.size()); ++t) {
        int id = core_.find_word(Word(word.end() - t, word.end()));
        if (id >= 0 && core_.gamma_id(id) >= 0) gamma_suffixes_[w].push_back(id);
      }
    }
  }

  double phi(int w, int e) const {
    double total = 0.0;
    for (int g : gamma_suffixes_[w]) total += core_.cost_at<MinPlus>(g, e);
    return total;
  }

  // Window cost of a word ending at e, accumulated along its prefix chain.
  double window_cost_direct(int w, int e) const {
    double total = 0.0;
    int len = core_.word_length(w);
    for (int j = len; j >= 1; --j, w = core_.prefix_link(w)) total += phi(w, e - len + j);
    return total;
  }

  double window_cost(int w, int e) const {
    auto it = tables_.find(w);
    if (it != tables_.end()) return it->second[e];
    return window_cost_direct(w, e);
  }

  // Cost delta between a node's word and its longest in-set proper prefix.
  double psi(const Layer& L, int v, int s) const {
    int w = L.nodes[v].word;
    int d = L.back_delta[v];
    if (opt_.transform_tables)
      return window_cost(w, s) - window_cost(L.back_word[v], s - d);
    double total = 0.0;
    int len = core_.word_length(w);
    for (int j = len; j > len - d; --j, w = core_.prefix_link(w)) total += phi(w, s - len + j);
    return total;
  }

  void run() {
    int n = core_.n();
    m_.assign(n + 1, {});
    branch_.assign(n + 1, {});
    comps_.assign(n + 1, 0);
    m_[0] = {0.0};
    branch_[0] = {kNone};
    for (int s = 1; s <= n; ++s) {
      const Layer& L = core_.layer(s);
      auto& m = m_[s];
      auto& br = branch_[s];
      m.assign(L.size(), MinPlus::zero());
      br.assign(L.size(), kNone);
      for (int v = L.size() - 1; v >= 0; --v) {
        double acc = MinPlus::zero();
        int take = kNone;
        if (v != L.epsilon_node) {
          int p = s - L.back_delta[v];
          int u = core_.node_in(p, L.back_word[v]);
          PCRF_CHECK(u >= 0, "prefix link of a layer word missing from its layer");
          acc = m_[p][u] + psi(L, v, s);
          take = kExtend;
        }
        for (int c : L.children[v]) {
          ++comps_[s];
          if (m[c] < acc) {
            acc = m[c];
            take = c;
          }
        }
        m[v] = acc;
        br[v] = take;
      }
      PCRF_CHECK(comps_[s] <= L.size(), "layer comparison count exceeded the node count");
    }
    z_ = m_[n][core_.layer(n).epsilon_node];
  }

  void backtrace() {
    int n = core_.n();
    labeling_.assign(n, -1);
    int s = n, v = core_.layer(n).epsilon_node;
    long long steps = 0;
    while (s > 0) {
      PCRF_CHECK(++steps < (long long)(n + 1) * (core_.layer(s).size() + 1), "trace cycled");
      const Layer& L = core_.layer(s);
      int take = branch_[s][v];
      PCRF_CHECK(take != kNone, "trace stalled on a node with no source");
      if (take >= 0) {
        v = take;
        continue;
      }
      const Word& w = core_.word(L.nodes[v].word);
      int lw = static_cast<int>(w.size()), d = L.back_delta[v];
      for (int t = 0; t < d; ++t) labeling_[s - 1 - t] = w[lw - 1 - t];
      int p = s - d;
      v = core_.node_in(p, L.back_word[v]);
      s = p;
    }
    int fill = 0;
    double fill_cost = 0.0;
    for (int c = 0; c < core_.bank().letters(); ++c) {
      int id = core_.find_word(Word{c});
      double cost = 0.0;
      if (id >= 0 && core_.gamma_id(id) >= 0)
        for (double e : core_.bank().base_energies(core_.gamma_id(id))) cost += e;
      if (cost < fill_cost) {
        fill_cost = cost;
        fill = c;
      }
    }
    for (int i = 0; i < n; ++i)
      if (labeling_[i] < 0) labeling_[i] = fill;
  }

  static constexpr int kNone = -2, kExtend = -1;

  PatternCore core_;
  MapOptions opt_;
  std::vector<std::vector<int>> gamma_suffixes_;
  std::map<int, std::vector<double>> tables_;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<int>> branch_;
  std::vector<long long> comps_;
  double z_ = 0.0;
  Word labeling_;
};

}  // namespace pcrf
