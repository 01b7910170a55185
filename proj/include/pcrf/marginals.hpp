#pragma once

#include <map>
#include <utility>
#include <vector>

#include "pcrf/inference_ring.hpp"

namespace pcrf {

/// Occurrence weights Z(alpha): the summed weight of every labeling whose
/// window [i, j] spells alpha's word. Computed for all positioned patterns
/// that extend leftward to a bank occurrence's suffix and rightward to one's
/// prefix (the PrefixSuffix layers); bank occurrences themselves are the
/// interesting subset, and Z(alpha)/Z is their marginal probability.
///
/// The two directional passes give, for alpha ending at j and starting at i,
///   W(alpha)  = Wfwd_j(alpha) * Wbwd_i(alpha) / f(alpha)
///   W-(alpha) = Wfwd_{j-1}(alpha minus last) * Wbwd_{i+1}(alpha minus first)
///               / f(alpha minus both ends)
/// so W counts every labeling in Omega(alpha) with the factors of patterns
/// strictly straddling both ends of the window removed, and W- removes the
/// factors of all patterns covering the window. The straddlers are recovered
/// recursively from the minimal strict containers Phi(alpha):
///   Z(alpha) = W(alpha) + sum over beta in Phi(alpha) of [Z(beta) - W-(beta)]
/// processed in decreasing word length. The inner cost in W- comes from
///   f(minus both ends) = f(alpha) c~(alpha) / (phi_fwd(alpha) phi_bwd(alpha))
/// where c~ is alpha's own cost when it is a bank occurrence and 1 otherwise;
/// windows of length <= 2 have an empty interior whose cost is 1.
///
/// Everything is accumulated as ratios against Z, descaled through the
/// per-layer exponents, so chains long enough to rescale stay in range.
class Marginals {
 public:
  explicit Marginals(const PatternBank& bank)
      : core_(bank, Variant::PrefixSuffix), fwd_(bank), bwd_(reverse_bank(bank)) {
    map_words();
    combine_passes();
    recurse();
    // Each pattern serves as a minimal strict container of at most 2|beta|
    // shorter patterns; the recursion walks every such edge exactly once.
    for (int s = 1; s <= core_.n(); ++s) {
      const Layer& L = core_.layer(s);
      for (int v = 0; v < L.size(); ++v)
        PCRF_CHECK(phi_count_[s][v] <= 2 * core_.word_length(L.nodes[v].word),
                   "a pattern minimally contains too many others");
    }
  }

  const PatternCore& core() const { return core_; }
  const ChainSystem<SumProduct>& forward() const { return fwd_; }
  const ChainSystem<SumProduct>& backward() const { return bwd_; }

  /// Z(alpha)/Z for the node's positioned word; a probability when the word
  /// is a bank word.
  double ratio(int s, int node) const { return ratio_[s][node]; }
  double w_ratio(int s, int node) const { return w_ratio_[s][node]; }
  double wminus_ratio(int s, int node) const { return wminus_ratio_[s][node]; }

  ScaledReal partition() const { return fwd_.messages.partition_scaled(); }

  /// Z(alpha) itself, carrying the partition value's scale.
  ScaledReal z_of(int s, int node) const {
    ScaledReal z = partition();
    return {ratio_[s][node] * z.mantissa, z.exp2};
  }

  struct Occurrence {
    int word;  // bank word id
    int start, end;
    double probability;
  };

  /// Marginal probabilities of every bank-word placement, letters included.
  std::vector<Occurrence> occurrences() const {
    std::vector<Occurrence> out;
    const PatternBank& b = core_.bank();
    for (int g = 0; g < b.size(); ++g) {
      int id = core_.find_word(b.word(g));
      int len = core_.word_length(id);
      for (int e = len; e <= core_.n(); ++e) {
        int v = core_.node_in(e, id);
        PCRF_CHECK(v >= 0, "bank occurrence missing from its layer");
        out.push_back({g, e - len + 1, e, ratio_[e][v]});
      }
    }
    return out;
  }

 private:
  // (end offset from alpha's end, container word id)
  using PhiList = std::vector<std::pair<int, int>>;

  void map_words() {
    fwd_id_.assign(core_.word_count(), -1);
    bwd_id_.assign(core_.word_count(), -1);
    for (int w = 0; w < core_.word_count(); ++w) {
      const Word& sw = core_.word(w);
      fwd_id_[w] = fwd_.core.find_word(sw);
      bwd_id_[w] = bwd_.core.find_word(Word(sw.rbegin(), sw.rend()));
    }
  }

  // True value of a stored product is stored * 2^e.
  static double descale(long double stored, long long e) {
    if (e > 16000) return static_cast<double>(stored) * HUGE_VAL;
    if (e < -16000) return 0.0;
    return static_cast<double>(ldexpl(stored, static_cast<int>(e)));
  }

  void combine_passes() {
    const int n = core_.n();
    double zm = fwd_.messages.partition_raw();
    if (zm == 0.0) throw ModelError("partition value vanished; marginals undefined");
    ratio_.resize(n + 1);
    w_ratio_.resize(n + 1);
    wminus_ratio_.resize(n + 1);
    phi_count_.resize(n + 1);
    for (int s = 0; s <= n; ++s) {
      int m = core_.layer(s).size();
      ratio_[s].assign(m, 0.0);
      w_ratio_[s].assign(m, 0.0);
      wminus_ratio_[s].assign(m, 0.0);
      phi_count_[s].assign(m, 0);
    }
    for (int s = 1; s <= n; ++s) {
      const Layer& L = core_.layer(s);
      for (int v = 0; v < L.size(); ++v) {
        int w = L.nodes[v].word;
        int len = core_.word_length(w);
        int i = s - len + 1;
        int srev = n - i + 1;
        int fid = fwd_id_[w], bid = bwd_id_[w];
        PCRF_CHECK(fid >= 0 && bid >= 0, "pattern word missing from a directional table");
        int fv = fwd_.core.node_in(s, fid);
        int bv = bwd_.core.node_in(srev, bid);
        PCRF_CHECK(fv >= 0 && bv >= 0, "pattern missing from a directional layer");
        const auto& ft = fwd_.model.tables(s);
        const auto& bt = bwd_.model.tables(srev);
        double f_alpha = ft.f[fv];
        if (f_alpha == 0.0) throw ModelError("a window cost underflowed to zero");
        long long e = fwd_.messages.layer_scale(n) - fwd_.messages.layer_scale(s) -
                      bwd_.messages.layer_scale(srev);
        w_ratio_[s][v] =
            descale(static_cast<long double>(fwd_.messages.W(s)[fv]) * bwd_.messages.W(srev)[bv] /
                        (static_cast<long double>(f_alpha) * zm),
                    e);
        // The window minus both end letters.
        int fv2 = fwd_.core.node_in(s - 1, fwd_.core.prefix_link(fid));
        int bv2 = bwd_.core.node_in(srev - 1, bwd_.core.prefix_link(bid));
        PCRF_CHECK(fv2 >= 0 && bv2 >= 0, "trimmed pattern missing from a directional layer");
        long double f_inner = 1.0;
        if (len > 2) {
          long double edge = static_cast<long double>(ft.phi[fv]) * bt.phi[bv];
          if (edge == 0.0) throw ModelError("a window cost underflowed to zero");
          f_inner = static_cast<long double>(f_alpha) * ft.c[fv] / edge;
          if (f_inner == 0.0) throw ModelError("a window cost underflowed to zero");
        }
        long long e2 = fwd_.messages.layer_scale(n) - fwd_.messages.layer_scale(s - 1) -
                       bwd_.messages.layer_scale(srev - 1);
        wminus_ratio_[s][v] =
            descale(static_cast<long double>(fwd_.messages.W(s - 1)[fv2]) *
                        bwd_.messages.W(srev - 1)[bv2] / (f_inner * zm),
                    e2);
      }
    }
  }

  void recurse() {
    const int n = core_.n();
    for (int len = core_.stats().ell_max; len >= 1; --len)
      for (int s = len; s <= n; ++s) {
        const Layer& L = core_.layer(s);
        for (int v = 0; v < L.size(); ++v) {
          if (core_.word_length(L.nodes[v].word) != len) continue;
          long double z = w_ratio_[s][v];
          for (auto [ds, u] : phi_list(s, L.nodes[v].word)) {
            int v2 = core_.node_in(s + ds, u);
            PCRF_CHECK(v2 >= 0, "minimal container missing from its layer");
            ++phi_count_[s + ds][v2];
            z += static_cast<long double>(ratio_[s + ds][v2]) - wminus_ratio_[s + ds][v2];
          }
          ratio_[s][v] = static_cast<double>(z);
        }
      }
  }

  // Containers end within ell_max of s, so the list depends only on the word
  // and the layer identities there: interior positions share one list.
  const PhiList& phi_list(int s, int w) {
    std::vector<const Layer*> sig;
    int hi = std::min(core_.n(), s + core_.stats().ell_max);
    for (int t = s + 1; t <= hi; ++t) sig.push_back(&core_.layer(t));
    auto key = std::make_pair(w, std::move(sig));
    auto it = phi_cache_.find(key);
    if (it == phi_cache_.end()) it = phi_cache_.emplace(std::move(key), build_phi(s, w)).first;
    return it->second;
  }

  PhiList build_phi(int s, int w) const {
    PhiList out;
    const Word& ww = core_.word(w);
    int len = static_cast<int>(ww.size());
    for (int u = 1; u < core_.word_count(); ++u) {
      const Word& uw = core_.word(u);
      int ulen = static_cast<int>(uw.size());
      for (int d = 1; d + len + 1 <= ulen; ++d) {
        if (!std::equal(ww.begin(), ww.end(), uw.begin() + d)) continue;
        int l = s + (ulen - len - d);
        if (l > core_.n() || !core_.member(u, l)) continue;
        if (!minimal_container(uw, d, len, l)) continue;
        out.emplace_back(l - s, u);
      }
    }
    return out;
  }

  // No other pattern both strictly contains u's factor at [d, d+len) and
  // fits inside u's own placement ending at l.
  bool minimal_container(const Word& uw, int d, int len, int l) const {
    int ulen = static_cast<int>(uw.size());
    for (int a = 0; a < d; ++a)
      for (int b = d + len + 1; b <= ulen; ++b) {
        if (a == 0 && b == ulen) continue;
        int g = core_.find_word(Word(uw.begin() + a, uw.begin() + b));
        if (g >= 0 && core_.member(g, l - (ulen - b))) return false;
      }
    return true;
  }

  PatternCore core_;
  ChainSystem<SumProduct> fwd_, bwd_;
  std::vector<int> fwd_id_, bwd_id_;
  std::vector<std::vector<double>> ratio_, w_ratio_, wminus_ratio_;
  std::vector<std::vector<int>> phi_count_;
  std::map<std::pair<int, std::vector<const Layer*>>, PhiList> phi_cache_;
};

}  // namespace pcrf
