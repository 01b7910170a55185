#pragma once

#include <cmath>
#include <limits>
#include <type_traits>
#include <vector>

#include "pcrf/pattern_system.hpp"

namespace pcrf {

/// A real magnitude kept as mantissa * 2^exp2 so partition values survive far
/// outside double range.
struct ScaledReal {
  double mantissa = 0.0;
  long long exp2 = 0;

  /// Collapses to a plain double; may over/underflow when exp2 is extreme.
  double value() const {
    if (exp2 > 1 << 20) return mantissa * std::numeric_limits<double>::infinity();
    if (exp2 < -(1 << 20)) return mantissa * 0.0;
    return std::ldexp(mantissa, static_cast<int>(exp2));
  }

  /// Natural log of the magnitude; -inf for zero.
  double log_e() const {
    if (mantissa == 0.0) return -std::numeric_limits<double>::infinity();
    return std::log(std::fabs(mantissa)) + static_cast<double>(exp2) * M_LN2;
  }
};

/// Layer-by-layer message passing over the prefix forests, for semirings with
/// a subtractive inverse. Per layer and pattern node:
///   M[v] = phi(v) * (W'[drop(v)] - sum over children c of W'[drop(c)])
///   W[v] = M[v] + sum over children c of W[c]
/// where drop(.) removes the word's last letter and W' is the previous layer's
/// W. M(eps) is the additive identity on every layer but the zeroth, where
/// M = W = multiplicative identity seeds the empty line. The bracket is the
/// line weight reaching exactly v's class: the alphabet closure guarantees
/// every line ends in some non-empty pattern word, and the forest makes the
/// child classes disjoint.
///
/// All rows are retained; sampling and marginal extraction read them back.
/// When the semiring supports it, each layer is rescaled by a power of two
/// once its magnitude leaves [2^-64, 2^64]; scales_ tracks the cumulative
/// exponent so true values are stored / 2^scales_[s].  The window must stay
/// narrow enough that one more layer of products cannot underflow to zero
/// outright, which a single position of cost below roughly 1e-300 would
/// otherwise do to the whole chain.
template <RingLike S>
class ChainMessages {
 public:
  using value_type = typename S::value_type;

  explicit ChainMessages(const CostModel<S>& model) : model_(&model) {
    const PatternCore& core = model.core();
    if (core.variant() != Variant::Prefixes)
      throw ModelError("ring message passing runs on the prefix layers");
    int n = core.n();
    M_.resize(n + 1);
    W_.resize(n + 1);
    scales_.assign(n + 1, 0);

    const Layer& L0 = core.layer(0);
    M_[0].assign(L0.size(), S::zero());
    M_[0][L0.epsilon_node] = S::one();
    fold_subtrees(L0, M_[0], W_[0]);
    for (int s = 1; s <= n; ++s) step(s);
  }

  const CostModel<S>& model() const { return *model_; }
  const std::vector<value_type>& M(int s) const { return M_[s]; }
  const std::vector<value_type>& W(int s) const { return W_[s]; }
  long long layer_scale(int s) const { return scales_[s]; }

  /// The partition value as stored (scaled by 2^layer_scale(n)).
  value_type partition_raw() const {
    const Layer& L = model_->core().layer(model_->core().n());
    return W_[model_->core().n()][L.epsilon_node];
  }

  ScaledReal partition_scaled() const
    requires(std::is_same_v<value_type, double>)
  {
    return {partition_raw(), -scales_[model_->core().n()]};
  }

 private:
  void step(int s) {
    const PatternCore& core = model_->core();
    const Layer& L = core.layer(s);
    const Layer& P = core.layer(s - 1);
    const auto& t = model_->tables(s);
    const auto& Wp = W_[s - 1];

    auto drop = [&](int v) {
      int pv = P.node_of_word[core.prefix_link(L.nodes[v].word)];
      PCRF_CHECK(pv >= 0, "last-letter drop of a layer word missing one layer back");
      return pv;
    };

    auto& M = M_[s];
    M.assign(L.size(), S::zero());
    for (int v = 0; v < L.size(); ++v) {
      if (v == L.epsilon_node) continue;
      auto acc = Wp[drop(v)];
      for (int c : L.children[v]) acc = S::minus(acc, Wp[drop(c)]);
      M[v] = S::times(t.phi[v], acc);
    }
    fold_subtrees(L, M, W_[s]);

    scales_[s] = scales_[s - 1];
    if constexpr (S::rescalable) rescale(s);
  }

  static void fold_subtrees(const Layer& L, const std::vector<value_type>& M,
                            std::vector<value_type>& W) {
    W.assign(L.size(), S::zero());
    for (int v = L.size() - 1; v >= 0; --v) {
      auto acc = M[v];
      for (int c : L.children[v]) acc = S::plus(acc, W[c]);
      W[v] = acc;
    }
  }

  void rescale(int s) {
    double mx = 0.0;
    for (double x : W_[s]) mx = std::max(mx, std::fabs(x));
    for (double x : M_[s]) mx = std::max(mx, std::fabs(x));
    if (mx == 0.0 || (mx <= 0x1p64 && mx >= 0x1p-64)) return;
    int k = -std::ilogb(mx);  // stored * 2^k lands in [1, 2)
    double f = std::ldexp(1.0, k);
    for (auto& x : M_[s]) x *= f;
    for (auto& x : W_[s]) x *= f;
    scales_[s] += k;
  }

  const CostModel<S>* model_;
  std::vector<std::vector<value_type>> M_, W_;
  std::vector<long long> scales_;
};

/// Everything needed to run ring inference over one bank in one direction.
template <RingLike S>
struct ChainSystem {
  PatternCore core;
  CostModel<S> model;
  ChainMessages<S> messages;

  explicit ChainSystem(const PatternBank& bank)
      : core(bank, Variant::Prefixes), model(core), messages(model) {}
};

template <RingLike S>
typename S::value_type partition_value(const PatternBank& bank) {
  ChainSystem<S> sys(bank);
  if constexpr (S::rescalable)
    return sys.messages.partition_scaled().value();
  else
    return sys.messages.partition_raw();
}

inline ScaledReal partition_scaled(const PatternBank& bank) {
  return ChainSystem<SumProduct>(bank).messages.partition_scaled();
}

}  // namespace pcrf
