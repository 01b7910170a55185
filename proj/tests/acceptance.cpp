// Acceptance gate. Runs eight numbered checks covering oracle equivalence,
// sampling fidelity, structural bounds, kernel equivalences, complexity
// scaling, and the non-positive MAP sandwich, printing one pass/fail line
// each. Thresholds are pinned as constants below; the exit status is the
// number of failed checks. Linked without any test framework so the output
// stays a flat, greppable transcript.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "pcrf/bank.hpp"
#include "pcrf/fft.hpp"
#include "pcrf/inference_ring.hpp"
#include "pcrf/inference_semiring.hpp"
#include "pcrf/interval_sum.hpp"
#include "pcrf/lift.hpp"
#include "pcrf/map_nonpositive.hpp"
#include "pcrf/marginals.hpp"
#include "pcrf/oracle.hpp"
#include "pcrf/pattern_system.hpp"
#include "pcrf/sampling.hpp"
#include "pcrf/semiring.hpp"
#include "test_util.hpp"

using pcrf::BankStats;
using pcrf::BoolOrAnd;
using pcrf::ChainSystem;
using pcrf::CounterRng;
using pcrf::CountSum;
using pcrf::DeltaIndex;
using pcrf::IntervalFold;
using pcrf::Layer;
using pcrf::LayerLift;
using pcrf::MapSolver;
using pcrf::Marginals;
using pcrf::MinPlus;
using pcrf::PatternBank;
using pcrf::PatternCore;
using pcrf::Sampler;
using pcrf::SemiringChain;
using pcrf::SumProduct;
using pcrf::Variant;
using pcrf::Word;
using testutil::line_at;
using testutil::random_bank;
using testutil::window_cost;

namespace {

// Pinned gates. Relative tolerances compare against brute-force oracles;
// "exact" checks use operator== on purpose and never a tolerance.
constexpr double kRingRelTol = 1e-9;
constexpr double kRingBudgetSeconds = 10.0;
constexpr double kMarginalRelTol = 1e-9;
constexpr double kLetterSumTol = 1e-12;
constexpr double kMapRealTol = 1e-9;
constexpr double kChiSquare999Df31 = 61.098;  // 0.999 quantile, 31 degrees of freedom
constexpr double kKernelRelTol = 1e-9;
constexpr double kKernelAbsTol = 1e-9;
constexpr double kLinearRatioLo = 1.7;  // time ratio band per doubling of n
constexpr double kLinearRatioHi = 2.4;
constexpr double kDoublingRatioMax = 2.6;  // per doubling of the pattern count
constexpr double kSandwichTol = 1e-9;

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string str(const char* fmt, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, ap);
  va_end(ap);
  return buf;
}

double rel_dev(double got, double want) {
  if (got == want) return 0.0;
  return std::abs(got - want) / std::max(std::abs(want), std::numeric_limits<double>::min());
}

bool ends_with(const Word& x, const Word& u) {
  return u.size() <= x.size() && std::equal(u.begin(), u.end(), x.end() - u.size());
}

long long pow_ll(long long base, int e) {
  long long v = 1;
  for (int k = 0; k < e; ++k) v *= base;
  return v;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// 1. Partition function against exhaustive enumeration on the random model
// family, plus exact labeling counts when every cost is the counting unit.
Outcome criterion1() {
  auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(11);
  double max_dev = 0.0;
  int bad_count = 0;
  for (int rep = 0; rep < 200; ++rep) {
    PatternBank b = random_bank(rng);
    double got = pcrf::partition_value<SumProduct>(b);
    double want = pcrf::oracle::brute_force_Z<SumProduct>(b);
    max_dev = std::max(max_dev, rel_dev(got, want));

    // Same words with every energy forced to 1: each labeling then carries
    // weight one per occurrence, so the count semiring tallies |D|^n.
    std::set<Word> words;
    for (int g = 0; g < b.size(); ++g) words.insert(b.word(g));
    PatternBank unit = pcrf::make_bank(b.alphabet, b.n);
    for (const Word& u : words) unit.add_pattern(u, 1.0);
    unit.close_alphabet();
    if (pcrf::partition_value<CountSum>(unit) != pow_ll(b.letters(), b.n)) ++bad_count;
  }
  double elapsed = seconds_since(t0);
  Outcome o;
  o.pass = max_dev <= kRingRelTol && bad_count == 0 && elapsed < kRingBudgetSeconds;
  o.detail = str("200 models, max rel dev %.2e, %d count mismatches, %.2fs", max_dev, bad_count,
                 elapsed);
  return o;
}

// 2. Every per-placement weight the forward-backward pass publishes against
// the enumerated weight, and letter marginals summing to one per position.
Outcome criterion2() {
  std::mt19937_64 rng(22);
  double max_dev = 0.0, max_sum_dev = 0.0;
  long long checked = 0;
  int missing = 0;
  for (int rep = 0; rep < 200; ++rep) {
    PatternBank b = random_bank(rng);
    Marginals m(b);
    double z = m.partition().value();
    std::map<std::pair<std::string, int>, double> expect;
    for (const auto& pw : pcrf::oracle::brute_force_marginals(b))
      expect[{pw.word, pw.start}] = pw.weight;
    for (int s = 1; s <= b.n; ++s) {
      const Layer& L = m.core().layer(s);
      for (int v = 0; v < L.size(); ++v) {
        const Word& u = m.core().word(L.nodes[v].word);
        int i = s - static_cast<int>(u.size()) + 1;
        auto it = expect.find({b.spell(u), i});
        if (it == expect.end()) {
          ++missing;
          continue;
        }
        max_dev = std::max(max_dev, rel_dev(m.ratio(s, v) * z, it->second));
        ++checked;
      }
    }
    std::vector<double> sums(b.n + 1, 0.0);
    for (const auto& occ : m.occurrences())
      if (occ.start == occ.end) sums[occ.start] += occ.probability;
    for (int s = 1; s <= b.n; ++s) max_sum_dev = std::max(max_sum_dev, std::abs(sums[s] - 1.0));
  }
  Outcome o;
  o.pass = max_dev <= kMarginalRelTol && max_sum_dev <= kLetterSumTol && missing == 0;
  o.detail = str("%lld placements, max rel dev %.2e, max letter-sum dev %.2e, %d unmatched",
                 checked, max_dev, max_sum_dev, missing);
  return o;
}

// 3. Both general MAP passes agree bitwise with each other and with the
// enumerated optimum; on non-positive integer models the dedicated solver
// joins the agreement and its witness labeling reproduces the optimum.
Outcome criterion3() {
  std::mt19937_64 rng(33);
  int bad_pair = 0, bad_int = 0, bad_solver = 0, bad_witness = 0;
  double max_real_dev = 0.0;
  for (int rep = 0; rep < 200; ++rep) {
    testutil::RandomBankOptions opt;
    opt.integer_energies = rep < 100;
    PatternBank b = random_bank(rng, opt);
    double zb = pcrf::infer_basic<MinPlus>(b);
    double zf = pcrf::infer_fast<MinPlus>(b);
    double zm = pcrf::oracle::brute_force_map(b).first;
    if (zb != zf) ++bad_pair;
    if (opt.integer_energies) {
      if (zb != zm) ++bad_int;
    } else {
      max_real_dev = std::max(max_real_dev, std::abs(zb - zm));
    }
  }
  // Integer energies keep every partial sum exactly representable, so the
  // three-way equality below is honest rather than a rounding accident.
  for (int rep = 0; rep < 200; ++rep) {
    testutil::RandomBankOptions opt;
    opt.nonpositive = true;
    opt.integer_energies = true;
    PatternBank b = random_bank(rng, opt);
    double zb = pcrf::infer_basic<MinPlus>(b);
    double zf = pcrf::infer_fast<MinPlus>(b);
    MapSolver solver(b);
    if (solver.partition() != zb || zb != zf) ++bad_solver;
    if (window_cost<MinPlus>(b, solver.labeling()) != solver.partition()) ++bad_witness;
  }
  Outcome o;
  o.pass = bad_pair == 0 && bad_int == 0 && max_real_dev <= kMapRealTol && bad_solver == 0 &&
           bad_witness == 0;
  o.detail = str("pair mismatches %d, integer mismatches %d, real max dev %.2e, "
                 "solver mismatches %d, witness mismatches %d",
                 bad_pair, bad_int, max_real_dev, bad_solver, bad_witness);
  return o;
}

// 4. Chi-square of 1e5 exact samples against enumerated probabilities on the
// fixed two-letter model, in every sampler mode, plus the per-step counting
// identity: each layer's candidate sets cover the previous layer once per
// letter.
Outcome criterion4() {
  PatternBank b = testutil::fig_bank(5);
  double z = pcrf::oracle::brute_force_Z<SumProduct>(b);
  std::vector<double> p(32);
  for (long long idx = 0; idx < 32; ++idx)
    p[idx] = window_cost<SumProduct>(b, line_at(b, 5, idx)) / z;

  auto mode_stat = [&](Sampler::Mode mode, std::uint64_t seed) {
    Sampler sampler(b, mode);
    CounterRng rng(seed);
    const int draws = 100000;
    std::vector<int> counts(32, 0);
    for (int i = 0; i < draws; ++i) {
      Word x = sampler.draw(rng);
      int idx = 0;
      for (int c : x) idx = idx * 2 + c;
      ++counts[idx];
    }
    double stat = 0.0;
    for (int idx = 0; idx < 32; ++idx) {
      double e = draws * p[idx];
      stat += (counts[idx] - e) * (counts[idx] - e) / e;
    }
    return stat;
  };
  double s_direct = mode_stat(Sampler::Mode::direct, 211);
  double s_alias = mode_stat(Sampler::Mode::alias, 212);
  double s_pre = mode_stat(Sampler::Mode::alias_precomputed, 213);

  std::mt19937_64 rng(44);
  int bad_cover = 0;
  for (int rep = 0; rep < 101; ++rep) {
    PatternBank rb = rep == 0 ? testutil::fig_bank(5) : random_bank(rng);
    PatternCore core(rb, Variant::Prefixes);
    DeltaIndex deltas(core);
    for (int s = 1; s <= core.n(); ++s) {
      const Layer& next = core.layer(s);
      long long covered = 0;
      for (int v = 0; v < next.size(); ++v) {
        if (v == next.epsilon_node) continue;
        covered += deltas.plan(s, v).count;
      }
      if (covered != static_cast<long long>(core.layer(s - 1).size()) * rb.letters()) ++bad_cover;
    }
  }
  Outcome o;
  o.pass = s_direct < kChiSquare999Df31 && s_alias < kChiSquare999Df31 &&
           s_pre < kChiSquare999Df31 && bad_cover == 0;
  o.detail = str("chi-square %.1f/%.1f/%.1f vs %.3f, %d coverage violations", s_direct, s_alias,
                 s_pre, kChiSquare999Df31, bad_cover);
  return o;
}

// 5. Structural bounds on 500 random banks: the special-node count versus
// the distinguished count, the minimal-container degree bound, the pattern
// counting inequalities, the interface-set inclusions, and monotonicity of
// the context-shrinking interface family.
Outcome criterion5() {
  std::mt19937_64 rng(55);
  int bad_sigma = 0, bad_subset = 0, bad_phi = 0, bad_stats = 0, bad_iface = 0, bad_mono = 0;
  for (int rep = 0; rep < 500; ++rep) {
    PatternBank b = random_bank(rng);

    PatternCore pre(b, Variant::ProperPrefixes);
    for (int s = 1; s <= b.n; ++s) {
      const Layer& ext = pre.extended_layer(s);
      pcrf::SpecialLayer sp = pcrf::build_special_layer(ext);
      int marked = 0;
      for (int v = 0; v < ext.size(); ++v)
        if (ext.nodes[v].in_pi || ext.nodes[v].in_gamma) ++marked;
      if (static_cast<int>(sp.specials.size()) > 2 * marked - 1) ++bad_sigma;
      for (int v = 0; v < ext.size(); ++v)
        if ((ext.nodes[v].in_pi || ext.nodes[v].in_gamma) &&
            sp.kind[v] != pcrf::SpecialLayer::kSpecial)
          ++bad_subset;
    }

    // Recount, straight from the definition, how many placements list each
    // placement as a minimal strict container; the engine asserts the same
    // bound internally while building its container lists.
    Marginals m(b);
    const PatternCore& core = m.core();
    struct Ref {
      int s, v, start;
      const Word* u;
    };
    std::vector<Ref> pats;
    for (int s = 1; s <= b.n; ++s) {
      const Layer& L = core.layer(s);
      for (int v = 0; v < L.size(); ++v) {
        const Word& u = core.word(L.nodes[v].word);
        pats.push_back({s, v, s - static_cast<int>(u.size()) + 1, &u});
      }
    }
    auto contains = [](const Ref& inner, const Ref& outer, bool strict) {
      int di = inner.start - outer.start;
      int dj = outer.s - inner.s;
      if (strict ? (di < 1 || dj < 1) : (di < 0 || dj < 0)) return false;
      return std::equal(inner.u->begin(), inner.u->end(), outer.u->begin() + di);
    };
    std::vector<int> deg(pats.size(), 0);
    for (std::size_t ai = 0; ai < pats.size(); ++ai)
      for (std::size_t bi = 0; bi < pats.size(); ++bi) {
        if (!contains(pats[ai], pats[bi], true)) continue;
        bool minimal = true;
        for (std::size_t gi = 0; gi < pats.size() && minimal; ++gi)
          if (gi != bi && contains(pats[ai], pats[gi], true) &&
              contains(pats[gi], pats[bi], false))
            minimal = false;
        if (minimal) ++deg[bi];
      }
    for (std::size_t bi = 0; bi < pats.size(); ++bi)
      if (deg[bi] > 2 * static_cast<int>(pats[bi].u->size())) ++bad_phi;

    BankStats st = pcrf::compute_bank_stats(b);
    if (!(st.P <= st.L && st.P_prime <= st.P && st.P <= st.P_prime * b.letters())) ++bad_stats;

    std::set<int> iface = core.interface_words();
    for (int g = 0; g < b.size(); ++g)
      if (!iface.count(core.find_word(b.word(g)))) ++bad_iface;
    if (static_cast<int>(iface.size()) > st.P) ++bad_iface;

    std::set<int> prev = core.compute_I_delta(0);
    for (int d = 1; d <= st.ell_max + 1; ++d) {
      std::set<int> cur = core.compute_I_delta(d);
      if (!std::includes(prev.begin(), prev.end(), cur.begin(), cur.end())) ++bad_mono;
      prev = std::move(cur);
    }
  }
  Outcome o;
  o.pass = bad_sigma == 0 && bad_subset == 0 && bad_phi == 0 && bad_stats == 0 &&
           bad_iface == 0 && bad_mono == 0;
  o.detail = str("violations: special %d, subset %d, container-degree %d, counts %d, "
                 "interface %d, monotonicity %d",
                 bad_sigma, bad_subset, bad_phi, bad_stats, bad_iface, bad_mono);
  return o;
}

// Path-difference queries against enumeration of every line prefix whose
// longest tracked suffix separates the two endpoints.
template <pcrf::SemiringLike S>
void check_path_folds(std::mt19937_64& rng, int reps, long long& checked, int& bad,
                      double& max_dev) {
  testutil::RandomBankOptions opt;
  opt.max_n = 6;
  for (int rep = 0; rep < reps; ++rep) {
    PatternBank b = random_bank(rng, opt);
    SemiringChain<S> chain(b, SemiringChain<S>::Mode::basic);
    const PatternCore& core = chain.core();
    for (int t = 1; t <= core.n(); ++t) {
      const Layer& layer = core.layer(t);
      LayerLift<S> lift(layer, chain.M(t));
      long long total = pow_ll(b.letters(), t);
      for (int v = 0; v < layer.size(); ++v)
        for (int d = v + 1; d < layer.nodes[v].subtree_end; ++d) {
          const Word& wa = core.word(layer.nodes[v].word);
          const Word& wb = core.word(layer.nodes[d].word);
          auto want = S::zero();
          for (long long idx = 0; idx < total; ++idx) {
            Word x = line_at(b, t, idx);
            if (ends_with(x, wa) && !ends_with(x, wb))
              want = S::plus(want, window_cost<S>(b, x));
          }
          auto got = lift.V(v, d);
          ++checked;
          if constexpr (std::is_same_v<S, SumProduct>) {
            max_dev = std::max(max_dev, rel_dev(got, want));
          } else {
            if (got != want) ++bad;
          }
        }
    }
  }
}

// 6. Kernel equivalences: path-difference queries, interval folds against
// linear scans, and the transform-based correlation against the direct one.
Outcome criterion6() {
  std::mt19937_64 rng(66);
  long long folds = 0;
  int bad_fold = 0;
  double max_fold_dev = 0.0;
  check_path_folds<CountSum>(rng, 25, folds, bad_fold, max_fold_dev);
  check_path_folds<SumProduct>(rng, 25, folds, bad_fold, max_fold_dev);

  auto scan_intervals = [](auto tag, std::mt19937_64& r) {
    using S = decltype(tag);
    int bad = 0;
    for (int rep = 0; rep < 25; ++rep) {
      int d = rep == 0 ? 64 : std::uniform_int_distribution<int>(1, 64)(r);
      std::vector<typename S::value_type> vals(d);
      for (auto& v : vals)
        v = S::cost_from_energy(std::uniform_int_distribution<int>(-8, 8)(r) / 2.0);
      IntervalFold<S> fold(vals);
      for (int i = 1; i <= d; ++i) {
        auto acc = S::zero();
        for (int j = i; j <= d; ++j) {
          acc = S::plus(acc, vals[j - 1]);
          if (fold.fold(i, j) != acc) ++bad;
        }
      }
    }
    return bad;
  };
  std::mt19937_64 rng2(67);
  int bad_scan = scan_intervals(MinPlus{}, rng2) + scan_intervals(CountSum{}, rng2) +
                 scan_intervals(BoolOrAnd{}, rng2);

  std::mt19937_64 rng3(68);
  double max_fft_dev = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    int la = rep == 0 ? 512 : std::uniform_int_distribution<int>(2, 512)(rng3);
    int lb = std::uniform_int_distribution<int>(1, std::min(6, la))(rng3);
    Word alpha(la), beta(lb);
    for (int& c : alpha) c = std::uniform_int_distribution<int>(0, 1)(rng3);
    for (int& c : beta) c = std::uniform_int_distribution<int>(0, 1)(rng3);
    std::vector<double> lam = pcrf::occurrence_mask(alpha, beta);
    std::vector<double> bb(la);
    for (double& x : bb) x = std::uniform_real_distribution<double>(-1.0, 1.0)(rng3);
    std::vector<double> direct = pcrf::correlate_direct(bb, lam);
    std::vector<double> fast = pcrf::correlate_fft(bb, lam);
    for (std::size_t i = 0; i < direct.size(); ++i)
      max_fft_dev = std::max(max_fft_dev, std::abs(direct[i] - fast[i]));
  }
  Outcome o;
  o.pass = bad_fold == 0 && max_fold_dev <= kKernelRelTol && bad_scan == 0 &&
           max_fft_dev <= kKernelAbsTol;
  o.detail = str("%lld path folds (max rel dev %.2e, %d exact misses), %d interval misses, "
                 "transform max dev %.2e",
                 folds, max_fold_dev, bad_fold, bad_scan, max_fft_dev);
  return o;
}

volatile double g_sink = 0.0;

// Best-of-k wall time of `body`, with k calibrated so the samples together
// cover roughly 30ms; the single-core box makes lone runs too noisy.
template <typename F>
double best_seconds(F&& body) {
  using clock = std::chrono::steady_clock;
  auto once = [&] {
    auto t0 = clock::now();
    body();
    return std::chrono::duration<double>(clock::now() - t0).count();
  };
  double first = once();
  int reps = std::clamp(static_cast<int>(0.08 / std::max(first, 1e-7)), 5, 400);
  double best = first;
  for (int r = 0; r < reps; ++r) best = std::min(best, once());
  return best;
}

// Complete depth-d binary trie plus one length-6 anchor, so the pattern count
// roughly doubles with d while the longest word stays fixed.
PatternBank trie_bank(int depth, int n) {
  PatternBank b = pcrf::make_bank({"0", "1"}, n);
  for (int m = 0; m < (1 << depth); ++m) {
    Word u(depth);
    for (int k = 0; k < depth; ++k) u[k] = (m >> (depth - 1 - k)) & 1;
    b.add_pattern(u, -0.1);
  }
  if (depth < 6) b.add_pattern(Word(6, 0), -0.1);
  b.close_alphabet();
  return b;
}

std::string ratio_text(const std::vector<double>& times) {
  std::string s;
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!s.empty()) s += '/';
    s += str("%.2f", times[i] / times[i - 1]);
  }
  return s;
}

bool ratios_within(const std::vector<double>& times, double lo, double hi) {
  for (std::size_t i = 1; i < times.size(); ++i) {
    double r = times[i] / times[i - 1];
    if (r < lo || r > hi) return false;
  }
  return true;
}

// 7. Runtime slopes. Doubling n should roughly double both chain passes, and
// doubling the pattern count at fixed n should not outgrow the doubling.
// Wall-clock checks retry a few times before failing; thresholds stay put.
Outcome criterion7() {
  const std::vector<int> sizes = {1 << 10, 1 << 11, 1 << 12, 1 << 13, 1 << 14};
  auto sweep_n = [&](auto&& run) {
    std::vector<double> t;
    for (int n : sizes) {
      PatternBank b = testutil::fig_bank(n);
      t.push_back(best_seconds([&] { run(b); }));
    }
    return t;
  };
  auto run_ring = [](const PatternBank& b) {
    ChainSystem<SumProduct> sys(b);
    g_sink = g_sink + sys.messages.partition_scaled().mantissa;
  };
  auto run_general = [](const PatternBank& b) { g_sink = g_sink + pcrf::infer_fast<MinPlus>(b); };

  std::vector<double> t1, t5, tp;
  std::vector<int> pcounts;
  bool ok1 = false, ok5 = false, okp = false;
  for (int attempt = 0; attempt < 4 && !(ok1 && ok5 && okp); ++attempt) {
    if (!ok1) {
      t1 = sweep_n(run_ring);
      ok1 = ratios_within(t1, kLinearRatioLo, kLinearRatioHi);
    }
    if (!ok5) {
      t5 = sweep_n(run_general);
      ok5 = ratios_within(t5, kLinearRatioLo, kLinearRatioHi);
    }
    if (!okp) {
      tp.clear();
      pcounts.clear();
      for (int depth = 3; depth <= 6; ++depth) {
        PatternBank b = trie_bank(depth, 1 << 14);
        pcounts.push_back(pcrf::compute_bank_stats(b).P);
        tp.push_back(best_seconds([&] { run_general(b); }));
      }
      okp = ratios_within(tp, 0.0, kDoublingRatioMax);
    }
  }
  Outcome o;
  o.pass = ok1 && ok5 && okp;
  o.detail = str("ring n-ratios %s, general n-ratios %s, P %d..%d ratios %s",
                 ratio_text(t1).c_str(), ratio_text(t5).c_str(), pcounts.front(), pcounts.back(),
                 ratio_text(tp).c_str());
  return o;
}

// 8. Non-positive MAP sandwich: every solver message stays at or above the
// cheapest prefix ending with its word, and the reported optimum never
// exceeds the cost of any sampled labeling.
Outcome criterion8() {
  std::mt19937_64 rng(88);
  int bad_floor = 0, bad_upper = 0;
  long long messages = 0;
  for (int rep = 0; rep < 100; ++rep) {
    testutil::RandomBankOptions opt;
    opt.max_n = 7;
    opt.nonpositive = true;
    PatternBank b = random_bank(rng, opt);
    MapSolver solver(b);
    for (int s = 0; s <= b.n; ++s) {
      const Layer& L = solver.core().layer(s);
      const std::vector<double>& M = solver.M(s);
      std::vector<double> floor(L.size(), std::numeric_limits<double>::infinity());
      long long total = pow_ll(b.letters(), s);
      for (long long idx = 0; idx < total; ++idx) {
        Word x = line_at(b, s, idx);
        double c = window_cost<MinPlus>(b, x);
        for (int v = 0; v < L.size(); ++v)
          if (ends_with(x, solver.core().word(L.nodes[v].word)))
            floor[v] = std::min(floor[v], c);
      }
      for (int v = 0; v < L.size(); ++v) {
        ++messages;
        if (std::isfinite(floor[v]) && M[v] < floor[v] - kSandwichTol) ++bad_floor;
      }
    }
    double z = solver.partition();
    long long total = pow_ll(b.letters(), b.n);
    std::uniform_int_distribution<long long> pick(0, total - 1);
    for (int k = 0; k < 1000; ++k) {
      Word x = line_at(b, b.n, pick(rng));
      if (z > window_cost<MinPlus>(b, x) + kSandwichTol) ++bad_upper;
    }
  }
  Outcome o;
  o.pass = bad_floor == 0 && bad_upper == 0;
  o.detail = str("%lld messages, %d floor violations, %d upper-bound violations", messages,
                 bad_floor, bad_upper);
  return o;
}

}  // namespace

int main() {
  struct Row {
    const char* title;
    Outcome (*run)();
  };
  const Row rows[] = {
      {"ring partition vs oracle", criterion1},
      {"marginals vs oracle", criterion2},
      {"map three-way agreement", criterion3},
      {"sampling fidelity", criterion4},
      {"structural bounds", criterion5},
      {"kernel equivalences", criterion6},
      {"complexity scaling", criterion7},
      {"map sandwich bounds", criterion8},
  };
  int failed = 0;
  for (int i = 0; i < 8; ++i) {
    Outcome o = rows[i].run();
    std::printf("criterion %d [%s] %s: %s\n", i + 1, o.pass ? "PASS" : "FAIL", rows[i].title,
                o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  return failed;
}
