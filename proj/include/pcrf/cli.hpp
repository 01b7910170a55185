#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <utility>

#include "pcrf/inference_ring.hpp"
#include "pcrf/inference_semiring.hpp"
#include "pcrf/map_nonpositive.hpp"
#include "pcrf/marginals.hpp"
#include "pcrf/model_io.hpp"
#include "pcrf/oracle.hpp"
#include "pcrf/sampling.hpp"

namespace pcrf::cli {

/// Command driver behind the pcrf binary. Each command writes structured text
/// records to `out`, one record per line: the command name, then key=value
/// fields. Doubles use 17 significant digits; where the rescaled ring chain
/// ran, the true value is z * 2^log2. Output is byte-identical across runs
/// for the same model, command, flags, and seed; the --timing record is the
/// documented exception.
///
/// Bad input surfaces as ModelError (exit 1 in the binary); a broken internal
/// invariant as std::logic_error (exit 2).

enum class Algo { automatic, alg1, alg4, alg5, alg6 };

inline const char* algo_name(Algo a) {
  switch (a) {
    case Algo::automatic: return "auto";
    case Algo::alg1: return "alg1";
    case Algo::alg4: return "alg4";
    case Algo::alg5: return "alg5";
    case Algo::alg6: return "alg6";
  }
  return "?";
}

struct Request {
  std::string command;  // partition | map | marginals | sample | stats | check
  ModelFile model;
  Algo algorithm = Algo::automatic;
  std::uint64_t seed = 0;  // sample only; the binary defaults it from PCRF_SEED
  int count = 1;           // sample only
  bool fft = false;        // map only: window costs through the transform tables
  bool exact_pi_tilde = false;  // map only: exact suffix classes
  int delta = 1;                // map only: transform split threshold
  bool timing = false;
};

namespace detail {

template <SemiringLike S>
std::string z_text(typename S::value_type z) {
  if constexpr (std::is_same_v<typename S::value_type, double>)
    return format_double(z);
  else
    return std::to_string(static_cast<long long>(z));
}

/// Runs the general chain in basic or fast mode; the two must agree on every
/// valid model, which the check command enforces against the oracle.
template <SemiringLike S>
void emit_general(Algo a, const PatternBank& bank, SemiringKind k, std::ostream& out) {
  auto z = a == Algo::alg4 ? infer_basic<S>(bank) : infer_fast<S>(bank);
  out << "partition semiring=" << semiring_name(k) << " algorithm=" << algo_name(a)
      << " z=" << z_text<S>(z) << "\n";
}

inline double rel_dev(double v, double ref) {
  double d = std::abs(v - ref);
  double m = std::max(std::abs(ref), 1e-300);
  return d / m;
}

inline long long count_labelings(const PatternBank& bank, long long cap) {
  long long total = 1;
  for (int s = 0; s < bank.n; ++s) {
    total *= bank.letters();
    if (total > cap) return cap + 1;
  }
  return total;
}

}  // namespace detail

inline void run_partition(const Request& req, const PatternBank& bank, std::ostream& out) {
  SemiringKind k = req.model.semiring;
  bool ring = k == SemiringKind::sum_product || k == SemiringKind::count;
  Algo a = req.algorithm;
  if (a == Algo::automatic) a = ring ? Algo::alg1 : Algo::alg5;
  if (a == Algo::alg6) throw ModelError("alg6 solves map problems; run the map command");
  if (a == Algo::alg1 && !ring)
    throw ModelError(std::string("alg1 needs a ring semiring (sum-product or count); the ") +
                     semiring_name(k) + " model runs under alg4 or alg5");
  switch (k) {
    case SemiringKind::sum_product:
      if (a == Algo::alg1) {
        ChainSystem<SumProduct> sys(bank);
        ScaledReal z = sys.messages.partition_scaled();
        out << "partition semiring=sum-product algorithm=alg1 z=" << format_double(z.mantissa)
            << " log2=" << z.exp2 << "\n";
      } else {
        detail::emit_general<SumProduct>(a, bank, k, out);
      }
      break;
    case SemiringKind::count:
      if (a == Algo::alg1)
        out << "partition semiring=count algorithm=alg1 z=" << partition_value<CountSum>(bank)
            << "\n";
      else
        detail::emit_general<CountSum>(a, bank, k, out);
      break;
    case SemiringKind::min_plus:
      detail::emit_general<MinPlus>(a, bank, k, out);
      break;
    case SemiringKind::boolean:
      detail::emit_general<BoolOrAnd>(a, bank, k, out);
      break;
  }
}

inline void run_map(const Request& req, const PatternBank& bank, std::ostream& out) {
  Algo a = req.algorithm;
  bool fell_back = false;
  if (a == Algo::automatic) {
    if (all_costs_nonpositive(bank)) {
      a = Algo::alg6;
    } else {
      a = Algo::alg5;
      fell_back = true;
    }
  }
  if (a != Algo::alg5 && a != Algo::alg6)
    throw ModelError("map runs alg6, or alg5 as the general fallback");
  if (a == Algo::alg6) {
    MapOptions opt;
    opt.variant = req.exact_pi_tilde ? Variant::MapTildeExact : Variant::MapSimple;
    opt.transform_tables = req.fft;
    opt.split_delta = req.delta;
    MapSolver ms(bank, opt);
    out << "map algorithm=alg6 energy=" << format_double(ms.partition())
        << " labeling=" << bank.spell(ms.labeling()) << "\n";
  } else {
    // The general chain gives the minimum energy but no witness labeling.
    double z = infer_fast<MinPlus>(bank);
    out << "map algorithm=alg5";
    if (fell_back) out << " note=positive-cost-fallback";
    out << " energy=" << format_double(z) << "\n";
  }
}

inline void run_marginals(const Request& req, const PatternBank& bank, std::ostream& out) {
  if (req.model.semiring != SemiringKind::sum_product)
    throw ModelError("marginals need the sum-product semiring");
  Marginals mg(bank);
  ScaledReal z = mg.partition();
  std::vector<Marginals::Occurrence> occ = mg.occurrences();
  out << "marginals z=" << format_double(z.mantissa) << " log2=" << z.exp2
      << " count=" << occ.size() << "\n";
  for (const auto& o : occ)
    out << "marginal word=" << bank.spell(bank.word(o.word)) << " start=" << o.start
        << " end=" << o.end << " p=" << format_double(o.probability) << "\n";
}

inline void run_sample(const Request& req, const PatternBank& bank, std::ostream& out) {
  if (req.model.semiring != SemiringKind::sum_product)
    throw ModelError("sampling needs the sum-product semiring");
  if (req.count < 1) throw ModelError("sample count must be positive");
  Sampler sampler(bank);
  CounterRng rng(req.seed);
  out << "samples count=" << req.count << " seed=" << req.seed << "\n";
  for (int i = 0; i < req.count; ++i)
    out << "sample index=" << i << " labeling=" << bank.spell(sampler.draw(rng)) << "\n";
}

inline void run_stats(const PatternBank& bank, std::ostream& out) {
  BankStats st = compute_bank_stats(bank);
  out << "stats n=" << bank.n << " L=" << st.L << " P=" << st.P << " Pprime=" << st.P_prime
      << " interface=" << st.I_size << "\n";
}

/// Exhaustive cross-check of every engine path against direct enumeration.
/// Prints the verdict with the largest deviations seen; a deviation beyond
/// 1e-9 still prints, then raises an internal error.
inline void run_check(const Request& req, const PatternBank& bank, std::ostream& out) {
  constexpr long long kMaxLabelings = 1ll << 16;
  constexpr double kTol = 1e-9;
  long long total = detail::count_labelings(bank, kMaxLabelings);
  if (total > kMaxLabelings)
    throw ModelError("refusing to enumerate more than 65536 labelings; check needs |D|^n <= 2^16");
  SemiringKind k = req.model.semiring;
  double z_dev = 0.0, marginal_dev = -1.0, map_dev = -1.0;
  switch (k) {
    case SemiringKind::sum_product: {
      double zo = oracle::brute_force_Z<SumProduct>(bank);
      ChainSystem<SumProduct> sys(bank);
      z_dev = detail::rel_dev(sys.messages.partition_scaled().value(), zo);
      z_dev = std::max(z_dev, detail::rel_dev(infer_basic<SumProduct>(bank), zo));
      z_dev = std::max(z_dev, detail::rel_dev(infer_fast<SumProduct>(bank), zo));
      Marginals mg(bank);
      std::map<std::pair<std::string, int>, double> ref;
      for (const auto& pw : oracle::brute_force_marginals(bank))
        ref[{pw.word, pw.start}] = pw.weight;
      marginal_dev = 0.0;
      for (const auto& o : mg.occurrences()) {
        auto it = ref.find({bank.spell(bank.word(o.word)), o.start});
        PCRF_CHECK(it != ref.end(), "engine reports a placement the oracle lacks");
        marginal_dev = std::max(marginal_dev, std::abs(o.probability - it->second / zo));
      }
      break;
    }
    case SemiringKind::count: {
      long long zo = oracle::brute_force_Z<CountSum>(bank);
      z_dev = std::abs(static_cast<double>(partition_value<CountSum>(bank) - zo));
      z_dev = std::max(z_dev, std::abs(static_cast<double>(infer_basic<CountSum>(bank) - zo)));
      z_dev = std::max(z_dev, std::abs(static_cast<double>(infer_fast<CountSum>(bank) - zo)));
      break;
    }
    case SemiringKind::min_plus: {
      double zo = oracle::brute_force_Z<MinPlus>(bank);
      z_dev = std::abs(infer_basic<MinPlus>(bank) - zo);
      z_dev = std::max(z_dev, std::abs(infer_fast<MinPlus>(bank) - zo));
      if (all_costs_nonpositive(bank)) {
        MapSolver ms(bank);
        map_dev = std::abs(ms.partition() - zo);
        map_dev = std::max(
            map_dev, std::abs(oracle::labeling_cost<MinPlus>(bank, ms.labeling()) - ms.partition()));
      }
      break;
    }
    case SemiringKind::boolean: {
      int zo = oracle::brute_force_Z<BoolOrAnd>(bank);
      z_dev = std::abs(infer_basic<BoolOrAnd>(bank) - zo);
      z_dev = std::max(z_dev, std::abs(static_cast<double>(infer_fast<BoolOrAnd>(bank) - zo)));
      break;
    }
  }
  double worst = std::max({z_dev, marginal_dev, map_dev});
  bool ok = worst <= kTol;
  out << "check verdict=" << (ok ? "all-match" : "mismatch") << " labelings=" << total
      << " z-deviation=" << format_double(z_dev);
  if (marginal_dev >= 0.0) out << " marginal-deviation=" << format_double(marginal_dev);
  if (map_dev >= 0.0) out << " map-deviation=" << format_double(map_dev);
  out << "\n";
  if (!ok) throw std::logic_error("check found deviations beyond tolerance");
}

/// Builds the bank (closure notice on `warn`) and dispatches the command.
inline void run(const Request& req, std::ostream& out, std::ostream& warn) {
  auto t0 = std::chrono::steady_clock::now();
  PatternBank bank = build_bank(req.model, &warn);
  if (req.command == "partition")
    run_partition(req, bank, out);
  else if (req.command == "map")
    run_map(req, bank, out);
  else if (req.command == "marginals")
    run_marginals(req, bank, out);
  else if (req.command == "sample")
    run_sample(req, bank, out);
  else if (req.command == "stats")
    run_stats(bank, out);
  else if (req.command == "check")
    run_check(req, bank, out);
  else
    throw ModelError("unknown command '" + req.command + "'");
  if (req.timing) {
    std::chrono::duration<double, std::milli> ms = std::chrono::steady_clock::now() - t0;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", ms.count());
    out << "timing ms=" << buf << "\n";
  }
}

}  // namespace pcrf::cli
