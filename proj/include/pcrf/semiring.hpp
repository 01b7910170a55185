#pragma once

#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace pcrf {

/// A semiring is supplied as a stateless trait class. `plus`/`times` must be
/// commutative and associative with identities `zero`/`one`, `zero` must
/// absorb under `times`, and `times` must distribute over `plus`. Rings
/// additionally provide `minus` with (a minus b) plus b == a.
template <class S>
concept SemiringLike = requires(typename S::value_type a, typename S::value_type b, double e) {
  typename S::value_type;
  { S::zero() } -> std::same_as<typename S::value_type>;
  { S::one() } -> std::same_as<typename S::value_type>;
  { S::plus(a, b) } -> std::same_as<typename S::value_type>;
  { S::times(a, b) } -> std::same_as<typename S::value_type>;
  { S::cost_from_energy(e) } -> std::same_as<typename S::value_type>;
  { S::has_minus } -> std::convertible_to<bool>;
};

template <class S>
concept RingLike = SemiringLike<S> && S::has_minus;

/// Real field under (+, *). Energies e enter as costs exp(-e).
struct SumProduct {
  using value_type = double;
  static constexpr bool has_minus = true;
  static constexpr bool idempotent_plus = false;
  static constexpr bool rescalable = true;
  static value_type zero() { return 0.0; }
  static value_type one() { return 1.0; }
  static value_type plus(value_type a, value_type b) { return a + b; }
  static value_type times(value_type a, value_type b) { return a * b; }
  static value_type minus(value_type a, value_type b) { return a - b; }
  static value_type cost_from_energy(double e) { return std::exp(-e); }
  static constexpr const char* name() { return "sum-product"; }
};

/// Tropical semiring (min, +). Energies are used as costs unchanged.
struct MinPlus {
  using value_type = double;
  static constexpr bool has_minus = false;
  static constexpr bool idempotent_plus = true;
  static constexpr bool rescalable = false;
  static value_type zero() { return std::numeric_limits<double>::infinity(); }
  static value_type one() { return 0.0; }
  static value_type plus(value_type a, value_type b) { return a < b ? a : b; }
  static value_type times(value_type a, value_type b) { return a + b; }
  static value_type cost_from_energy(double e) { return e; }
  static constexpr const char* name() { return "min-plus"; }
};

/// Integers under (+, *). Energies are rounded and used as integer weights.
struct CountSum {
  using value_type = long long;
  static constexpr bool has_minus = true;
  static constexpr bool idempotent_plus = false;
  static constexpr bool rescalable = false;
  static value_type zero() { return 0; }
  static value_type one() { return 1; }
  static value_type plus(value_type a, value_type b) { return a + b; }
  static value_type times(value_type a, value_type b) { return a * b; }
  static value_type minus(value_type a, value_type b) { return a - b; }
  static value_type cost_from_energy(double e) { return static_cast<long long>(std::llround(e)); }
  static constexpr const char* name() { return "count"; }
};

/// Booleans under (or, and); 0/1 stored in an integral byte.
struct BoolOrAnd {
  using value_type = std::uint8_t;
  static constexpr bool has_minus = false;
  static constexpr bool idempotent_plus = true;
  static constexpr bool rescalable = false;
  static value_type zero() { return 0; }
  static value_type one() { return 1; }
  static value_type plus(value_type a, value_type b) { return a | b; }
  static value_type times(value_type a, value_type b) { return a & b; }
  static value_type cost_from_energy(double e) { return e != 0.0 ? 1 : 0; }
  static constexpr const char* name() { return "bool"; }
};

/// Outcome of checking one axiom over a list of sample elements.
struct LawCheck {
  std::string axiom;
  bool checked = false;  // false when the structure does not claim the axiom
  bool pass = false;
  std::string counterexample;
};

struct LawReport {
  std::vector<LawCheck> checks;
  bool semiring_ok = false;  // all semiring axioms pass
  bool ring_ok = false;      // semiring_ok and the minus axiom is claimed and passes
};

namespace detail {
template <class V>
std::string law_value_str(V v) {
  std::ostringstream os;
  os << +v;  // promotes uint8_t to int for readable output
  return os.str();
}
}  // namespace detail

/// Exhaustively checks the semiring axioms on `elems` (all pairs/triples).
/// Equality is exact, so callers should pass elements on which the operations
/// are closed and representable.
template <SemiringLike S>
LawReport verify_semiring_laws(const std::vector<typename S::value_type>& elems) {
  using V = typename S::value_type;
  LawReport rep;
  auto str = detail::law_value_str<V>;
  auto add = [&](const std::string& axiom, bool checked, bool pass, std::string cx) {
    rep.checks.push_back({axiom, checked, pass, std::move(cx)});
  };
  auto check2 = [&](const std::string& axiom, auto&& pred) {
    for (V a : elems)
      for (V b : elems)
        if (!pred(a, b)) {
          add(axiom, true, false, "a=" + str(a) + " b=" + str(b));
          return;
        }
    add(axiom, true, true, "");
  };
  auto check3 = [&](const std::string& axiom, auto&& pred) {
    for (V a : elems)
      for (V b : elems)
        for (V c : elems)
          if (!pred(a, b, c)) {
            add(axiom, true, false, "a=" + str(a) + " b=" + str(b) + " c=" + str(c));
            return;
          }
    add(axiom, true, true, "");
  };

  check2("plus-commutative", [](V a, V b) { return S::plus(a, b) == S::plus(b, a); });
  check3("plus-associative",
         [](V a, V b, V c) { return S::plus(S::plus(a, b), c) == S::plus(a, S::plus(b, c)); });
  check2("times-commutative", [](V a, V b) { return S::times(a, b) == S::times(b, a); });
  check3("times-associative",
         [](V a, V b, V c) { return S::times(S::times(a, b), c) == S::times(a, S::times(b, c)); });
  {
    bool ok = true;
    std::string cx;
    for (V a : elems) {
      if (S::plus(a, S::zero()) != a) { ok = false; cx = "a=" + str(a); break; }
    }
    add("zero-is-plus-identity", true, ok, cx);
  }
  {
    bool ok = true;
    std::string cx;
    for (V a : elems) {
      if (S::times(a, S::one()) != a) { ok = false; cx = "a=" + str(a); break; }
    }
    add("one-is-times-identity", true, ok, cx);
  }
  {
    bool ok = true;
    std::string cx;
    for (V a : elems) {
      if (S::times(a, S::zero()) != S::zero()) { ok = false; cx = "a=" + str(a); break; }
    }
    add("zero-absorbs", true, ok, cx);
  }
  check3("times-distributes-over-plus", [](V a, V b, V c) {
    return S::times(a, S::plus(b, c)) == S::plus(S::times(a, b), S::times(a, c));
  });

  rep.semiring_ok = true;
  for (const auto& c : rep.checks) rep.semiring_ok = rep.semiring_ok && c.pass;

  if constexpr (S::has_minus) {
    bool ok = true;
    std::string cx;
    for (V a : elems)
      for (V b : elems)
        if (S::plus(S::minus(a, b), b) != a) {
          ok = false;
          cx = "a=" + str(a) + " b=" + str(b);
          goto done;
        }
  done:
    add("minus-inverts-plus", true, ok, cx);
    rep.ring_ok = rep.semiring_ok && ok;
  } else {
    add("minus-inverts-plus", false, false, "operation not provided");
    rep.ring_ok = false;
  }
  return rep;
}

}  // namespace pcrf
