#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "pcrf/semiring.hpp"

namespace pcrf {

/// Raised on invalid user input (bad model data, bad arguments). Distinct from
/// std::logic_error, which signals a broken internal invariant.
struct ModelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define PCRF_CHECK(cond, msg) \
  do {                        \
    if (!(cond)) throw std::logic_error(std::string("internal invariant failed: ") + (msg)); \
  } while (0)

/// Words are sequences of letter ids into the bank's alphabet.
using Word = std::vector<int>;

struct WordHash {
  std::size_t operator()(const Word& w) const {
    std::uint64_t h = 1469598103934665603ull;
    for (int c : w) {
      h ^= static_cast<std::uint64_t>(c) + 0x9e3779b97f4a7c15ull;
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }
};

/// Extra energy attached to one word at one fixed start position (1-based).
struct CostOverride {
  int word = -1;
  int start = 0;
  double energy = 0.0;
};

/// The model data: alphabet D, word set, energies, and sequence length n.
/// A word's cost is the combination of all its energy entries; a word with an
/// empty entry list costs the multiplicative identity in every semiring, which
/// is what alphabet closure relies on.
class PatternBank {
 public:
  std::vector<std::string> alphabet;  // symbol text per letter id
  int n = 0;                          // positions 1..n

  int letters() const { return static_cast<int>(alphabet.size()); }
  int size() const { return static_cast<int>(words_.size()); }
  const Word& word(int id) const { return words_[id]; }
  const std::vector<Word>& words() const { return words_; }
  const std::vector<double>& base_energies(int id) const { return base_energies_[id]; }
  const std::vector<CostOverride>& overrides() const { return overrides_; }
  const std::vector<int>& closure_added() const { return closure_added_; }

  int find_word(const Word& w) const {
    auto it = index_.find(w);
    return it == index_.end() ? -1 : it->second;
  }

  /// Adds the word with no energy entries if absent; returns its id.
  int intern(const Word& w) {
    if (w.empty()) throw ModelError("pattern words must be non-empty");
    for (int c : w)
      if (c < 0 || c >= letters()) throw ModelError("pattern word uses a letter outside the alphabet");
    auto [it, fresh] = index_.try_emplace(w, size());
    if (fresh) {
      words_.push_back(w);
      base_energies_.emplace_back();
    }
    return it->second;
  }

  int add_pattern(const Word& w, double energy) {
    int id = intern(w);
    base_energies_[id].push_back(energy);
    return id;
  }

  void add_override(const Word& w, int start, double energy) {
    int len = static_cast<int>(w.size());
    if (start < 1 || start + len - 1 > n)
      throw ModelError("override interval lies outside [1, n]");
    overrides_.push_back({intern(w), start, energy});
  }

  /// Interns every missing single-letter word (with no energy entries) so that
  /// D is a subset of the word set. Returns the ids that were added.
  std::vector<int> close_alphabet() {
    std::vector<int> added;
    for (int c = 0; c < letters(); ++c) {
      Word w{c};
      if (find_word(w) < 0) {
        added.push_back(intern(w));
        closure_added_.push_back(added.back());
      }
    }
    return added;
  }

  bool alphabet_closed() const {
    for (int c = 0; c < letters(); ++c)
      if (find_word(Word{c}) < 0) return false;
    return true;
  }

  std::string spell(const Word& w) const {
    std::string out;
    for (int c : w) out += alphabet[c];
    return out;
  }

 private:
  std::vector<Word> words_;
  std::vector<std::vector<double>> base_energies_;
  std::vector<CostOverride> overrides_;
  std::vector<int> closure_added_;
  std::unordered_map<Word, int, WordHash> index_;
};

inline PatternBank make_bank(std::vector<std::string> alphabet, int n) {
  if (alphabet.empty()) throw ModelError("alphabet must be non-empty");
  if (n < 1) throw ModelError("sequence length must be at least 1");
  std::set<std::string> seen(alphabet.begin(), alphabet.end());
  if (seen.size() != alphabet.size()) throw ModelError("alphabet symbols must be distinct");
  if (seen.count(std::string())) throw ModelError("alphabet symbols must be non-empty");
  PatternBank b;
  b.alphabet = std::move(alphabet);
  b.n = n;
  return b;
}

/// Cost of word `id` as a pattern ending at position `end`, combining the base
/// entries with any overrides anchored at its start. Linear in the override
/// list; the layer machinery uses an indexed path instead.
template <SemiringLike S>
typename S::value_type pattern_cost(const PatternBank& bank, int id, int end) {
  auto v = S::one();
  for (double e : bank.base_energies(id)) v = S::times(v, S::cost_from_energy(e));
  int start = end - static_cast<int>(bank.word(id).size()) + 1;
  for (const auto& o : bank.overrides())
    if (o.word == id && o.start == start) v = S::times(v, S::cost_from_energy(o.energy));
  return v;
}

/// Mirror image of the model: every word reversed, override anchors reflected
/// so that a pattern at [i, j] maps to one at [n+1-j, n+1-i].
inline PatternBank reverse_bank(const PatternBank& bank) {
  PatternBank out = make_bank(bank.alphabet, bank.n);
  for (int id = 0; id < bank.size(); ++id) {
    Word w = bank.word(id);
    std::reverse(w.begin(), w.end());
    out.intern(w);
    for (double e : bank.base_energies(id)) out.add_pattern(w, e);
  }
  for (const auto& o : bank.overrides()) {
    Word w = bank.word(o.word);
    int len = static_cast<int>(w.size());
    std::reverse(w.begin(), w.end());
    out.add_override(w, bank.n + 1 - (o.start + len - 1), o.energy);
  }
  return out;
}

struct BankStats {
  long long L = 0;    // total word length
  int ell_max = 0;    // longest word
  int P = 0;          // distinct non-empty prefixes
  int P_prime = 0;    // distinct proper prefixes, counting the empty word
  int I_size = 0;     // words that are both a prefix and a suffix of bank words
};

inline BankStats compute_bank_stats(const PatternBank& bank) {
  if (bank.size() == 0) throw ModelError("pattern set is empty");
  BankStats st;
  std::set<Word> prefixes, proper, suffixes;
  proper.insert(Word{});
  for (const Word& w : bank.words()) {
    st.L += static_cast<long long>(w.size());
    st.ell_max = std::max(st.ell_max, static_cast<int>(w.size()));
    for (std::size_t m = 1; m <= w.size(); ++m) {
      prefixes.insert(Word(w.begin(), w.begin() + m));
      if (m < w.size()) proper.insert(Word(w.begin(), w.begin() + m));
      suffixes.insert(Word(w.end() - m, w.end()));
    }
  }
  st.P = static_cast<int>(prefixes.size());
  st.P_prime = static_cast<int>(proper.size());
  for (const Word& w : prefixes)
    if (suffixes.count(w)) ++st.I_size;
  return st;
}

/// True when every word's combined energy (base entries plus overrides, summed
/// per anchored position) is non-positive; the precondition of the dedicated
/// MAP solver.
inline bool all_effective_energies_nonpositive(const PatternBank& bank) {
  std::vector<double> base(bank.size(), 0.0);
  for (int id = 0; id < bank.size(); ++id)
    for (double e : bank.base_energies(id)) base[id] += e;
  for (double b : base)
    if (b > 0.0) return false;
  std::unordered_map<long long, double> at;  // (word, start) -> combined
  for (const auto& o : bank.overrides()) {
    long long key = static_cast<long long>(o.word) * (bank.n + 2) + o.start;
    auto [it, fresh] = at.try_emplace(key, base[o.word]);
    it->second += o.energy;
  }
  for (const auto& [key, e] : at)
    if (e > 0.0) return false;
  return true;
}

}  // namespace pcrf
