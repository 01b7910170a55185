#pragma once

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "pcrf/bank.hpp"

namespace pcrf {

/// Text model format, one directive per line:
///
///   pcrf 1
///   alphabet a b
///   length 6
///   semiring sum-product
///   pattern ab -1.25
///   override ab 3 0.5
///
/// '#' starts a comment and blank lines are skipped. The version line comes
/// first; alphabet and length appear exactly once, semiring at most once
/// (default sum-product), all three before any pattern or override line.
/// Words are written as concatenated alphabet symbols; with multi-character
/// symbols a word is segmented by a deterministic shortest-first fit, and the
/// same rule applies everywhere, so spelling a word back reproduces its text.
///
/// Structural problems are reported as "line N: ...". Violations of the model
/// invariants (symbols outside the alphabet, override intervals off the
/// chain, non-finite energies) are reported against the field path, e.g.
/// "patterns[2].word: ...".

enum class SemiringKind { sum_product, min_plus, count, boolean };

inline const char* semiring_name(SemiringKind k) {
  switch (k) {
    case SemiringKind::sum_product: return "sum-product";
    case SemiringKind::min_plus: return "min-plus";
    case SemiringKind::count: return "count";
    case SemiringKind::boolean: return "bool";
  }
  return "?";
}

inline bool semiring_from_name(const std::string& text, SemiringKind& out) {
  for (SemiringKind k : {SemiringKind::sum_product, SemiringKind::min_plus, SemiringKind::count,
                         SemiringKind::boolean}) {
    if (text == semiring_name(k)) {
      out = k;
      return true;
    }
  }
  return false;
}

struct ModelPattern {
  std::string word;
  double energy = 0.0;

  bool operator==(const ModelPattern&) const = default;
};

struct ModelOverride {
  std::string word;
  int start = 0;
  double energy = 0.0;

  bool operator==(const ModelOverride&) const = default;
};

/// Parsed model file. Words stay as written; segmentation into letter ids
/// happens when the pattern bank is built, so serializing reproduces the
/// original directives (closure-added patterns are never serialized).
struct ModelFile {
  int version = 1;
  std::vector<std::string> alphabet;
  int n = 0;
  SemiringKind semiring = SemiringKind::sum_product;
  std::vector<ModelPattern> patterns;
  std::vector<ModelOverride> overrides;

  bool operator==(const ModelFile&) const = default;
};

/// 17 significant digits: enough for doubles to round-trip exactly.
inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Segments `text` into alphabet letter ids. Dynamic programming over split
/// points; each end point keeps the first segment that reaches it, scanning
/// split points left to right and symbols in alphabet order, so the choice is
/// deterministic even when symbols overlap. False when no segmentation exists.
inline bool segment_word(const std::vector<std::string>& alphabet, const std::string& text,
                         Word& out) {
  out.clear();
  if (text.empty()) return false;
  int m = static_cast<int>(text.size());
  std::vector<int> via(m + 1, -1);  // letter id of the segment ending here
  std::vector<int> prev(m + 1, -1);
  prev[0] = 0;
  for (int i = 0; i < m; ++i) {
    if (prev[i] < 0 && i > 0) continue;
    for (int c = 0; c < static_cast<int>(alphabet.size()); ++c) {
      const std::string& sym = alphabet[c];
      int j = i + static_cast<int>(sym.size());
      if (j > m || via[j] >= 0) continue;
      if (text.compare(i, sym.size(), sym) == 0) {
        via[j] = c;
        prev[j] = i;
      }
    }
  }
  if (via[m] < 0 && m > 0) return false;
  for (int j = m; j > 0; j = prev[j]) out.push_back(via[j]);
  std::reverse(out.begin(), out.end());
  return true;
}

namespace io_detail {

inline bool parse_number(const std::string& tok, double& out) {
  const char* b = tok.data();
  const char* e = b + tok.size();
  auto [p, ec] = std::from_chars(b, e, out);
  return ec == std::errc() && p == e;
}

inline bool parse_int(const std::string& tok, int& out) {
  const char* b = tok.data();
  const char* e = b + tok.size();
  auto [p, ec] = std::from_chars(b, e, out);
  return ec == std::errc() && p == e;
}

[[noreturn]] inline void fail_line(int line, const std::string& what) {
  throw ModelError("line " + std::to_string(line) + ": " + what);
}

}  // namespace io_detail

/// Invariant checks over a parsed model, reported with field paths. Everything
/// the engine assumes is re-established here, so a hand-built ModelFile gets
/// the same scrutiny as a parsed one.
inline void validate_model(const ModelFile& mf) {
  if (mf.version != 1) throw ModelError("version: only format version 1 is supported");
  if (mf.alphabet.empty()) throw ModelError("alphabet: must list at least one symbol");
  for (std::size_t i = 0; i < mf.alphabet.size(); ++i) {
    if (mf.alphabet[i].empty())
      throw ModelError("alphabet[" + std::to_string(i) + "]: symbols must be non-empty");
    for (std::size_t j = 0; j < i; ++j)
      if (mf.alphabet[i] == mf.alphabet[j])
        throw ModelError("alphabet[" + std::to_string(i) + "]: duplicate symbol '" +
                         mf.alphabet[i] + "'");
  }
  if (mf.n < 1) throw ModelError("length: must be at least 1");
  if (mf.patterns.empty()) throw ModelError("patterns: at least one pattern is required");
  Word w;
  for (std::size_t i = 0; i < mf.patterns.size(); ++i) {
    const ModelPattern& p = mf.patterns[i];
    std::string path = "patterns[" + std::to_string(i) + "]";
    if (p.word.empty()) throw ModelError(path + ".word: must be non-empty");
    if (!segment_word(mf.alphabet, p.word, w))
      throw ModelError(path + ".word: '" + p.word + "' uses a symbol outside the alphabet");
    if (!std::isfinite(p.energy)) throw ModelError(path + ".energy: must be finite");
  }
  for (std::size_t i = 0; i < mf.overrides.size(); ++i) {
    const ModelOverride& o = mf.overrides[i];
    std::string path = "overrides[" + std::to_string(i) + "]";
    if (o.word.empty()) throw ModelError(path + ".word: must be non-empty");
    if (!segment_word(mf.alphabet, o.word, w))
      throw ModelError(path + ".word: '" + o.word + "' uses a symbol outside the alphabet");
    int hi = mf.n - static_cast<int>(w.size()) + 1;
    if (o.start < 1 || o.start > hi)
      throw ModelError(path + ".start: " + std::to_string(o.start) + " lies outside [1, " +
                       std::to_string(hi) + "]");
    if (!std::isfinite(o.energy)) throw ModelError(path + ".energy: must be finite");
  }
}

/// Reads the line-oriented model grammar. Syntax problems carry the 1-based
/// line number; the returned model has already passed validate_model.
inline ModelFile parse_model(std::istream& in) {
  using io_detail::fail_line;
  ModelFile mf;
  bool saw_version = false, saw_alphabet = false, saw_length = false, saw_semiring = false;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::istringstream ls(raw);
    std::string key;
    if (!(ls >> key)) continue;
    std::vector<std::string> args;
    for (std::string tok; ls >> tok;) args.push_back(tok);
    if (!saw_version) {
      if (key != "pcrf") fail_line(line, "expected the version line 'pcrf 1' first");
      if (args.size() != 1 || args[0] != "1")
        fail_line(line, "unsupported format version; expected 'pcrf 1'");
      saw_version = true;
      continue;
    }
    if (key == "pcrf") fail_line(line, "duplicate version line");
    if (key == "alphabet") {
      if (saw_alphabet) fail_line(line, "duplicate alphabet line");
      if (args.empty()) fail_line(line, "alphabet needs at least one symbol");
      mf.alphabet = args;
      saw_alphabet = true;
    } else if (key == "length") {
      if (saw_length) fail_line(line, "duplicate length line");
      if (args.size() != 1 || !io_detail::parse_int(args[0], mf.n))
        fail_line(line, "length takes one integer");
      saw_length = true;
    } else if (key == "semiring") {
      if (saw_semiring) fail_line(line, "duplicate semiring line");
      if (args.size() != 1 || !semiring_from_name(args[0], mf.semiring))
        fail_line(line, "semiring must be sum-product, min-plus, count, or bool");
      saw_semiring = true;
    } else if (key == "pattern" || key == "override") {
      if (!saw_alphabet || !saw_length)
        fail_line(line, "alphabet and length must come before any " + key + " line");
      if (key == "pattern") {
        double energy;
        if (args.size() != 2 || !io_detail::parse_number(args[1], energy))
          fail_line(line, "pattern takes a word and an energy");
        mf.patterns.push_back({args[0], energy});
      } else {
        int start;
        double energy;
        if (args.size() != 3 || !io_detail::parse_int(args[1], start) ||
            !io_detail::parse_number(args[2], energy))
          fail_line(line, "override takes a word, a start position, and an energy");
        mf.overrides.push_back({args[0], start, energy});
      }
    } else {
      fail_line(line, "unknown directive '" + key + "'");
    }
  }
  if (!saw_version) throw ModelError("line 1: expected the version line 'pcrf 1'");
  if (!saw_alphabet) throw ModelError("alphabet: missing");
  if (!saw_length) throw ModelError("length: missing");
  validate_model(mf);
  return mf;
}

inline ModelFile parse_model_text(const std::string& text) {
  std::istringstream in(text);
  return parse_model(in);
}

/// Writes the model back out in directive order. Parsing the result yields an
/// identical ModelFile; alphabet closure is a property of the built bank, not
/// of the file, so nothing closure-related appears here.
inline std::string serialize_model(const ModelFile& mf) {
  std::ostringstream out;
  out << "pcrf " << mf.version << "\n";
  out << "alphabet";
  for (const std::string& s : mf.alphabet) out << ' ' << s;
  out << "\n";
  out << "length " << mf.n << "\n";
  out << "semiring " << semiring_name(mf.semiring) << "\n";
  for (const ModelPattern& p : mf.patterns)
    out << "pattern " << p.word << ' ' << format_double(p.energy) << "\n";
  for (const ModelOverride& o : mf.overrides)
    out << "override " << o.word << ' ' << o.start << ' ' << format_double(o.energy) << "\n";
  return out.str();
}

/// Builds the runnable bank: validates, interns patterns and overrides, and
/// closes the alphabet. The closure notice goes to `warn` (when given), never
/// into the serialized model.
inline PatternBank build_bank(const ModelFile& mf, std::ostream* warn = nullptr) {
  validate_model(mf);
  PatternBank bank = make_bank(mf.alphabet, mf.n);
  Word w;
  for (const ModelPattern& p : mf.patterns) {
    segment_word(mf.alphabet, p.word, w);
    bank.add_pattern(w, p.energy);
  }
  for (const ModelOverride& o : mf.overrides) {
    segment_word(mf.alphabet, o.word, w);
    bank.add_override(w, o.start, o.energy);
  }
  std::vector<int> added = bank.close_alphabet();
  if (!added.empty() && warn) {
    *warn << "note: alphabet closure added " << added.size() << " zero-energy pattern"
          << (added.size() == 1 ? "" : "s") << ":";
    for (int id : added) *warn << ' ' << bank.spell(bank.word(id));
    *warn << "\n";
  }
  return bank;
}

}  // namespace pcrf
