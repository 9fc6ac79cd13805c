#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "diagram.hpp"
#include "rational.hpp"

namespace toeplitz {

/// Largest window/word this module will materialize as a string. Deeper
/// levels stay accessible through Diagram::letter_at (exact random access);
/// heights grow multiplicatively, so full enumeration stops being physical
/// after a few levels.
constexpr size_t kWordCap = size_t(1) << 22;

namespace detail {

inline size_t checked_len(const Int& h, size_t cap, const char* what) {
  if (h > Int(cap))
    throw Error(Errc::too_large, std::string(what) + " of length " + h.str() +
                                     " exceeds the materialization cap " + std::to_string(cap));
  return static_cast<size_t>(h);
}

/// Words of every column at levels 0..n, built by composition.
inline std::vector<std::vector<std::string>> words_up_to(const Diagram& d, int n, size_t cap) {
  checked_len(d.level(n).height, cap, "word");
  std::vector<std::vector<std::string>> words(static_cast<size_t>(n) + 1);
  words[0] = {"0", "1"};
  for (int m = 1; m <= n; ++m) {
    const Level& lvl = d.level(m);
    auto& out = words[static_cast<size_t>(m)];
    out.reserve(lvl.arity());
    for (const auto& col : lvl.columns) {
      std::string w;
      w.reserve(static_cast<size_t>(lvl.height));
      for (int p : col.comp) w += words[static_cast<size_t>(m - 1)][static_cast<size_t>(p - 1)];
      out.push_back(std::move(w));
    }
  }
  return words;
}

}  // namespace detail

/// The {0,1} word read along column i at level n: '0' on copies of A, '1' on
/// copies of B, concatenated by composition. Length h_n.
inline std::string column_word(const Diagram& d, int n, int i, size_t cap = kWordCap) {
  const Level& lvl = d.level(n);
  if (i < 1 || i > static_cast<int>(lvl.arity()))
    throw Error(Errc::out_of_range, "column " + std::to_string(i) + " out of range");
  return detail::words_up_to(d, n, cap)[static_cast<size_t>(n)][static_cast<size_t>(i - 1)];
}

/// The central 2 h_n letters of the emitted bi-infinite sequence. The
/// distinguished point is the unique minimal path, which runs through the
/// first constituent of column 1 at every level (compositions are sorted, so
/// that constituent is a copy of parent 1); its backward orbit is the unique
/// maximal path through the last constituent of the last column. Hence
/// positions [0, h_n) read the word of column 1 and positions [-h_n, 0) read
/// the word of the last column.
struct Window {
  std::string letters;
  size_t origin = 0;  // index of position 0 within `letters`
};

inline Window window(const Diagram& d, int n, size_t cap = kWordCap) {
  if (n == 0)
    throw Error(Errc::undefined_at_root, "window is undefined at the root level");
  const Level& lvl = d.level(n);
  auto words = detail::words_up_to(d, n, cap);
  Window w;
  w.letters = words[static_cast<size_t>(n)][lvl.arity() - 1] + words[static_cast<size_t>(n)][0];
  w.origin = w.letters.size() / 2;
  return w;
}

/// Letter of the emitted sequence at position pos (any sign), read at level
/// n by residue. Exact for any level.
inline char sequence_letter(const Diagram& d, int n, const Int& pos) {
  const Level& lvl = d.level(n);
  if (pos >= 0) {
    if (pos >= lvl.height) throw Error(Errc::out_of_range, "position beyond the level window");
    return d.letter_at(n, 1, pos);
  }
  Int row = lvl.height + pos;
  if (row < 0) throw Error(Errc::out_of_range, "position beyond the level window");
  return d.letter_at(n, static_cast<int>(lvl.arity()), row);
}

/// Residues mod h_n where all column words agree, with the common letter.
/// These positions of the emitted sequence are h_n-periodic.
struct SkeletonReport {
  int level = 0;
  std::map<Int, char> filled;
  Rational density;
};

inline SkeletonReport skeleton(const Diagram& d, int n, size_t cap = kWordCap) {
  if (n == 0) throw Error(Errc::undefined_at_root, "skeleton is undefined at the root level");
  const Level& lvl = d.level(n);
  auto words = detail::words_up_to(d, n, cap);
  const auto& w = words[static_cast<size_t>(n)];
  SkeletonReport rep;
  rep.level = n;
  const size_t h = w[0].size();
  for (size_t r = 0; r < h; ++r) {
    const char c = w[0][r];
    bool same = true;
    for (size_t i = 1; i < w.size() && same; ++i) same = (w[i][r] == c);
    if (same) rep.filled.emplace(Int(r), c);
  }
  rep.density = Rational(Int(rep.filled.size()), lvl.height);
  return rep;
}

/// Exact skeleton cell count at any level, without materializing words.
/// Counts residues where a set of columns' words agree, by recursion on the
/// set of distinct columns met at each constituent (at most 2^k sets per
/// level, so this stays cheap at any height).
struct SkeletonCensus {
  Int filled;
  Rational density;
};

namespace detail {

inline Int agree_count(const Diagram& d, int m, std::vector<int> cols,
                       std::map<std::pair<int, std::vector<int>>, Int>& memo) {
  std::sort(cols.begin(), cols.end());
  cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
  if (cols.size() == 1) return d.level(m).height;
  if (m == 0) return 0;  // distinct root atoms never agree
  auto key = std::make_pair(m, cols);
  auto it = memo.find(key);
  if (it != memo.end()) return it->second;
  const Level& lvl = d.level(m);
  Int total = 0;
  std::vector<int> child;
  for (size_t c = 0; c < lvl.comp_length(); ++c) {
    child.clear();
    for (int i : cols) child.push_back(lvl.columns[static_cast<size_t>(i - 1)].comp[c]);
    total += agree_count(d, m - 1, child, memo);
  }
  memo.emplace(std::move(key), total);
  return total;
}

}  // namespace detail

inline SkeletonCensus skeleton_census(const Diagram& d, int n) {
  if (n == 0) throw Error(Errc::undefined_at_root, "skeleton is undefined at the root level");
  const Level& lvl = d.level(n);
  std::vector<int> all;
  for (size_t i = 1; i <= lvl.arity(); ++i) all.push_back(static_cast<int>(i));
  std::map<std::pair<int, std::vector<int>>, Int> memo;
  Int filled = 0;
  std::vector<int> tuple;
  for (size_t c = 0; c < lvl.comp_length(); ++c) {
    tuple.clear();
    for (int i : all) tuple.push_back(lvl.columns[static_cast<size_t>(i - 1)].comp[c]);
    filled += detail::agree_count(d, n - 1, tuple, memo);
  }
  return {filled, Rational(filled, lvl.height)};
}

/// Smallest period of a finite word: least p >= 1 with s[i] == s[i+p]
/// wherever both sides exist. Equals the length when the word has no proper
/// period. A finite window can only ever witness periodicity, never refute
/// it, so this is reported rather than asserted against.
inline size_t smallest_period(const std::string& s) {
  if (s.empty()) return 0;
  std::vector<size_t> fail(s.size(), 0);
  for (size_t i = 1; i < s.size(); ++i) {
    size_t j = fail[i - 1];
    while (j > 0 && s[i] != s[j]) j = fail[j - 1];
    if (s[i] == s[j]) ++j;
    fail[i] = j;
  }
  return s.size() - fail.back();
}

/// For each position p in [-h_N, h_N): the least level n <= N whose skeleton
/// contains p's residue, or 0 when unfilled up to N.
struct FillReport {
  int max_level = 0;
  size_t origin = 0;               // index of position 0
  std::vector<int> fill_level;     // indexed by origin + p
};

inline FillReport fill_report(const Diagram& d, int max_level, size_t cap = kWordCap) {
  if (max_level < 1) throw Error(Errc::out_of_range, "fill report needs a level >= 1");
  const size_t h = detail::checked_len(d.level(max_level).height, cap / 2, "window");
  FillReport rep;
  rep.max_level = max_level;
  rep.origin = h;
  rep.fill_level.assign(2 * h, 0);
  for (int n = 1; n <= max_level; ++n) {
    const auto skel = skeleton(d, n, cap);
    const size_t hn = static_cast<size_t>(d.level(n).height);
    for (size_t idx = 0; idx < 2 * h; ++idx) {
      if (rep.fill_level[idx] != 0) continue;
      // residue of position idx - h, nonnegative representative
      const size_t r = (idx >= h) ? (idx - h) % hn : (hn - 1) - ((h - 1 - idx) % hn);
      if (skel.filled.count(Int(r))) rep.fill_level[idx] = n;
    }
  }
  return rep;
}

}  // namespace toeplitz
