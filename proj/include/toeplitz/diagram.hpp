#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "rational.hpp"

namespace toeplitz {

enum class Role { root_a, root_b, tracking, sentinel_low, sentinel_high, filler };

inline std::string role_to_string(Role r, int track = 0) {
  switch (r) {
    case Role::root_a: return "root_A";
    case Role::root_b: return "root_B";
    case Role::tracking: return "tracking:" + std::to_string(track);
    case Role::sentinel_low: return "sentinel_low";
    case Role::sentinel_high: return "sentinel_high";
    case Role::filler: return "filler";
  }
  return "filler";
}

/// One tower of a level: the ordered list of parent-column indices its
/// height-h_{n-1} constituents run through, bottom to top. 1-based parent
/// indices; sorted ascending on every finalized level, so the first
/// constituent is always a copy of parent 1 and the last a copy of the last
/// parent.
struct Column {
  std::vector<int> comp;
  Role role = Role::filler;
  int track = 0;  // 1-based target index when role == tracking
};

struct Level {
  std::vector<Column> columns;
  Int height;
  int index = 0;

  size_t arity() const { return columns.size(); }
  size_t comp_length() const { return columns.empty() ? 0 : columns[0].comp.size(); }
};

/// Cell (atom) address: row `row` of column `column` at level `level`.
struct CellRef {
  int level = 0;
  int column = 1;  // 1-based
  Int row;
};

/// A clopen set at a level: per-column row selections. Per-column counts are
/// its measure signature (two cell sets with equal counts have equal measure
/// under every measure compatible with the level).
struct CellSet {
  int level = 0;
  std::vector<std::set<Int>> rows;  // rows[i] for column i+1

  std::vector<Int> counts() const {
    std::vector<Int> c;
    c.reserve(rows.size());
    for (const auto& r : rows) c.push_back(Int(r.size()));
    return c;
  }
  Int total() const {
    Int t = 0;
    for (const auto& r : rows) t += Int(r.size());
    return t;
  }
};

namespace detail {
inline std::vector<Int> comp_counts(const std::vector<int>& comp, size_t parents) {
  std::vector<Int> counts(parents, Int(0));
  for (int p : comp) ++counts[static_cast<size_t>(p) - 1];
  return counts;
}
}  // namespace detail

/// The finalized refining sequence of partitions, stored one level per
/// partition. Append-only; a Diagram in memory is always fully valid
/// (all invariants are enforced at append time).
class Diagram {
 public:
  /// Level 0: two atoms A, B of height 1.
  static Diagram new_root() {
    Diagram d;
    Level root;
    root.index = 0;
    root.height = 1;
    root.columns.push_back({{}, Role::root_a, 0});
    root.columns.push_back({{}, Role::root_b, 0});
    d.levels_.push_back(std::move(root));
    return d;
  }

  int top_index() const { return static_cast<int>(levels_.size()) - 1; }
  size_t level_count() const { return levels_.size(); }

  const Level& level(int n) const {
    if (n < 0 || n >= static_cast<int>(levels_.size()))
      throw Error(Errc::out_of_range, "no level " + std::to_string(n));
    return levels_[static_cast<size_t>(n)];
  }

  /// Append a level of columns given as compositions (with optional roles).
  /// Rejects any violation of the level invariants, naming the offending
  /// columns: unsorted or empty compositions, unequal lengths, a column
  /// missing some parent, fewer than 3 columns, or two columns with equal
  /// repartition (twins).
  void append_level(std::vector<std::vector<int>> comps,
                    const std::vector<std::pair<Role, int>>& roles = {}) {
    const Level& prev = levels_.back();
    const size_t parents = prev.arity();
    const int n = top_index() + 1;
    if (comps.size() < 3)
      throw Error(Errc::column_count, "level " + std::to_string(n) + " has " +
                                          std::to_string(comps.size()) + " columns, need >= 3");
    if (!roles.empty() && roles.size() != comps.size())
      throw Error(Errc::config, "role list does not match column count");

    const size_t len = comps[0].size();
    std::vector<std::vector<Int>> counts;
    counts.reserve(comps.size());
    for (size_t i = 0; i < comps.size(); ++i) {
      const auto& comp = comps[i];
      if (comp.empty())
        throw Error(Errc::order_violation, "column " + std::to_string(i + 1) + " is empty");
      if (comp.size() != len)
        throw Error(Errc::height_violation,
                    "column " + std::to_string(i + 1) + " has length " +
                        std::to_string(comp.size()) + ", column 1 has " + std::to_string(len));
      for (size_t t = 0; t < comp.size(); ++t) {
        if (comp[t] < 1 || comp[t] > static_cast<int>(parents))
          throw Error(Errc::out_of_range, "column " + std::to_string(i + 1) +
                                              " references parent " + std::to_string(comp[t]));
        if (t > 0 && comp[t] < comp[t - 1])
          throw Error(Errc::order_violation,
                      "column " + std::to_string(i + 1) + " is not sorted ascending");
      }
      counts.push_back(detail::comp_counts(comp, parents));
    }
    for (size_t i = 0; i < comps.size(); ++i)
      for (size_t j = i + 1; j < comps.size(); ++j)
        if (counts[i] == counts[j])
          throw Error(Errc::twin_violation, "columns " + std::to_string(i + 1) + "," +
                                                std::to_string(j + 1) +
                                                " have equal repartition (twins)");
    for (size_t i = 0; i < comps.size(); ++i)
      for (size_t p = 0; p < parents; ++p)
        if (counts[i][p] == 0)
          throw Error(Errc::simplicity_violation, "column " + std::to_string(i + 1) +
                                                      " misses parent " + std::to_string(p + 1));

    Level lvl;
    lvl.index = n;
    lvl.height = prev.height * Int(len);
    for (size_t i = 0; i < comps.size(); ++i) {
      Column col;
      col.comp = std::move(comps[i]);
      if (!roles.empty()) {
        col.role = roles[i].first;
        col.track = roles[i].second;
      }
      lvl.columns.push_back(std::move(col));
    }
    levels_.push_back(std::move(lvl));
  }

  /// Repartition of column i (1-based) at level n >= 1: per-parent copy
  /// frequencies; entries sum to 1.
  RatVec repartition(int n, int i) const {
    if (n == 0) throw Error(Errc::undefined_at_root, "repartition is undefined at the root level");
    const Level& lvl = level(n);
    check_column(lvl, i);
    const auto counts =
        detail::comp_counts(lvl.columns[static_cast<size_t>(i - 1)].comp, level(n - 1).arity());
    RatVec out;
    out.reserve(counts.size());
    const Int len(lvl.comp_length());
    for (const Int& c : counts) out.emplace_back(c, len);
    return out;
  }

  /// M[i][p] = multiplicity of parent p in column i at level n >= 1.
  /// Every entry >= 1; all row sums equal the composition length.
  std::vector<std::vector<Int>> incidence_matrix(int n) const {
    if (n == 0) throw Error(Errc::undefined_at_root, "incidence is undefined at the root level");
    const Level& lvl = level(n);
    std::vector<std::vector<Int>> m;
    m.reserve(lvl.arity());
    for (const auto& col : lvl.columns)
      m.push_back(detail::comp_counts(col.comp, level(n - 1).arity()));
    return m;
  }

  /// Which root atom (A or B) the cell is a copy of. Row t of a level-n
  /// column lies in constituent t div h_{n-1} at offset t mod h_{n-1}.
  Role cell_trace(const CellRef& c) const {
    const Level& lvl = level(c.level);
    check_column(lvl, c.column);
    if (c.row < 0 || c.row >= lvl.height)
      throw Error(Errc::out_of_range, "row out of range at level " + std::to_string(c.level));
    int n = c.level;
    int col = c.column;
    Int row = c.row;
    while (n > 0) {
      const Int h_prev = level(n - 1).height;
      const Int q = row / h_prev;
      row -= q * h_prev;
      col = level(n).columns[static_cast<size_t>(col - 1)].comp[static_cast<size_t>(q)];
      --n;
    }
    return levels_[0].columns[static_cast<size_t>(col - 1)].role;
  }

  /// Counts of rows of each level-n column tracing into each level-a column:
  /// the product of the incidence matrices strictly between the two levels.
  /// Scaled by h_a these are row counts; divided by the length product they
  /// are the anchor signatures.
  std::vector<std::vector<Int>> anchor_counts(int n, int anchor) const {
    if (anchor < 0 || anchor >= n)
      throw Error(Errc::out_of_range, "anchor level must satisfy 0 <= anchor < level");
    std::vector<std::vector<Int>> prod = incidence_matrix(n);
    for (int m = n - 1; m > anchor; --m) {
      const auto inc = incidence_matrix(m);
      std::vector<std::vector<Int>> next(prod.size(), std::vector<Int>(inc[0].size(), Int(0)));
      for (size_t i = 0; i < prod.size(); ++i)
        for (size_t j = 0; j < inc.size(); ++j) {
          if (prod[i][j] == 0) continue;
          for (size_t p = 0; p < inc[j].size(); ++p) next[i][p] += prod[i][j] * inc[j][p];
        }
      prod = std::move(next);
    }
    return prod;
  }

  /// Anchor signature of column i at level n over the level-`anchor` columns:
  /// the fraction of rows tracing into each anchor column. Entries sum to 1.
  RatVec anchor_signature(int n, int i, int anchor) const {
    const auto counts = anchor_counts(n, anchor);
    check_column(level(n), i);
    Int denom = 1;
    for (int m = anchor + 1; m <= n; ++m) denom *= Int(level(m).comp_length());
    RatVec out;
    out.reserve(counts[0].size());
    for (const Int& c : counts[static_cast<size_t>(i - 1)]) out.emplace_back(c, denom);
    return out;
  }

  std::vector<RatVec> anchor_signatures(int n, int anchor) const {
    const auto counts = anchor_counts(n, anchor);
    Int denom = 1;
    for (int m = anchor + 1; m <= n; ++m) denom *= Int(level(m).comp_length());
    std::vector<RatVec> out;
    out.reserve(counts.size());
    for (const auto& row : counts) {
      RatVec v;
      v.reserve(row.size());
      for (const Int& c : row) v.emplace_back(c, denom);
      out.push_back(std::move(v));
    }
    return out;
  }

  /// Number of rows of each level-n column that are copies of the root atom A.
  std::vector<Int> letter_counts(int n) const {
    std::vector<Int> c{Int(1), Int(0)};  // root: A, B
    for (int m = 1; m <= n; ++m) {
      const auto inc = incidence_matrix(m);
      std::vector<Int> next(inc.size(), Int(0));
      for (size_t i = 0; i < inc.size(); ++i)
        for (size_t p = 0; p < c.size(); ++p) next[i] += inc[i][p] * c[p];
      c = std::move(next);
    }
    return c;
  }

  /// Frequency of the letter '0' (copies of A) in column i at level n.
  Rational letter_frequency(int n, int i) const {
    const Level& lvl = level(n);
    check_column(lvl, i);
    return Rational(letter_counts(n)[static_cast<size_t>(i - 1)], lvl.height);
  }

  std::vector<Rational> letter_frequencies(int n) const {
    const Level& lvl = level(n);
    const auto counts = letter_counts(n);
    std::vector<Rational> out;
    out.reserve(counts.size());
    for (const Int& c : counts) out.emplace_back(c, lvl.height);
    return out;
  }

  /// Random access to the coding: letter of row `row` of column i at level n.
  char letter_at(int n, int i, const Int& row) const {
    return cell_trace({n, i, row}) == Role::root_a ? '0' : '1';
  }

 private:
  static void check_column(const Level& lvl, int i) {
    if (i < 1 || i > static_cast<int>(lvl.arity()))
      throw Error(Errc::out_of_range,
                  "column " + std::to_string(i) + " out of range at level " +
                      std::to_string(lvl.index));
  }

  std::vector<Level> levels_;
};

/// row + 1 within the column, or nothing when the cell is the top cell
/// (resolving top -> base needs the containing column one level up, where it
/// is again row arithmetic).
inline std::optional<CellRef> vershik_successor(const Diagram& d, const CellRef& c) {
  const Level& lvl = d.level(c.level);
  if (c.row < 0 || c.row >= lvl.height) throw Error(Errc::out_of_range, "row out of range");
  if (c.row + 1 == lvl.height) return std::nullopt;
  return CellRef{c.level, c.column, c.row + 1};
}

}  // namespace toeplitz
