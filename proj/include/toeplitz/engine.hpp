#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "diagram.hpp"
#include "rational.hpp"

namespace toeplitz {

/// A scheduled-clopen membership mark carried through surgeries: `pos` is an
/// absolute cell offset within the proto (constituent index times the parent
/// height plus the row inside the constituent). Cutting records the copy
/// index on each duplicate.
struct Marker {
  std::string tag;
  Int pos;
  int copy = 0;
};

/// A pre-finalization column: parent indices in stacking order (not yet
/// sorted), plus carried marks.
struct ProtoColumn {
  std::vector<int> comp;
  Role role = Role::filler;
  int track = 0;
  std::vector<Marker> markers;

  std::vector<Int> counts(size_t parents) const { return detail::comp_counts(comp, parents); }
  RatVec repartition(size_t parents) const {
    RatVec r;
    const Int len(comp.size());
    for (const Int& c : counts(parents)) r.emplace_back(c, len);
    return r;
  }
  bool full_support(size_t parents) const {
    for (const Int& c : counts(parents))
      if (c == 0) return false;
    return true;
  }
};

/// A partition being reworked before finalization. Protos refine the columns
/// of the parent level; validity for finalization means the usual level
/// invariants (checked there, not here).
struct WorkingLevel {
  std::vector<ProtoColumn> protos;
  int parent_count = 0;
  int parent_level = 0;
  Int parent_height;

  /// Twins are protos with equal repartition vectors; heights may differ.
  bool twins(size_t i, size_t j) const {
    return protos[i].repartition(static_cast<size_t>(parent_count)) ==
           protos[j].repartition(static_cast<size_t>(parent_count));
  }
};

inline WorkingLevel working_from_level(const Diagram& d, int n) {
  const Level& lvl = d.level(n);
  WorkingLevel w;
  w.parent_count = static_cast<int>(lvl.arity());
  w.parent_level = n;
  w.parent_height = lvl.height;
  for (int i = 1; i <= w.parent_count; ++i) w.protos.push_back({{i}, Role::filler, 0, {}});
  return w;
}

namespace detail {
inline void check_proto_index(const WorkingLevel& w, size_t i) {
  if (i < 1 || i > w.protos.size())
    throw Error(Errc::out_of_range, "proto index " + std::to_string(i) + " out of range");
}
}  // namespace detail

/// Replace proto i (1-based) by q identical copies: equal-measure base
/// cutting. Marks are duplicated per copy with the copy index recorded.
inline WorkingLevel cut_column(WorkingLevel w, size_t i, int q) {
  detail::check_proto_index(w, i);
  if (q < 1) throw Error(Errc::out_of_range, "cut count must be >= 1");
  if (q == 1) return w;
  ProtoColumn orig = std::move(w.protos[i - 1]);
  std::vector<ProtoColumn> copies;
  copies.reserve(static_cast<size_t>(q));
  for (int c = 1; c <= q; ++c) {
    ProtoColumn p = orig;
    for (auto& m : p.markers) m.copy = c;
    copies.push_back(std::move(p));
  }
  w.protos.erase(w.protos.begin() + static_cast<long>(i - 1));
  w.protos.insert(w.protos.begin() + static_cast<long>(i - 1),
                  std::make_move_iterator(copies.begin()), std::make_move_iterator(copies.end()));
  return w;
}

/// Stack proto `upper` on top of proto `lower` (1-based): the merged proto
/// keeps lower's slot and role, upper's marks shift up by lower's height.
inline WorkingLevel stack(WorkingLevel w, size_t lower, size_t upper) {
  detail::check_proto_index(w, lower);
  detail::check_proto_index(w, upper);
  if (lower == upper) throw Error(Errc::out_of_range, "cannot stack a proto onto itself");
  ProtoColumn& lo = w.protos[lower - 1];
  ProtoColumn& up = w.protos[upper - 1];
  const Int offset = Int(lo.comp.size()) * w.parent_height;
  for (auto& m : up.markers) {
    m.pos += offset;
    lo.markers.push_back(std::move(m));
  }
  lo.comp.insert(lo.comp.end(), up.comp.begin(), up.comp.end());
  w.protos.erase(w.protos.begin() + static_cast<long>(upper - 1));
  return w;
}

namespace detail {

/// comp repeated n times, marks replicated per copy with offsets and copy
/// indices. Same result as cutting into n slices and restacking them, in
/// linear time.
inline ProtoColumn self_stack(const ProtoColumn& p, int n, const Int& parent_height) {
  ProtoColumn out;
  out.role = p.role;
  out.track = p.track;
  out.comp.reserve(p.comp.size() * static_cast<size_t>(n));
  const Int span = Int(p.comp.size()) * parent_height;
  for (int c = 0; c < n; ++c) {
    out.comp.insert(out.comp.end(), p.comp.begin(), p.comp.end());
    for (const auto& m : p.markers) out.markers.push_back({m.tag, m.pos + Int(c) * span, c + 1});
  }
  return out;
}

/// N-fold self-stack of proto i followed by stacking one half of a freshly
/// cut copy of proto `target` on top. Net effect: proto i becomes
/// N*comp_i ++ comp_target, proto `target` stays.
inline WorkingLevel absorb_copy(WorkingLevel w, size_t i, size_t target, int n_cut) {
  ProtoColumn merged = self_stack(w.protos[i - 1], n_cut, w.parent_height);
  ProtoColumn& keep = w.protos[target - 1];
  const Int offset = Int(merged.comp.size()) * w.parent_height;
  for (const auto& m : keep.markers) merged.markers.push_back({m.tag, m.pos + offset, 2});
  for (auto& m : keep.markers) m.copy = 1;  // the slice that stays behind
  merged.comp.insert(merged.comp.end(), keep.comp.begin(), keep.comp.end());
  w.protos[i - 1] = std::move(merged);
  return w;
}

inline bool has_nontwin_pair(const WorkingLevel& w) {
  for (size_t i = 0; i < w.protos.size(); ++i)
    for (size_t j = i + 1; j < w.protos.size(); ++j)
      if (!w.twins(i, j)) return true;
  return false;
}

constexpr int kMaxCutDoubling = 1 << 20;

}  // namespace detail

/// Give every proto full parent support by stacking a slice of a
/// full-support proto on top of each deficient one (cut into N >= 2 first,
/// with N the smallest power of two that leaves two protos with distinct
/// repartitions). When no full-support proto exists, protos are merged in
/// index order until one appears; the caller deals with the reduced column
/// count downstream.
inline WorkingLevel ensure_all_copies(WorkingLevel w) {
  const size_t parents = static_cast<size_t>(w.parent_count);
  auto all_full = [&] {
    for (const auto& p : w.protos)
      if (!p.full_support(parents)) return false;
    return true;
  };
  if (all_full()) return w;

  auto find_target = [&]() -> size_t {
    for (size_t t = 1; t <= w.protos.size(); ++t)
      if (w.protos[t - 1].full_support(parents)) return t;
    return 0;
  };
  if (find_target() == 0) {
    while (!w.protos[0].full_support(parents) && w.protos.size() > 1)
      w = stack(std::move(w), 1, 2);
    if (!w.protos[0].full_support(parents))
      throw Error(Errc::infeasible_surgery,
                  "no stacking target: some parent is absent from every proto");
    if (all_full()) return w;
  }

  for (size_t i = 1; i <= w.protos.size(); ++i) {
    if (w.protos[i - 1].full_support(parents)) continue;
    const size_t target = find_target();
    bool done = false;
    for (int n = 2; n <= detail::kMaxCutDoubling && !done; n *= 2) {
      WorkingLevel trial = detail::absorb_copy(w, i, target, n);
      if (detail::has_nontwin_pair(trial)) {
        w = std::move(trial);
        done = true;
      }
    }
    if (!done)
      throw Error(Errc::infeasible_surgery,
                  "could not restore a non-twin pair while filling proto " + std::to_string(i));
  }
  return w;
}

/// Make all repartitions pairwise distinct. A twin is cut into N slices,
/// restacked, and a slice of a non-twin is stacked on top; N is the smallest
/// power of two whose resulting repartition avoids every existing one
/// (checked exactly). Full parent support is preserved.
inline WorkingLevel eliminate_twins(WorkingLevel w) {
  const size_t parents = static_cast<size_t>(w.parent_count);
  if (!detail::has_nontwin_pair(w))
    throw Error(Errc::infeasible_surgery, "all protos are pairwise twins");
  for (;;) {
    size_t c = 0;
    for (size_t i = 1; i <= w.protos.size() && c == 0; ++i)
      for (size_t j = 1; j <= w.protos.size(); ++j)
        if (j != i && w.twins(i - 1, j - 1)) {
          c = i;
          break;
        }
    if (c == 0) return w;
    size_t dpick = 0;
    for (size_t j = 1; j <= w.protos.size(); ++j)
      if (!w.twins(c - 1, j - 1)) {
        dpick = j;
        break;
      }
    bool done = false;
    for (int n = 2; n <= detail::kMaxCutDoubling && !done; n *= 2) {
      // Repartition of N*comp_c ++ comp_d, must avoid every current one.
      const auto cc = w.protos[c - 1].counts(parents);
      const auto dc = w.protos[dpick - 1].counts(parents);
      const Int len = Int(n) * Int(w.protos[c - 1].comp.size()) + Int(w.protos[dpick - 1].comp.size());
      RatVec fresh;
      for (size_t p = 0; p < parents; ++p) fresh.emplace_back(Int(n) * cc[p] + dc[p], len);
      bool clash = false;
      for (size_t j = 0; j < w.protos.size() && !clash; ++j)
        clash = (w.protos[j].repartition(parents) == fresh);
      if (!clash) {
        w = detail::absorb_copy(std::move(w), c, dpick, n);
        done = true;
      }
    }
    if (!done)
      throw Error(Errc::infeasible_surgery, "twin repair exhausted cut doublings");
  }
}

/// Bring all protos to the common height lcm(h_i) by q/h_i-fold
/// self-stacking. Repartitions are unchanged.
inline WorkingLevel equalize_heights(WorkingLevel w) {
  Int q = 1;
  for (const auto& p : w.protos) q = boost::multiprecision::lcm(q, Int(p.comp.size()));
  if (q > Int(1) << 26)
    throw Error(Errc::too_large, "common height " + q.str() + " too large to materialize");
  for (auto& p : w.protos) {
    const int rep = static_cast<int>(q / Int(p.comp.size()));
    if (rep > 1) p = detail::self_stack(p, rep, w.parent_height);
  }
  return w;
}

/// Sort each proto's composition ascending (a row permutation, preserving
/// repartitions and all measures) and append the result as a new level.
/// Validation happens before the diagram is touched.
inline void finalize_level(Diagram& d, const WorkingLevel& w) {
  if (w.parent_level != d.top_index())
    throw Error(Errc::config, "working level does not refine the current top level");
  std::vector<std::vector<int>> comps;
  std::vector<std::pair<Role, int>> roles;
  for (const auto& p : w.protos) {
    // counting sort: entries are parent indices in 1..parent_count
    const auto counts = p.counts(static_cast<size_t>(w.parent_count));
    std::vector<int> comp;
    comp.reserve(p.comp.size());
    for (size_t parent = 0; parent < counts.size(); ++parent)
      comp.insert(comp.end(), static_cast<size_t>(counts[parent]), static_cast<int>(parent + 1));
    comps.push_back(std::move(comp));
    roles.emplace_back(p.role, p.track);
  }
  d.append_level(std::move(comps), roles);
}

/// The lowest-indexed rows of V in each column, as many as U has there:
/// a subset of V with the same measure signature as U.
inline CellSet find_equal_subset(const Level& lvl, const CellSet& u, const CellSet& v) {
  if (u.level != lvl.index || v.level != lvl.index)
    throw Error(Errc::config, "cell sets must live on the given level");
  CellSet w;
  w.level = lvl.index;
  w.rows.resize(lvl.arity());
  for (size_t i = 0; i < lvl.arity(); ++i) {
    const size_t need = u.rows[i].size();
    if (need > v.rows[i].size())
      throw Error(Errc::not_dominated,
                  "column " + std::to_string(i + 1) + " has " + std::to_string(u.rows[i].size()) +
                      " cells of U but only " + std::to_string(v.rows[i].size()) +
                      " of V; deepen the diagram first");
    auto it = v.rows[i].begin();
    for (size_t t = 0; t < need; ++t) w.rows[i].insert(*it++);
  }
  return w;
}

/// Cells addressed on the protos of a working refinement.
struct ProtoCells {
  std::vector<std::set<Int>> rows;

  std::vector<Int> counts() const {
    std::vector<Int> c;
    for (const auto& r : rows) c.push_back(Int(r.size()));
    return c;
  }
  Int total() const {
    Int t = 0;
    for (const auto& r : rows) t += Int(r.size());
    return t;
  }
};

struct SplitResult {
  WorkingLevel refinement;
  std::vector<ProtoCells> parts;
};

/// Split U into q parts of equal measure signature. If every per-column
/// count is divisible by q the split happens in place (lowest rows to part
/// 1); otherwise each column is refined into its q-fold self-stack and part
/// r takes the r-th copy of every U-cell. Always realizable: this is where
/// divisibility is built into the construction.
inline SplitResult split_clopen_equal(const Diagram& d, int n, const CellSet& u, int q) {
  if (q < 1) throw Error(Errc::out_of_range, "part count must be >= 1");
  const Level& lvl = d.level(n);
  if (u.level != n || u.rows.size() != lvl.arity())
    throw Error(Errc::config, "cell set does not match the level");
  SplitResult res;
  res.refinement = working_from_level(d, n);
  bool divisible = true;
  for (const auto& rows : u.rows)
    if (rows.size() % static_cast<size_t>(q) != 0) divisible = false;

  res.parts.assign(static_cast<size_t>(q), ProtoCells{});
  for (auto& part : res.parts) part.rows.resize(lvl.arity());

  if (divisible) {
    for (size_t i = 0; i < lvl.arity(); ++i) {
      const size_t chunk = u.rows[i].size() / static_cast<size_t>(q);
      size_t t = 0;
      for (const Int& row : u.rows[i]) {
        res.parts[t / std::max<size_t>(chunk, 1)].rows[i].insert(row);
        ++t;
      }
    }
    return res;
  }

  for (size_t i = 1; i <= lvl.arity(); ++i) {
    res.refinement = cut_column(std::move(res.refinement), i, q);
    for (int s = 1; s < q; ++s) res.refinement = stack(std::move(res.refinement), i, i + 1);
  }
  for (size_t i = 0; i < lvl.arity(); ++i)
    for (const Int& row : u.rows[i])
      for (int r = 0; r < q; ++r)
        res.parts[static_cast<size_t>(r)].rows[i].insert(Int(r) * lvl.height + row);
  return res;
}

/// Refine the level so that every proto carries equally many U-cells and
/// V-cells (marks tagged "U"/"V"). Within each column, cells of U and V pair
/// off; columns left with a one-sided residue are combined pairwise with the
/// first residue column of the other side, copies of the one stacked onto
/// copies of the other so the products match.
inline WorkingLevel balance_pair(const Level& lvl, const CellSet& u, const CellSet& v) {
  if (u.level != lvl.index || v.level != lvl.index)
    throw Error(Errc::config, "cell sets must live on the given level");
  if (u.total() != v.total())
    throw Error(Errc::unbalanced_pair, "total cell counts differ: " + u.total().str() + " vs " +
                                           v.total().str());
  const size_t k = lvl.arity();
  std::vector<size_t> ures(k), vres(k);
  std::vector<size_t> iu, jv;
  for (size_t i = 0; i < k; ++i) {
    const size_t ui = u.rows[i].size(), vi = v.rows[i].size();
    const size_t m = std::min(ui, vi);
    ures[i] = ui - m;
    vres[i] = vi - m;
    if (ures[i] > 0) iu.push_back(i);
    if (vres[i] > 0) jv.push_back(i);
  }
  if ((!iu.empty() || !jv.empty()) && k < 3)
    throw Error(Errc::needs_deeper_level,
                "level has fewer than 3 columns and an unresolved residue");

  WorkingLevel w;
  w.parent_count = static_cast<int>(k);
  w.parent_level = lvl.index;
  w.parent_height = lvl.height;

  auto add_proto = [&](std::vector<int> comp) {
    ProtoColumn p;
    p.comp = std::move(comp);
    for (size_t c = 0; c < p.comp.size(); ++c) {
      const size_t parent = static_cast<size_t>(p.comp[c] - 1);
      const Int base = Int(c) * lvl.height;
      for (const Int& row : u.rows[parent]) p.markers.push_back({"U", base + row, 0});
      for (const Int& row : v.rows[parent]) p.markers.push_back({"V", base + row, 0});
    }
    w.protos.push_back(std::move(p));
  };

  std::vector<bool> consumed(k, false);
  if (!iu.empty()) {
    const size_t i1 = iu.front(), j1 = jv.front();
    for (size_t i : iu) {
      std::vector<int> comp(ures[i], static_cast<int>(j1 + 1));
      comp.insert(comp.end(), vres[j1], static_cast<int>(i + 1));
      add_proto(std::move(comp));
      consumed[i] = true;
    }
    consumed[j1] = true;
    for (size_t j : jv) {
      if (j == j1) continue;
      std::vector<int> comp(ures[i1], static_cast<int>(j + 1));
      comp.insert(comp.end(), vres[j], static_cast<int>(i1 + 1));
      add_proto(std::move(comp));
      consumed[j] = true;
    }
  }
  for (size_t z = 0; z < k; ++z)
    if (!consumed[z]) add_proto({static_cast<int>(z + 1)});

  // Machine-check the postcondition by recounting marks.
  for (const auto& p : w.protos) {
    long diff = 0;
    for (const auto& m : p.markers) diff += (m.tag == "U") ? 1 : -1;
    if (diff != 0)
      throw Error(Errc::unbalanced_pair, "internal: balance postcondition failed");
  }
  return w;
}

/// A working refinement whose base cells all lie in the base of column 1 and
/// whose top cells all lie in the top of the last column: every proto is the
/// full parent list plus two extra copies, sorted, so the first constituent
/// is a copy of parent 1 and the last a copy of the last parent. Ready for
/// finalize_level; after finalization the unique minimal/maximal paths pass
/// through those designated columns.
inline WorkingLevel shrink_caps(const Diagram& d) {
  const int n = d.top_index();
  const Level& lvl = d.level(n);
  const int k = static_cast<int>(lvl.arity());
  if (k < 2) throw Error(Errc::infeasible_surgery, "cannot shrink caps of a single-column level");
  WorkingLevel w;
  w.parent_count = k;
  w.parent_level = n;
  w.parent_height = lvl.height;
  int emitted = 0;
  for (int a = 1; a <= k && emitted < 3; ++a)
    for (int b = a; b <= k && emitted < 3; ++b) {
      std::vector<int> comp;
      for (int p = 1; p <= k; ++p) comp.push_back(p);
      comp.push_back(a);
      comp.push_back(b);
      std::sort(comp.begin(), comp.end());
      w.protos.push_back({std::move(comp), Role::filler, 0, {}});
      ++emitted;
    }
  return w;
}

}  // namespace toeplitz
