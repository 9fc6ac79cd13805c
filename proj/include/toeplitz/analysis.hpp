#pragma once

#include <algorithm>
#include <utility>
#include <vector>

#include "builder.hpp"
#include "diagram.hpp"
#include "geometry.hpp"
#include "rational.hpp"

namespace toeplitz {

/// Per-column anchor signatures of a level with their hull vertices: the
/// exact set of anchor-cell measure values compatible with the level. When
/// the anchor dimension exceeds the hull cap, points are projected onto the
/// first kMaxHullDim coordinates (recorded in projected_dim; signatures sum
/// to 1, so one dropped coordinate is implied).
struct SignatureHull {
  int level = 0;
  int anchor_level = 0;
  size_t full_dim = 0;
  size_t projected_dim = 0;
  std::vector<RatVec> points;  // projected when projected_dim < full_dim
  std::vector<RatVec> vertices;
};

namespace detail {
inline RatVec project(const RatVec& v, size_t dim) {
  return RatVec(v.begin(), v.begin() + static_cast<long>(std::min(dim, v.size())));
}
}  // namespace detail

inline SignatureHull signature_points(const Diagram& d, int n, int anchor) {
  const auto sigs = d.anchor_signatures(n, anchor);
  SignatureHull h;
  h.level = n;
  h.anchor_level = anchor;
  h.full_dim = sigs.empty() ? 0 : sigs[0].size();
  h.projected_dim = std::min(h.full_dim, kMaxHullDim);
  for (const auto& s : sigs) h.points.push_back(detail::project(s, h.projected_dim));
  h.vertices = hull_vertices(h.points);
  return h;
}

/// The exact range of mu(A) over measures compatible with the first n
/// levels: (min, max) of the column letter frequencies. Nested decreasing
/// in n; (0, 1) at the root.
inline std::pair<Rational, Rational> interval_A(const Diagram& d, int n) {
  const auto f = d.letter_frequencies(n);
  return {*std::min_element(f.begin(), f.end()), *std::max_element(f.begin(), f.end())};
}

/// Finite-level certificate that the construction realizes the prescribed
/// simplex: the tracking signatures must be (and stay) the candidate extreme
/// points, with everything else collapsing onto their hull.
///   vertex_count     vertices of the hull of the tracking signatures
///   tracking_errors  |f_n(track_j) - p_j|, exact
///   hull_slack       max-norm distance of each non-tracking signature from
///                    the tracking hull (exact LP, full signature dimension)
///   affine_ok        tracking signatures affinely independent (dim m-1)
struct CertReport {
  int level = 0;
  int anchor_level = 0;
  size_t full_dim = 0;
  size_t projected_dim = 0;
  size_t vertex_count = 0;
  std::vector<Rational> tracking_errors;
  Rational hull_slack;
  bool affine_ok = false;
  std::vector<RatVec> vertices;  // projected tracking-hull vertices
};

inline CertReport certify_simplex(const Diagram& d, const TargetSpec& t, int n, int anchor) {
  t.validate();
  const Level& lvl = d.level(n);
  const size_t m = t.m();

  std::vector<int> tracking(m, 0);
  for (size_t i = 0; i < lvl.arity(); ++i) {
    const Column& c = lvl.columns[i];
    if (c.role == Role::tracking) {
      if (c.track < 1 || static_cast<size_t>(c.track) > m)
        throw Error(Errc::missing_roles, "tracking index " + std::to_string(c.track) +
                                             " does not match the target count");
      tracking[static_cast<size_t>(c.track) - 1] = static_cast<int>(i + 1);
    }
  }
  for (size_t j = 0; j < m; ++j)
    if (tracking[j] == 0)
      throw Error(Errc::missing_roles,
                  "level " + std::to_string(n) + " has no tracking column for target " +
                      std::to_string(j + 1));

  // A level-`anchor` signature lives in a (k_anchor - 1)-simplex; that must
  // be able to carry m affinely independent points, else escalate.
  int a = anchor;
  while (a < n - 1 && d.level(a).arity() < m) ++a;
  if (a >= n) throw Error(Errc::out_of_range, "anchor level must be below the certified level");

  CertReport rep;
  rep.level = n;
  rep.anchor_level = a;
  const auto sigs = d.anchor_signatures(n, a);
  rep.full_dim = sigs[0].size();
  rep.projected_dim = std::min(rep.full_dim, kMaxHullDim);

  std::vector<RatVec> track_full, track_proj;
  for (size_t j = 0; j < m; ++j) {
    track_full.push_back(sigs[static_cast<size_t>(tracking[j] - 1)]);
    track_proj.push_back(detail::project(track_full.back(), rep.projected_dim));
  }
  rep.vertices = hull_vertices(track_proj);
  rep.vertex_count = rep.vertices.size();
  rep.affine_ok = (affine_dim(track_full) + 1 == m);

  const auto f = d.letter_frequencies(n);
  for (size_t j = 0; j < m; ++j)
    rep.tracking_errors.push_back(rat_abs(f[static_cast<size_t>(tracking[j] - 1)] - t.p[j]));

  rep.hull_slack = 0;
  for (size_t i = 0; i < lvl.arity(); ++i) {
    if (lvl.columns[i].role == Role::tracking) continue;
    const Rational dist = maxnorm_distance_to_hull(sigs[i], track_full);
    rep.hull_slack = std::max(rep.hull_slack, dist);
  }
  return rep;
}

}  // namespace toeplitz
