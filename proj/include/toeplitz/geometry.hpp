#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "lp.hpp"
#include "rational.hpp"

namespace toeplitz {

constexpr size_t kMaxHullDim = 4;

/// Exact rank of a rational matrix (Gaussian elimination).
inline size_t rational_rank(std::vector<RatVec> rows) {
  size_t rank = 0;
  if (rows.empty()) return 0;
  const size_t cols = rows[0].size();
  for (size_t col = 0; col < cols && rank < rows.size(); ++col) {
    size_t piv = rank;
    while (piv < rows.size() && rows[piv][col] == 0) ++piv;
    if (piv == rows.size()) continue;
    std::swap(rows[rank], rows[piv]);
    for (size_t i = rank + 1; i < rows.size(); ++i) {
      if (rows[i][col] == 0) continue;
      const Rational f = rows[i][col] / rows[rank][col];
      for (size_t j = col; j < cols; ++j) rows[i][j] -= f * rows[rank][j];
    }
    ++rank;
  }
  return rank;
}

/// Dimension of the affine hull of a nonempty point set (0 for one point).
inline size_t affine_dim(const std::vector<RatVec>& points) {
  require_same_dim(points);
  std::vector<RatVec> diffs;
  for (size_t i = 1; i < points.size(); ++i) {
    RatVec d(points[i].size());
    for (size_t c = 0; c < d.size(); ++c) d[c] = points[i][c] - points[0][c];
    diffs.push_back(std::move(d));
  }
  if (diffs.empty()) return 0;
  return rational_rank(std::move(diffs));
}

/// Barycentric weights expressing x as a convex combination of `points`,
/// or nullopt when x is outside their hull. Exact.
inline std::optional<std::vector<Rational>> convex_combination(const RatVec& x,
                                                               const std::vector<RatVec>& points) {
  if (points.empty()) return std::nullopt;
  const size_t dim = x.size();
  const size_t k = points.size();
  std::vector<std::vector<Rational>> a(dim + 1, std::vector<Rational>(k));
  std::vector<Rational> b(dim + 1);
  for (size_t c = 0; c < dim; ++c) {
    for (size_t j = 0; j < k; ++j) a[c][j] = points[j].at(c);
    b[c] = x[c];
  }
  for (size_t j = 0; j < k; ++j) a[dim][j] = 1;
  b[dim] = 1;
  auto sol = lp_solve(a, b, std::vector<Rational>(k, Rational(0)));
  if (!sol) return std::nullopt;
  return sol->x;
}

inline bool in_hull(const RatVec& x, const std::vector<RatVec>& points) {
  return convex_combination(x, points).has_value();
}

/// The points of the input that are vertices of its convex hull: exactly
/// those that are not convex combinations of the others. Deduplicated,
/// lexicographic order. Supports dim <= 4.
inline std::vector<RatVec> hull_vertices(const std::vector<RatVec>& points) {
  require_same_dim(points);
  if (points[0].size() > kMaxHullDim)
    throw Error(Errc::unsupported_dimension,
                "hull_vertices supports dimension <= 4, got " + std::to_string(points[0].size()));
  std::vector<RatVec> uniq = points;
  std::sort(uniq.begin(), uniq.end());
  uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
  if (uniq.size() == 1) return uniq;
  std::vector<RatVec> out;
  for (size_t i = 0; i < uniq.size(); ++i) {
    std::vector<RatVec> others;
    for (size_t j = 0; j < uniq.size(); ++j)
      if (j != i) others.push_back(uniq[j]);
    if (!in_hull(uniq[i], others)) out.push_back(uniq[i]);
  }
  return out;  // already lexicographically sorted
}

/// Exact max-norm distance from x to conv(points): 0 iff x is in the hull.
inline Rational maxnorm_distance_to_hull(const RatVec& x, const std::vector<RatVec>& points) {
  if (points.empty()) throw Error(Errc::dimension_mismatch, "empty hull");
  const size_t dim = x.size();
  const size_t k = points.size();
  // Variables: lambda_1..k, t, then one slack per inequality.
  // For each coordinate c:  sum_j lambda_j v_jc + t - s1_c = x_c
  //                         sum_j lambda_j v_jc - t + s2_c = x_c
  // plus sum lambda = 1; minimize t.
  const size_t nvars = k + 1 + 2 * dim;
  std::vector<std::vector<Rational>> a(2 * dim + 1, std::vector<Rational>(nvars, Rational(0)));
  std::vector<Rational> b(2 * dim + 1);
  for (size_t c = 0; c < dim; ++c) {
    for (size_t j = 0; j < k; ++j) {
      a[2 * c][j] = points[j].at(c);
      a[2 * c + 1][j] = points[j].at(c);
    }
    a[2 * c][k] = 1;
    a[2 * c][k + 1 + 2 * c] = -1;
    a[2 * c + 1][k] = -1;
    a[2 * c + 1][k + 1 + 2 * c + 1] = 1;
    b[2 * c] = x[c];
    b[2 * c + 1] = x[c];
  }
  for (size_t j = 0; j < k; ++j) a[2 * dim][j] = 1;
  b[2 * dim] = 1;
  std::vector<Rational> cost(nvars, Rational(0));
  cost[k] = 1;
  auto sol = lp_solve(a, b, cost);
  if (!sol) throw Error(Errc::infeasible, "distance program infeasible");
  return sol->objective;
}

}  // namespace toeplitz
