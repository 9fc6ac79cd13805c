#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "diagram.hpp"
#include "engine.hpp"
#include "geometry.hpp"
#include "rational.hpp"

namespace toeplitz {

/// Prescribed letter-'0' frequencies of the extreme measures to realize.
struct TargetSpec {
  std::vector<Rational> p;

  size_t m() const { return p.size(); }

  void validate() const {
    if (p.empty()) throw Error(Errc::config, "need at least one target");
    for (const auto& t : p)
      if (t <= 0 || t >= 1)
        throw Error(Errc::config, "target " + to_string(t) + " is not in the open interval (0,1)");
    for (size_t i = 0; i < p.size(); ++i)
      for (size_t j = i + 1; j < p.size(); ++j)
        if (p[i] == p[j]) throw Error(Errc::config, "duplicate target " + to_string(p[i]));
  }
  Rational min_target() const { return *std::min_element(p.begin(), p.end()); }
  Rational max_target() const { return *std::max_element(p.begin(), p.end()); }
  /// Distance from the target set to {0,1}.
  Rational margin() const {
    Rational lo = min_target();
    Rational hi = Rational(1) - max_target();
    return std::min(lo, hi);
  }
};

struct BuildParams {
  int depth = 1;
  long comp_length_floor = 2;
  int anchor_level = 1;

  void validate() const {
    if (depth < 0) throw Error(Errc::config, "depth must be >= 0");
    if (comp_length_floor < 2) throw Error(Errc::config, "comp length floor must be >= 2");
    if (anchor_level < 0) throw Error(Errc::config, "anchor level must be >= 0");
  }
};

/// Sentinel steering targets: strictly outside [min p, max p] at every
/// level, converging to the extreme targets geometrically. Keeping them
/// strictly outside preserves the apportion bracketing forever; letting them
/// converge pins the realized measure set to the prescribed one.
inline Rational sentinel_low_target(const TargetSpec& t, int level) {
  Rational gap = t.min_target();
  for (int i = 0; i < level; ++i) gap /= 2;
  return t.min_target() - gap;
}

inline Rational sentinel_high_target(const TargetSpec& t, int level) {
  Rational gap = Rational(1) - t.max_target();
  for (int i = 0; i < level; ++i) gap /= 2;
  return t.max_target() + gap;
}

namespace detail {

struct Split {
  size_t a = 0, b = 0;
  long xa = 0, xb = 0;
  Rational err;  // |achieved - L p| in frequency-sum units
};

/// Exact split of R extra copies over the pair (a, b): xa f_a + xb f_b =
/// target with xa + xb = R, if the solution is a nonneg integer pair.
inline std::optional<Split> exact_pair(const std::vector<Rational>& f, size_t a, size_t b, long r,
                                       const Rational& target) {
  if (f[a] == f[b]) {
    if (Rational(r) * f[a] != target) return std::nullopt;
    return Split{a, b, r, 0, Rational(0)};
  }
  const Rational x = (target - Rational(r) * f[b]) / (f[a] - f[b]);
  if (denominator(x) != 1 || x < 0 || x > r) return std::nullopt;
  const long xa = static_cast<long>(numerator(x));
  return Split{a, b, xa, r - xa, Rational(0)};
}

}  // namespace detail

/// Multiplicities m_i >= 1 with sum L whose frequency average hits p within
/// 1/(2L): baseline one copy of every column, then the leftover L-k copies
/// split over a column pair (the pair bracketing p first, then any pair,
/// then any triple), preferring exact integer splits; when no exact split
/// exists anywhere, the error-minimizing pair split is used.
inline std::vector<long> apportion(const std::vector<Rational>& f, const Rational& p, long L) {
  const size_t k = f.size();
  if (k == 0) throw Error(Errc::config, "no columns");
  if (L < static_cast<long>(k))
    throw Error(Errc::infeasible, "comp length " + std::to_string(L) + " below column count " +
                                      std::to_string(k));
  const Rational fmin = *std::min_element(f.begin(), f.end());
  const Rational fmax = *std::max_element(f.begin(), f.end());
  if (p < fmin || p > fmax)
    throw Error(Errc::bracketing, "target " + to_string(p) + " outside the frequency range [" +
                                      to_string(fmin) + ", " + to_string(fmax) + "]");

  Rational base = 0;
  for (const auto& v : f) base += v;
  const long r = L - static_cast<long>(k);
  const Rational target = Rational(L) * p - base;  // what the extras must sum to

  std::vector<long> mult(k, 1);
  auto apply = [&](const detail::Split& s) {
    mult[s.a] += s.xa;
    mult[s.b] += s.xb;
    return mult;
  };

  // Candidate pairs: the bracketing pair first, then all pairs in index order.
  std::vector<std::pair<size_t, size_t>> pairs;
  {
    size_t lo = k, hi = k;
    for (size_t i = 0; i < k; ++i) {
      if (f[i] <= p && (lo == k || f[i] > f[lo])) lo = i;
      if (f[i] >= p && (hi == k || f[i] < f[hi])) hi = i;
    }
    if (lo != k && hi != k && lo != hi) pairs.emplace_back(lo, hi);
    for (size_t a = 0; a < k; ++a)
      for (size_t b = a + 1; b < k; ++b)
        if (pairs.empty() || std::make_pair(a, b) != pairs.front()) pairs.emplace_back(a, b);
  }

  for (auto [a, b] : pairs)
    if (auto s = detail::exact_pair(f, a, b, r, target)) return apply(*s);

  // Exact triples: enumerate the first column's share, solve the rest.
  for (size_t a = 0; a < k; ++a)
    for (size_t b = a + 1; b < k; ++b)
      for (size_t c = b + 1; c < k; ++c)
        for (long xa = 1; xa <= r; ++xa) {
          auto s = detail::exact_pair(f, b, c, r - xa, target - Rational(xa) * f[a]);
          if (s && s->xa + s->xb == r - xa) {
            mult[a] += xa;
            return apply(*s);
          }
        }

  // Fallback: best pair split. The bracketing pair keeps the miss at most
  // (f_b - f_a)/2 <= 1/2, i.e. 1/(2L) in frequency.
  std::optional<detail::Split> best;
  for (auto [a, b] : pairs) {
    if (f[a] == f[b]) continue;
    const Rational xreal = (target - Rational(r) * f[b]) / (f[a] - f[b]);
    Int lo_i = numerator(xreal) / denominator(xreal);
    for (Int cand_i = lo_i; cand_i <= lo_i + 1; ++cand_i) {
      Int clamped = std::max(Int(0), std::min(Int(r), cand_i));
      const long xa = static_cast<long>(clamped);
      const Rational achieved = Rational(xa) * f[a] + Rational(r - xa) * f[b];
      detail::Split s{a, b, xa, r - xa, rat_abs(achieved - target)};
      if (!best || s.err < best->err) best = s;
    }
  }
  if (!best || best->err > Rational(1, 2))
    throw Error(Errc::infeasible,
                "no multiplicity split reaches " + to_string(p) + " within 1/(2L)");
  return apply(*best);
}

namespace detail {

/// Smallest composition length for the next level: at least the floor, at
/// least twice the current column count, and large enough that the sentinel
/// gap schedule stays strictly ahead of the apportion rounding error.
inline long next_comp_length(const Diagram& d, const TargetSpec& t, const BuildParams& params) {
  const int n = d.top_index();
  const Int k(d.level(n).arity());
  // ceil(k * 2^(n+2) / margin), exactly
  const Rational margin = t.margin();
  Int growth = ceil_div(k * (Int(1) << (n + 2)) * denominator(margin), numerator(margin));
  Int len = std::max(Int(params.comp_length_floor), std::max(Int(2) * k, growth));
  if (len > Int(1) << 26)
    throw Error(Errc::too_large, "composition length " + len.str() + " too large to materialize");
  return static_cast<long>(len);
}

inline std::vector<int> comp_from_multiplicities(const std::vector<long>& mult) {
  std::vector<int> comp;
  for (size_t i = 0; i < mult.size(); ++i)
    comp.insert(comp.end(), static_cast<size_t>(mult[i]), static_cast<int>(i + 1));
  return comp;
}

/// An integer direction z with sum 0 and zero frequency change, used to
/// separate tracking columns without disturbing their letter frequencies.
inline std::optional<std::vector<long>> frequency_kernel_direction(const std::vector<Rational>& f) {
  const size_t k = f.size();
  if (k < 3) return std::nullopt;
  // Find i<j<l with a rational combination z_i + z_j + z_l = 0,
  // z_i f_i + z_j f_j + z_l f_l = 0, z != 0; scale to integers.
  for (size_t i = 0; i < k; ++i)
    for (size_t j = i + 1; j < k; ++j)
      for (size_t l = j + 1; l < k; ++l) {
        // Solve with z_l = 1: z_i + z_j = -1, z_i f_i + z_j f_j = -f_l.
        if (f[i] == f[j]) continue;
        const Rational zi = (f[j] - f[l]) / (f[i] - f[j]);
        const Rational zj = Rational(-1) - zi;
        const Int den = boost::multiprecision::lcm(denominator(zi), denominator(zj));
        std::vector<long> z(k, 0);
        const Int a = numerator(zi) * (den / denominator(zi));
        const Int b = numerator(zj) * (den / denominator(zj));
        if (a == 0 || b == 0) continue;
        if (abs(a) > 1000 || abs(b) > 1000 || den > 1000) continue;
        z[i] = static_cast<long>(a);
        z[j] = static_cast<long>(b);
        z[l] = static_cast<long>(den);
        return z;
      }
  return std::nullopt;
}

}  // namespace detail

/// Plan the next level with a forced composition length: one tracking proto
/// per target, plus a low and a high sentinel proto steered just outside the
/// target range. All protos have full parent support; pairwise twins are
/// repaired; for the level-2 plan the tracking repartitions are additionally
/// made affinely independent (frequency-preserving swaps) so the tracked
/// measures separate as extreme points.
inline WorkingLevel plan_level_with_length(const Diagram& d, const TargetSpec& t, long length) {
  t.validate();
  const int n = d.top_index();
  const Level& top = d.level(n);
  const auto f = d.letter_frequencies(n);
  const size_t m = t.m();

  WorkingLevel w;
  w.parent_count = static_cast<int>(top.arity());
  w.parent_level = n;
  w.parent_height = top.height;

  std::vector<std::vector<long>> mults;
  for (size_t j = 0; j < m; ++j) mults.push_back(apportion(f, t.p[j], length));
  mults.push_back(apportion(f, sentinel_low_target(t, n + 1), length));
  mults.push_back(apportion(f, sentinel_high_target(t, n + 1), length));

  // Twin repair: distinct targets with exact splits cannot collide; if a
  // rounding fallback made two multiplicity vectors equal, nudge the later
  // one along a frequency-kernel direction, else along the closest pair.
  auto twins_at = [&]() -> std::optional<std::pair<size_t, size_t>> {
    for (size_t i = 0; i < mults.size(); ++i)
      for (size_t j = i + 1; j < mults.size(); ++j)
        if (mults[i] == mults[j]) return std::make_pair(i, j);
    return std::nullopt;
  };
  const auto kernel = detail::frequency_kernel_direction(f);
  bool swaps_exhausted = false;
  for (int guard = 0; twins_at() && !swaps_exhausted; ++guard) {
    if (guard >= 64) {
      swaps_exhausted = true;
      break;
    }
    auto [i, j] = *twins_at();
    bool moved = false;
    if (kernel) {
      auto trial = mults[j];
      bool ok = true;
      for (size_t c = 0; c < trial.size(); ++c) {
        trial[c] += (*kernel)[c];
        if (trial[c] < 1) ok = false;
      }
      if (ok) {
        mults[j] = trial;
        moved = true;
      }
    }
    if (!moved) {
      // unit swap between the two most frequent parents of proto j
      size_t hi = 0;
      for (size_t c = 1; c < mults[j].size(); ++c)
        if (mults[j][c] > mults[j][hi]) hi = c;
      size_t lo = (hi + 1) % mults[j].size();
      if (mults[j][hi] < 2) {
        swaps_exhausted = true;
        break;
      }
      mults[j][hi] -= 1;
      mults[j][lo] += 1;
    }
  }

  // Level-2 separation: tracking repartitions must be affinely independent
  // so the m tracked measures stay distinct extreme points.
  if (n == 1 && m >= 2 && kernel) {
    auto tracking_points = [&] {
      std::vector<RatVec> pts;
      for (size_t j = 0; j < m; ++j) {
        RatVec v;
        for (long x : mults[j]) v.emplace_back(x, length);
        pts.push_back(std::move(v));
      }
      return pts;
    };
    for (int guard = 0; affine_dim(tracking_points()) + 1 < m && guard < 64; ++guard) {
      const size_t j = 1 + static_cast<size_t>(guard) % (m - 1);
      auto trial = mults[j];
      bool ok = true;
      for (size_t c = 0; c < trial.size(); ++c) {
        trial[c] += (*kernel)[c];
        if (trial[c] < 1) ok = false;
      }
      if (!ok) break;
      mults[j] = trial;
      if (twins_at()) {  // keep distinctness
        mults[j] = apportion(f, t.p[j], length);
        break;
      }
    }
  }

  for (size_t j = 0; j < mults.size(); ++j) {
    ProtoColumn p;
    p.comp = detail::comp_from_multiplicities(mults[j]);
    if (j < m) {
      p.role = Role::tracking;
      p.track = static_cast<int>(j + 1);
    } else {
      p.role = (j == m) ? Role::sentinel_low : Role::sentinel_high;
    }
    w.protos.push_back(std::move(p));
  }
  if (swaps_exhausted && twins_at()) w = eliminate_twins(std::move(w));
  return w;
}

inline WorkingLevel plan_level(const Diagram& d, const TargetSpec& t, const BuildParams& params) {
  return plan_level_with_length(d, t, detail::next_comp_length(d, t, params));
}

/// Run the construction to the requested depth. Deterministic: identical
/// inputs give identical diagrams.
inline Diagram build(const TargetSpec& t, const BuildParams& params) {
  t.validate();
  params.validate();
  Diagram d = Diagram::new_root();
  for (int step = 0; step < params.depth; ++step) {
    WorkingLevel w = plan_level(d, t, params);
    w = equalize_heights(w);  // no-op unless twin repair changed heights
    finalize_level(d, w);

    // Bracketing must survive every level or the construction is stuck.
    const int n = d.top_index();
    const auto f = d.letter_frequencies(n);
    const Rational fmin = *std::min_element(f.begin(), f.end());
    const Rational fmax = *std::max_element(f.begin(), f.end());
    if (fmin >= t.min_target() || fmax <= t.max_target())
      throw Error(Errc::bracketing, "sentinel bracketing lost at level " + std::to_string(n));
  }
  return d;
}

}  // namespace toeplitz
