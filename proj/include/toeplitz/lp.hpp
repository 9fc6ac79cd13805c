#pragma once

#include <optional>
#include <vector>

#include "rational.hpp"

namespace toeplitz {

struct LpSolution {
  Rational objective;
  std::vector<Rational> x;
};

namespace detail {

/// Dense two-phase simplex over exact rationals. Bland's rule, so it cannot
/// cycle. Problem sizes here are tiny (a handful of variables/constraints).
class Simplex {
 public:
  Simplex(std::vector<std::vector<Rational>> a, std::vector<Rational> b)
      : a_(std::move(a)), b_(std::move(b)), m_(a_.size()), n_(m_ ? a_[0].size() : 0) {
    for (size_t i = 0; i < m_; ++i)
      if (b_[i] < 0) {
        for (auto& v : a_[i]) v = -v;
        b_[i] = -b_[i];
      }
  }

  /// Returns a basic feasible optimum of min c.x s.t. Ax = b, x >= 0,
  /// nullopt when infeasible. Throws on an unbounded program (callers here
  /// only pose bounded ones).
  std::optional<LpSolution> solve(const std::vector<Rational>& c) {
    // Phase 1: artificial basis.
    tab_.assign(m_, std::vector<Rational>(n_ + m_ + 1));
    basis_.resize(m_);
    for (size_t i = 0; i < m_; ++i) {
      for (size_t j = 0; j < n_; ++j) tab_[i][j] = a_[i][j];
      tab_[i][n_ + i] = 1;
      tab_[i].back() = b_[i];
      basis_[i] = n_ + i;
    }
    cost_.assign(n_ + m_ + 1, Rational(0));
    for (size_t i = 0; i < m_; ++i)
      for (size_t j = 0; j <= n_ + m_; ++j) cost_[j] -= tab_[i][j];
    for (size_t j = n_; j < n_ + m_; ++j) cost_[j] += 1;
    pivot_until_optimal(n_ + m_);
    if (-cost_.back() != 0) return std::nullopt;  // artificials cannot reach zero
    purge_artificials();

    // Phase 2: original objective on the reduced tableau.
    cost_.assign(n_ + 1, Rational(0));
    for (size_t j = 0; j < n_; ++j) cost_[j] = c[j];
    for (size_t i = 0; i < m_; ++i) {
      if (c[basis_[i]] == 0) continue;
      const Rational f = c[basis_[i]];
      for (size_t j = 0; j <= n_; ++j) cost_[j] -= f * tab_[i][j];
    }
    pivot_until_optimal(n_);

    LpSolution out;
    out.x.assign(n_, Rational(0));
    for (size_t i = 0; i < m_; ++i) out.x[basis_[i]] = tab_[i].back();
    out.objective = -cost_.back();
    return out;
  }

 private:
  void pivot_until_optimal(size_t ncols) {
    for (;;) {
      size_t enter = ncols;
      for (size_t j = 0; j < ncols; ++j)
        if (cost_[j] < 0) {
          enter = j;
          break;
        }
      if (enter == ncols) return;
      size_t leave = m_;
      Rational best;
      for (size_t i = 0; i < m_; ++i) {
        if (tab_[i][enter] <= 0) continue;
        Rational ratio = tab_[i].back() / tab_[i][enter];
        if (leave == m_ || ratio < best || (ratio == best && basis_[i] < basis_[leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave == m_) throw Error(Errc::infeasible, "unbounded linear program");
      pivot(leave, enter);
    }
  }

  void pivot(size_t row, size_t col) {
    const Rational p = tab_[row][col];
    for (auto& v : tab_[row]) v /= p;
    for (size_t i = 0; i < m_; ++i) {
      if (i == row || tab_[i][col] == 0) continue;
      const Rational f = tab_[i][col];
      for (size_t j = 0; j < tab_[i].size(); ++j) tab_[i][j] -= f * tab_[row][j];
    }
    if (cost_[col] != 0) {
      const Rational f = cost_[col];
      for (size_t j = 0; j < cost_.size(); ++j) cost_[j] -= f * tab_[row][j];
    }
    basis_[row] = col;
  }

  /// After phase 1, make the basis artificial-free: pivot artificials out on
  /// any original column, dropping rows that turn out redundant. Then shrink
  /// the tableau to the original columns.
  void purge_artificials() {
    for (size_t i = 0; i < m_;) {
      if (basis_[i] < n_) {
        ++i;
        continue;
      }
      size_t col = n_;
      for (size_t j = 0; j < n_; ++j)
        if (tab_[i][j] != 0) {
          col = j;
          break;
        }
      if (col == n_) {
        tab_.erase(tab_.begin() + i);
        basis_.erase(basis_.begin() + i);
        --m_;
      } else {
        pivot(i, col);
        ++i;
      }
    }
    for (auto& row : tab_) {
      row[n_] = row.back();
      row.resize(n_ + 1);
    }
  }

  std::vector<std::vector<Rational>> a_;
  std::vector<Rational> b_;
  size_t m_, n_;
  std::vector<std::vector<Rational>> tab_;
  std::vector<Rational> cost_;
  std::vector<size_t> basis_;
};

}  // namespace detail

/// min c.x subject to A x = b, x >= 0. Exact; nullopt when infeasible.
inline std::optional<LpSolution> lp_solve(const std::vector<std::vector<Rational>>& a,
                                          const std::vector<Rational>& b,
                                          const std::vector<Rational>& c) {
  detail::Simplex s(a, b);
  return s.solve(c);
}

}  // namespace toeplitz
