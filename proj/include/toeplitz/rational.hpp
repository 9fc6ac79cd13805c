#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <stdexcept>
#include <string>
#include <vector>

namespace toeplitz {

/// Arbitrary-precision integer. Level heights grow multiplicatively and
/// overflow any fixed width within a few levels.
using Int = boost::multiprecision::cpp_int;

/// Exact rational, always in lowest terms with positive denominator.
/// No floating point is used anywhere in the library core.
using Rational = boost::multiprecision::cpp_rational;

/// A point with exact rational coordinates.
using RatVec = std::vector<Rational>;

/// Error categories surfaced by the library. Messages name the offending
/// columns/operands; the category is stable for programmatic handling.
enum class Errc {
  parse,
  dimension_mismatch,
  unsupported_dimension,
  out_of_range,
  undefined_at_root,
  order_violation,
  height_violation,
  simplicity_violation,
  twin_violation,
  column_count,
  not_dominated,
  unbalanced_pair,
  needs_deeper_level,
  infeasible_surgery,
  bracketing,
  infeasible,
  missing_roles,
  too_large,
  config,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

inline std::string to_string(const Int& n) { return n.str(); }

/// "p/q", or just "p" when q = 1. This is the only rational syntax used in
/// JSON outputs and config files.
inline std::string to_string(const Rational& q) {
  if (denominator(q) == 1) return numerator(q).str();
  return numerator(q).str() + "/" + denominator(q).str();
}

inline bool is_integer_token(const std::string& s) {
  if (s.empty()) return false;
  size_t i = (s[0] == '-') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i)
    if (s[i] < '0' || s[i] > '9') return false;
  return true;
}

inline Int parse_int(const std::string& s) {
  if (!is_integer_token(s)) throw Error(Errc::parse, "not an integer: '" + s + "'");
  return Int(s);
}

inline Rational parse_rational(const std::string& s) {
  auto slash = s.find('/');
  if (slash == std::string::npos) return Rational(parse_int(s));
  Int num = parse_int(s.substr(0, slash));
  Int den = parse_int(s.substr(slash + 1));
  if (den <= 0) throw Error(Errc::parse, "denominator must be positive in '" + s + "'");
  return Rational(num, den);
}

inline Rational rat_abs(const Rational& q) { return q < 0 ? Rational(-q) : q; }

/// Ceiling of num/den for den > 0.
inline Int ceil_div(const Int& num, const Int& den) {
  Int q = num / den;
  if (q * den < num) ++q;
  return q;
}

inline void require_same_dim(const std::vector<RatVec>& points) {
  if (points.empty()) throw Error(Errc::dimension_mismatch, "empty point set");
  size_t dim = points.front().size();
  if (dim == 0) throw Error(Errc::dimension_mismatch, "zero-dimensional point");
  for (size_t i = 1; i < points.size(); ++i)
    if (points[i].size() != dim)
      throw Error(Errc::dimension_mismatch,
                  "mixed dimensions: point 0 has dim " + std::to_string(dim) + ", point " +
                      std::to_string(i) + " has dim " + std::to_string(points[i].size()));
}

}  // namespace toeplitz
