#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <toeplitz/analysis.hpp>
#include <toeplitz/builder.hpp>
#include <toeplitz/coder.hpp>

#include <algorithm>

using namespace toeplitz;

namespace {

Diagram example_diagram() {
  Diagram d = Diagram::new_root();
  d.append_level({{1, 1, 1, 2}, {1, 2, 2, 2}, {1, 1, 2, 2}});
  return d;
}

TargetSpec targets(std::initializer_list<const char*> ps) {
  TargetSpec t;
  for (const char* s : ps) t.p.push_back(parse_rational(s));
  return t;
}

Diagram built(std::initializer_list<const char*> ps, int depth) {
  BuildParams params;
  params.depth = depth;
  params.comp_length_floor = 8;
  return build(targets(ps), params);
}

}  // namespace

TEST_CASE("signature points of the worked level") {
  Diagram d = example_diagram();
  const auto hull = signature_points(d, 1, 0);
  REQUIRE(hull.points.size() == 3);
  CHECK(hull.points[0] == RatVec{Rational(3, 4), Rational(1, 4)});
  CHECK(hull.points[1] == RatVec{Rational(1, 4), Rational(3, 4)});
  CHECK(hull.points[2] == RatVec{Rational(1, 2), Rational(1, 2)});
  // the middle column is a mix of the outer two: two vertices remain
  REQUIRE(hull.vertices.size() == 2);
  CHECK(hull.vertices[0] == RatVec{Rational(1, 4), Rational(3, 4)});
  CHECK(hull.vertices[1] == RatVec{Rational(3, 4), Rational(1, 4)});
}

TEST_CASE("a deeper signature lies inside the previous hull") {
  Diagram d = example_diagram();
  d.append_level({{1, 2, 3, 3}, {1, 1, 2, 3}, {1, 2, 2, 3}});
  const auto prev = signature_points(d, 1, 0);
  CHECK(d.anchor_signature(2, 1, 0) == RatVec{Rational(1, 2), Rational(1, 2)});
  for (int i = 1; i <= 3; ++i) CHECK(in_hull(d.anchor_signature(2, i, 0), prev.points));
}

TEST_CASE("interval_A") {
  Diagram d = example_diagram();
  CHECK(interval_A(d, 1) == std::make_pair(Rational(1, 4), Rational(3, 4)));
  CHECK(interval_A(d, 0) == std::make_pair(Rational(0), Rational(1)));
}

TEST_CASE("interval_A nests on built diagrams") {
  Diagram d = built({"1/4", "3/4"}, 4);
  for (int n = 1; n < 4; ++n) {
    const auto outer = interval_A(d, n);
    const auto inner = interval_A(d, n + 1);
    CHECK(outer.first <= inner.first);
    CHECK(inner.second <= outer.second);
  }
}

TEST_CASE("certification of a two-target build") {
  Diagram d = built({"1/4", "3/4"}, 3);
  const auto rep = certify_simplex(d, targets({"1/4", "3/4"}), 3, 1);
  CHECK(rep.vertex_count == 2);
  CHECK(rep.affine_ok);
  CHECK(rep.tracking_errors == std::vector<Rational>{Rational(0), Rational(0)});
  CHECK(rep.hull_slack > 0);
  CHECK(rep.anchor_level == 1);
  CHECK(rep.full_dim == 4);
  CHECK(rep.projected_dim == 4);
}

TEST_CASE("hull slack shrinks with depth") {
  Diagram d = built({"1/4", "3/4"}, 4);
  const auto t = targets({"1/4", "3/4"});
  Rational prev = certify_simplex(d, t, 2, 1).hull_slack;
  for (int n = 3; n <= 4; ++n) {
    const Rational cur = certify_simplex(d, t, n, 1).hull_slack;
    CHECK(cur <= prev);
    prev = cur;
  }
}

TEST_CASE("anchor level escalates when too coarse to separate the targets") {
  Diagram d = built({"1/8", "1/2", "7/8"}, 3);
  const auto rep = certify_simplex(d, targets({"1/8", "1/2", "7/8"}), 3, 0);
  CHECK(rep.anchor_level == 1);  // two root atoms cannot separate three measures
  CHECK(rep.affine_ok);
  CHECK(rep.full_dim == 5);
  CHECK(rep.projected_dim == 4);  // recorded projection
}

TEST_CASE("certification requires role metadata") {
  Diagram d = example_diagram();
  d.append_level({{1, 2, 3, 3}, {1, 1, 2, 3}, {1, 2, 2, 3}});
  CHECK_THROWS_AS(certify_simplex(d, targets({"1/2"}), 2, 0), Error);
  try {
    certify_simplex(d, targets({"1/2"}), 2, 0);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::missing_roles);
  }
}

TEST_CASE("single-target certification reports a lone vertex") {
  Diagram d = built({"1/2"}, 3);
  const auto rep = certify_simplex(d, targets({"1/2"}), 3, 1);
  CHECK(rep.vertex_count == 1);
  CHECK(rep.affine_ok);  // one point has affine dimension 0
  CHECK(rep.tracking_errors[0] == 0);
  // the interval still shrinks toward the single target
  const auto i2 = interval_A(d, 2);
  const auto i3 = interval_A(d, 3);
  CHECK(i3.second - i3.first < i2.second - i2.first);
}

namespace {

/// Test-only oracle: trace a row down to the anchor level by division,
/// independently of the incidence-product path.
int trace_to_level(const Diagram& d, int n, int col, Int row, int anchor) {
  while (n > anchor) {
    const Int h_prev = d.level(n - 1).height;
    const Int q = row / h_prev;
    row -= q * h_prev;
    col = d.level(n).columns[static_cast<size_t>(col - 1)].comp[static_cast<size_t>(q)];
    --n;
  }
  return col;
}

}  // namespace

TEST_CASE("word census oracle at small heights") {
  Diagram d = example_diagram();
  d.append_level({{1, 2, 3, 3}, {1, 1, 2, 3}, {1, 2, 2, 3}});  // h = 16
  d.append_level({{1, 2, 3, 3}, {1, 1, 2, 3}, {1, 2, 2, 3}});  // h = 64
  for (int n = 1; n <= 3; ++n) {
    const Level& lvl = d.level(n);
    for (int i = 1; i <= static_cast<int>(lvl.arity()); ++i) {
      const std::string w = column_word(d, n, i);
      const long zeros = std::count(w.begin(), w.end(), '0');
      CHECK(d.letter_frequency(n, i) == Rational(zeros, static_cast<long>(w.size())));
      for (int anchor = 0; anchor < n; ++anchor) {
        std::vector<Int> census(d.level(anchor).arity(), Int(0));
        for (Int row = 0; row < lvl.height; ++row)
          ++census[static_cast<size_t>(trace_to_level(d, n, i, row, anchor) - 1)];
        const RatVec sig = d.anchor_signature(n, i, anchor);
        for (size_t q = 0; q < census.size(); ++q)
          CHECK(sig[q] == Rational(census[q], lvl.height));
      }
    }
  }
}

TEST_CASE("certification anchor must lie below the certified level") {
  Diagram d = built({"1/4", "3/4"}, 3);
  CHECK_THROWS_AS(certify_simplex(d, targets({"1/4", "3/4"}), 3, 3), Error);
  CHECK_THROWS_AS(certify_simplex(d, targets({"1/4", "3/4"}), 3, 7), Error);
}
