#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <set>

#include "ftl/carpet.hpp"

using namespace ftl;

namespace {

// Cell of phi_w obtained by composing the similarities themselves.
Cell oracle_corner(int n, const ChoiceFunction& eta, const Word& w) {
  Similarity s = Similarity::identity(2);
  Word pre;
  for (int letter : w) {
    s = compose(s, model_map(n, eta(pre), letter));
    pre.push_back(letter);
  }
  Point2 origin = s.apply(Point2{Rational(0), Rational(0)});
  int64_t scale = ipow(n, static_cast<int>(w.size()));
  Rational i = origin[0] * Rational(scale), j = origin[1] * Rational(scale);
  REQUIRE(i.is_integer());
  REQUIRE(j.is_integer());
  return {i.num(), j.num()};
}

}  // namespace

TEST_CASE("model layouts satisfy the layout constraints", "[carpet]") {
  for (int n : {4, 6, 8, 10, 12})
    for (const auto& c : check_constraints(n)) {
      INFO("n=" << n << " " << c.id << " " << c.detail);
      CHECK(c.ok);
    }
}

TEST_CASE("model cells are distinct, inside the grid and contain the ring", "[carpet][property]") {
  for (int n : {4, 6, 8})
    for (int model : {1, 2}) {
      ModelSystem m(n, model);
      std::set<Cell> cells(m.corners().begin(), m.corners().end());
      CHECK(cells.size() == static_cast<size_t>(5 * n - 6));
      for (const auto& c : cells) {
        CHECK(c.i >= 0);
        CHECK(c.i < n);
        CHECK(c.j >= 0);
        CHECK(c.j < n);
      }
      for (int i = 0; i < n; ++i) {
        CHECK(cells.count({i, 0}));
        CHECK(cells.count({i, n - 1}));
        CHECK(cells.count({0, i}));
        CHECK(cells.count({n - 1, i}));
      }
    }
}

TEST_CASE("similarity algebra", "[carpet][property]") {
  Similarity a{Rational(1, 4), {2, -1}, {Rational(1, 3), Rational(2)}};
  Similarity b{Rational(2), {}, {Rational(-1), Rational(1, 5)}};
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int64_t> c(-50, 50);
  for (int it = 0; it < 50; ++it) {
    Point2 x{Rational(c(rng), 7), Rational(c(rng), 3)};
    CHECK(compose(a, b).apply(x) == a.apply(b.apply(x)));
    CHECK(a.inverse().apply(a.apply(x)) == x);
    CHECK(b.then(a).apply(x) == a.apply(b.apply(x)));
  }
}

TEST_CASE("cell corners agree with composed similarities", "[carpet]") {
  for (int n : {4, 6}) {
    ChoiceFunction eta = ChoiceFunction::seeded(3);
    Alphabet a(n);
    for (uint64_t i = 0; i < 200; ++i) {
      Word w = word_from_index(a, (i * 104729) % static_cast<uint64_t>(ipow(a.size(), 3)), 3);
      CHECK(phi_corner(n, eta, w) == oracle_corner(n, eta, w));
    }
  }
}

TEST_CASE("depth-m approximation has (5n-6)^m distinct cells", "[carpet]") {
  for (int n : {4, 6})
    for (int m : {0, 1, 2, 3}) {
      CarpetApprox c = approx_cells(n, ChoiceFunction::seeded(9), m);
      CHECK(c.cells.size() == static_cast<size_t>(ipow(5 * n - 6, m)));
      CHECK(c.words.size() == c.cells.size());
      auto b = c.cells.index_bounds();
      if (m > 0) {
        CHECK(b[0] == 0);
        CHECK(b[1] == 0);
        CHECK(b[2] == ipow(n, m) - 1);
        CHECK(b[3] == ipow(n, m) - 1);
      }
    }
}

TEST_CASE("approximations are nested", "[carpet][property]") {
  const int n = 4;
  ChoiceFunction eta = ChoiceFunction::seeded(21);
  CarpetApprox coarse = approx_cells(n, eta, 2), fine = approx_cells(n, eta, 3);
  for (const auto& c : fine.cells.cells()) CHECK(coarse.cells.contains({c.i / n, c.j / n}));
}

TEST_CASE("carpet approximations are edge connected", "[carpet][property]") {
  for (uint64_t seed : {1, 2, 3}) {
    CarpetApprox c = approx_cells(4, ChoiceFunction::seeded(seed), 3);
    CHECK(connected_components(c.cells, Adjacency::edge).count == 1);
  }
}

TEST_CASE("budget is enforced", "[carpet]") {
  CHECK_THROWS_AS(approx_cells(4, ChoiceFunction::constant(1), 4, 1000), budget_error);
}

TEST_CASE("cell relation reports gaps between cells", "[carpet]") {
  ChoiceFunction eta = ChoiceFunction::constant(1);
  CHECK(cell_relation(4, eta, {1}, {1}).intersecting);
  CHECK(cell_relation(4, eta, {1}, {2}).intersecting);
  CellRelation far = cell_relation(4, eta, {1}, {3});  // (0,0) and (2,0)
  CHECK_FALSE(far.intersecting);
  CHECK(far.gap_squared == Rational(1, 16));
}

TEST_CASE("coded points lie in their cell", "[carpet]") {
  ChoiceFunction eta = ChoiceFunction::seeded(4);
  CodedPoint p = code_point(4, eta, {6, 2, 9});
  Cell c = phi_corner(4, eta, {6, 2, 9});
  CHECK(p.point[0] == Rational(c.i, 64));
  CHECK(p.radius_factor == Rational(1, 64));
  CHECK_THROWS_AS(code_point(4, eta, {}), precondition_error);
}

TEST_CASE("Ahlfors constants follow their closed forms", "[carpet]") {
  for (int n : {4, 6, 8}) {
    double a = std::log(5.0 * n - 6) / std::log(n);
    AhlforsConstants c = ahlfors_constants(n);
    CHECK(c.alpha == Catch::Approx(a));
    CHECK(c.lower == Catch::Approx(std::pow(8 * std::sqrt(2.0), -a)));
    CHECK(c.upper == Catch::Approx(9 * std::pow(8 / std::sqrt(2.0), a)));
    CHECK(c.derived_lower == Catch::Approx(std::pow(2 * std::sqrt(2.0) * n, -a)));
    CHECK(c.derived_upper == Catch::Approx(9 * std::pow(std::sqrt(2.0) * n, a)));
  }
}

TEST_CASE("Ahlfors ratios stay within the bounds", "[carpet][property]") {
  ChoiceFunction eta = ChoiceFunction::seeded(5);
  for (auto [x, r] : std::vector<std::pair<Point2, Rational>>{{{Rational(1, 2), Rational(0)}, Rational(1, 5)},
                                                              {{Rational(0), Rational(0)}, Rational(1, 8)},
                                                              {{Rational(1), Rational(1, 2)}, Rational(1, 6)}}) {
    AhlforsSample s = ahlfors_ratio(4, eta, x, r, 4);
    CHECK(s.inner_mass <= s.outer_mass);
    CHECK(s.pass);
  }
}
