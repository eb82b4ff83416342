#include <catch_amalgamated.hpp>

#include <cmath>

#include "ftl/acceptance.hpp"
#include "ftl/tangent.hpp"

using namespace ftl;

TEST_CASE("cut point formula equals the geometric sum", "[tangent]") {
  for (int n : {4, 6, 8})
    for (int k = 0; k <= 4; ++k) {
      uint64_t sum = 0, p = 1;
      for (int i = 0; i < k; ++i, p *= static_cast<uint64_t>(5 * n - 6)) sum += p;
      CHECK(cut_point_formula(n, k) == sum);
    }
  CHECK(cut_point_formula(6, 2) == 25);
}

TEST_CASE("counted local cut points match the formula", "[tangent]") {
  for (int n : {4, 6})
    for (int k : {0, 1, 2}) {
      INFO("n=" << n << " k=" << k);
      CHECK(count_local_cut_points(n, k) == cut_point_formula(n, k));
    }
}

TEST_CASE("model contacts", "[tangent]") {
  for (int n : {4, 6, 8}) {
    EdgeMeetVerdict two = check_model_contacts(n, 2, 2);
    INFO(two.detail);
    CHECK(two.ok);
    CHECK(two.report.corner_contacts.empty());
    EdgeMeetVerdict one = check_model_contacts(n, 1, 1);
    INFO(one.detail);
    CHECK(one.ok);
    REQUIRE(one.report.corner_contacts.size() == 1);
    CHECK(one.report.corner_contacts[0].point == Point2{Rational(1, 2), Rational(2, n)});
  }
}

TEST_CASE("Knk has the expected size", "[tangent]") {
  // k model-1 levels and extra model-2 levels, every map kept
  CHECK(build_Knk(4, 1, 1).size() == 14 * 14);
  CHECK(build_Knk(4, 2, 0).size() == 14 * 14);
  CHECK_THROWS_AS(build_Knk(4, 3, 2, 1000), budget_error);
}

TEST_CASE("stopping family of an equal-ratio system", "[tangent]") {
  // three maps of ratio 1/2: L_w < 1/8 <= L_parent forces length 4
  std::vector<Rational> l(3, Rational(1, 2));
  StoppingFamily f = stopping_words(l, Rational(1, 8));
  CHECK(f.words.size() == 81);
  for (const auto& w : f.words) CHECK(w.size() == 4);
  double s = std::log(3.0) / std::log(2.0);
  // sum of L_w^s is one at the similarity dimension
  CHECK(moran_sum(f, s) == Catch::Approx(1.0));
  StoppingFamily g = stopping_words_sq(l, Rational(1, 64));
  CHECK(g.words.size() == f.words.size());
}

TEST_CASE("stopping family with unequal ratios is an antichain cover", "[tangent][property]") {
  std::vector<Rational> l{Rational(1, 2), Rational(1, 3), Rational(1, 4)};
  Rational delta(1, 20);
  StoppingFamily f = stopping_words(l, delta);
  auto scale = [&](const Word& w) {
    Rational s(1);
    for (int x : w) s *= l[static_cast<size_t>(x - 1)];
    return s;
  };
  for (const auto& w : f.words) {
    CHECK(scale(w) < delta);
    CHECK(scale(prefix(w, w.size() - 1)) >= delta);
  }
  // the cylinders partition the full shift: masses under the uniform measure sum to one
  double mass = 0;
  for (const auto& w : f.words) mass += std::pow(1.0 / 3.0, static_cast<double>(w.size()));
  CHECK(mass == Catch::Approx(1.0));
}

TEST_CASE("sponge faces of adjacent cubes", "[tangent]") {
  Sponge s = Sponge::from_model(4, 2);
  CHECK(s.k == 4);
  CHECK(s.digits.size() == 14);
  auto same = sponge_face_intersection(s, {0, 0});
  REQUIRE(same);
  // cubes 1 and 2 of the bottom row meet along a vertical edge
  auto face = sponge_face_intersection(s, {0, 1});
  REQUIRE(face);
  CHECK(face->face == std::vector<int>{1, -1});
  // bottom-left and top-right corners are disjoint
  CHECK_FALSE(sponge_face_intersection(s, {0, 2 * 4 - 2}));
}

TEST_CASE("quarter circle blow-ups flatten to a line", "[tangent]") {
  PointCloud curve = quarter_circle_cloud(4096, 20);
  std::vector<Rational> x{Rational(3, 5), Rational(4, 5)};
  LineCheck loose = line_blowup_check(curve, x, Rational(1, 4), 0.05);
  LineCheck tight = line_blowup_check(curve, x, Rational(1, 64), 0.05);
  CHECK(tight.ok);
  CHECK(tight.curve_to_line < loose.curve_to_line);
  // tangent at (3/5, 4/5) has slope -3/4
  double expect = std::atan2(-3.0, 4.0);
  double diff = std::fmod(std::abs(tight.direction - expect), M_PI);
  CHECK(std::min(diff, M_PI - diff) < 0.02);
}

TEST_CASE("limit model keeps its cut points in the planted square", "[tangent]") {
  TangentModel m = limit_model(4, 1, Rational(2), {{1, 0}, {-1, 0}, {0, -1}});
  CHECK(m.expected_cut_points == cut_point_formula(4, 1));
  CHECK(m.cut_points.size() == m.expected_cut_points);
  CHECK(m.cut_points_inside);
}

TEST_CASE("blow-up pipeline on a single planted occurrence", "[tangent]") {
  PlantSpec spec = acceptance_profile_spec();
  spec.occurrences.resize(1);
  BlowupOptions opt;
  opt.radii = {Rational(1)};
  std::vector<BlowupRow> rows = blowup_pipeline(spec, 7, opt);
  REQUIRE(rows.size() == 1);
  const BlowupRow& r = rows[0];
  CHECK(r.shift_ok);
  CHECK(r.window_computed);
  CHECK(r.window_ok);
  CHECK(r.shift.le(r.shift_bound));
  REQUIRE(r.aw.size() == 1);
  CHECK(r.aw[0].radius == Rational(1));
}
