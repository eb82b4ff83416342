#include <catch_amalgamated.hpp>

#include <cmath>
#include <queue>
#include <random>
#include <set>

#include "ftl/setops.hpp"

using namespace ftl;

namespace {

std::vector<std::array<double, 2>> as_doubles(const PointCloud& c) {
  std::vector<std::array<double, 2>> out;
  for (size_t i = 0; i < c.size(); ++i) out.push_back({c.coord(i, 0).to_double(), c.coord(i, 1).to_double()});
  return out;
}

// Brute-force sup over a of the distance to b.
double excess_oracle(const PointCloud& a, const PointCloud& b) {
  double worst = 0;
  for (auto p : as_doubles(a)) {
    double best = INFINITY;
    for (auto q : as_doubles(b)) best = std::min(best, std::hypot(p[0] - q[0], p[1] - q[1]));
    worst = std::max(worst, best);
  }
  return worst;
}

PointCloud random_cloud(std::mt19937_64& rng, int count) {
  std::uniform_int_distribution<int64_t> coord(-40, 40);
  std::vector<Point2> pts;
  for (int i = 0; i < count; ++i) pts.push_back({Rational(coord(rng), 8), Rational(coord(rng), 8)});
  return PointCloud::from_points(pts, Rational(0));
}

// Flood fill over cells with 4- or 8-neighbours.
int components_oracle(const std::vector<Cell>& cells, bool diagonal) {
  std::set<Cell> todo(cells.begin(), cells.end());
  int count = 0;
  while (!todo.empty()) {
    ++count;
    std::queue<Cell> q;
    q.push(*todo.begin());
    todo.erase(todo.begin());
    while (!q.empty()) {
      Cell c = q.front();
      q.pop();
      for (int dx = -1; dx <= 1; ++dx)
        for (int dy = -1; dy <= 1; ++dy) {
          if (!diagonal && dx != 0 && dy != 0) continue;
          auto it = todo.find({c.i + dx, c.j + dy});
          if (it == todo.end()) continue;
          q.push(*it);
          todo.erase(it);
        }
    }
  }
  return count;
}

}  // namespace

TEST_CASE("excess matches a brute-force oracle", "[setops]") {
  std::mt19937_64 rng(3);
  for (int it = 0; it < 60; ++it) {
    PointCloud a = random_cloud(rng, 1 + it % 9), b = random_cloud(rng, 1 + it % 7);
    CHECK(excess(a, b).value() == Catch::Approx(excess_oracle(a, b)).margin(1e-12));
    double h = std::max(excess_oracle(a, b), excess_oracle(b, a));
    CHECK(hausdorff_distance(a, b).value() == Catch::Approx(h).margin(1e-12));
  }
}

TEST_CASE("excess is asymmetric and vanishes on subsets", "[setops]") {
  PointCloud a = PointCloud::from_points(std::vector<Point2>{{Rational(0), Rational(0)}}, Rational(0));
  PointCloud b = PointCloud::from_points(
      std::vector<Point2>{{Rational(0), Rational(0)}, {Rational(3), Rational(4)}}, Rational(0));
  CHECK(excess(a, b).squared == 0);
  CHECK(excess(b, a).squared == 25);
  CHECK(hausdorff_distance(a, b).squared == 25);
}

TEST_CASE("excess satisfies the triangle inequality", "[setops][property]") {
  std::mt19937_64 rng(5);
  for (int it = 0; it < 100; ++it) {
    PointCloud a = random_cloud(rng, 5), b = random_cloud(rng, 6), c = random_cloud(rng, 4);
    CHECK(excess(a, c).value() <= excess(a, b).value() + excess(b, c).value() + 1e-12);
  }
}

TEST_CASE("point clouds normalize and filter", "[setops]") {
  PointCloud c = PointCloud::from_points(
      std::vector<Point2>{{Rational(1, 2), Rational(0)}, {Rational(1, 3), Rational(1)}, {Rational(1, 2), Rational(0)}},
      Rational(0));
  CHECK(c.den() % 6 == 0);
  c.canonicalize();
  CHECK(c.size() == 2);
  auto inside = c.within_ball(Rational(1, 2));
  REQUIRE(inside);
  CHECK(inside->size() == 1);
  CHECK_FALSE(c.within_ball(Rational(1, 4)));
  CHECK_FALSE(c.contains_origin());
  PointCloud r = c.rescaled(5);
  CHECK(r.den() == c.den() * 5);
  CHECK(hausdorff_distance(r, c).squared == 0);
}

TEST_CASE("blow-up maps (S - x) / r into the ball", "[setops]") {
  PointCloud s = PointCloud::from_points(
      std::vector<Point2>{{Rational(1), Rational(1)}, {Rational(2), Rational(1)}, {Rational(9), Rational(9)}},
      Rational(0));
  auto b = blow_up(s, {Rational(1), Rational(1)}, Rational(1, 2), Rational(2));
  REQUIRE(b);
  b->canonicalize();
  REQUIRE(b->size() == 2);
  CHECK(b->coord(0, 0) == Rational(0));
  CHECK(b->coord(1, 0) == Rational(2));
  CHECK(b->coord(1, 1) == Rational(0));
}

TEST_CASE("connected components match a flood fill", "[setops][property]") {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int64_t> coord(0, 7);
  for (int it = 0; it < 80; ++it) {
    std::set<Cell> pick;
    for (int i = 0; i < 20; ++i) pick.insert({coord(rng), coord(rng)});
    std::vector<Cell> cells(pick.begin(), pick.end());
    CellSet s(4, 1, cells);
    CHECK(connected_components(s, Adjacency::edge).count == components_oracle(cells, false));
    CHECK(connected_components(s, Adjacency::corner).count == components_oracle(cells, true));
  }
}

TEST_CASE("contact report separates edge and corner contacts", "[setops]") {
  CellSet edge(4, 1, {{0, 0}, {1, 0}});
  ContactReport e = contact_report(edge);
  CHECK(e.edge_contacts.size() == 1);
  CHECK(e.corner_contacts.empty());
  CellSet corner(4, 1, {{0, 0}, {1, 1}});
  ContactReport c = contact_report(corner);
  CHECK(c.edge_contacts.empty());
  REQUIRE(c.corner_contacts.size() == 1);
  CHECK(c.corner_contacts[0].point == Point2{Rational(1, 4), Rational(1, 4)});
  CHECK(local_cut_point_candidates(corner).size() == 1);
}

TEST_CASE("cell corners carry the cell side as resolution", "[setops]") {
  CellSet s(4, 2, {{0, 0}, {3, 1}});
  PointCloud c = cell_corners(s);
  CHECK(c.resolution() == Rational(1, 16));
  CHECK(c.size() == 8);
}
