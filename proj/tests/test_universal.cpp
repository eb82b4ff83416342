#include <catch_amalgamated.hpp>

#include <queue>
#include <set>

#include "ftl/universal.hpp"

using namespace ftl;

namespace {

using Key = std::vector<int64_t>;

std::set<Key> vertex_set(const GridGraph& g) {
  std::set<Key> s;
  for (size_t i = 0; i < g.vertex_count(); ++i) s.insert(g.vertex(i));
  return s;
}

size_t edge_oracle(const GridGraph& g) {
  std::set<Key> s = vertex_set(g);
  size_t count = 0;
  for (const auto& v : s)
    for (int a = 0; a < g.dim(); ++a) {
      Key u = v;
      ++u[static_cast<size_t>(a)];
      count += s.count(u);
    }
  return count;
}

bool connected_oracle(const GridGraph& g) {
  std::set<Key> todo = vertex_set(g);
  if (todo.empty()) return true;
  std::queue<Key> q;
  q.push(*todo.begin());
  todo.erase(todo.begin());
  while (!q.empty()) {
    Key v = q.front();
    q.pop();
    for (int a = 0; a < g.dim(); ++a)
      for (int d : {-1, 1}) {
        Key u = v;
        u[static_cast<size_t>(a)] += d;
        auto it = todo.find(u);
        if (it == todo.end()) continue;
        q.push(*it);
        todo.erase(it);
      }
  }
  return todo.empty();
}

// r_n = min{1 / (2^{n+1} h_n), r_{n-1} / 2^{n + k_{n+1} + 1}, r_{n-1} / 2^{n + k_{n-1} + 1}}.
std::vector<BigRational> cascade_oracle(const std::vector<std::pair<BigRational, int>>& in) {
  std::vector<BigRational> r{BigRational(1)};
  auto p2 = [](int e) { return BigRational(BigInt(1) << e); };
  for (size_t n = 1; n <= in.size(); ++n) {
    int kn1 = n < in.size() ? in[n].second : 0;
    int knm1 = n >= 2 ? in[n - 2].second : 0;
    int e = static_cast<int>(n);
    BigRational v = 1 / (p2(e + 1) * in[n - 1].first);
    v = std::min(v, r[n - 1] / p2(e + kn1 + 1));
    v = std::min(v, r[n - 1] / p2(e + knm1 + 1));
    r.push_back(v);
  }
  return r;
}

}  // namespace

TEST_CASE("target distances", "[universal]") {
  TargetSet line = TargetSet::builtin("line");
  CHECK(line.contains_origin());
  auto d = line.dist2_clipped({Rational(3), Rational(4)}, Rational(10));
  REQUIRE(d);
  CHECK(*d == Rational(16));
  // the clipped part still reaches x = 10
  CHECK(*line.dist2_clipped({Rational(12), Rational(0)}, Rational(10)) == Rational(4));
  CHECK(line.oracle_consistent(3, 200, Rational(8)));
  CHECK_THROWS_AS(TargetSet::builtin("nope"), precondition_error);
  for (const auto& name : TargetSet::builtin_names()) CHECK(TargetSet::builtin(name).contains_origin());
}

TEST_CASE("target samples are dense", "[universal][property]") {
  TargetSet cross = TargetSet::builtin("cross");
  PointCloud s = cross.sample(Rational(1, 8), Rational(2));
  CHECK(s.contains_origin());
  for (size_t i = 0; i < s.size(); ++i) {
    auto d = cross.dist2_clipped(s.point(i), Rational(4));
    REQUIRE(d);
    CHECK(*d <= s.resolution() * s.resolution());
    CHECK(s.coord(i, 0) * s.coord(i, 0) + s.coord(i, 1) * s.coord(i, 1) <= Rational(4));
  }
}

TEST_CASE("grid graph counts match set oracles", "[universal][property]") {
  std::vector<std::vector<int64_t>> verts;
  for (int64_t x = -2; x <= 2; ++x) verts.push_back({x, 0});
  for (int64_t y = -2; y <= 2; ++y)
    if (y != 0) verts.push_back({0, y});
  verts.push_back({2, 2});
  GridGraph g(2, 1, verts);
  CHECK(g.edge_count() == edge_oracle(g));
  CHECK(g.connected() == connected_oracle(g));
  CHECK_FALSE(g.connected());
  CHECK(g.length() == Rational(static_cast<int64_t>(edge_oracle(g)), 2));
  CHECK(g.length_bound() == Rational(25));
  CHECK(g.has_origin());
  CHECK_FALSE(g.in_family());
  GridGraph h(2, 1, {{0, 0}, {1, 0}, {0, 0}});  // duplicates collapse
  CHECK(h.vertex_count() == 2);
  CHECK(h.content_hash() == GridGraph(2, 1, {{1, 0}, {0, 0}}).content_hash());
  CHECK_THROWS_AS(GridGraph(2, 1, {{3, 0}}), precondition_error);
}

TEST_CASE("unbounded targets give components that reach the boundary", "[universal]") {
  for (const auto& name : {"line", "cross", "quarter", "parallel", "diagonal"})
    for (int j : {1, 2, 3}) {
      Approximation x = approximate(TargetSet::builtin(name), j);
      INFO(name << " j=" << j);
      CHECK(x.all_reach_boundary());
      CHECK(x.label.size() == x.w.size());
      GridGraph g = complete_to_graph(x);
      CHECK(g.in_family());
      CHECK(g.connected() == connected_oracle(g));
      CHECK(g.edge_count() == edge_oracle(g));
      CHECK(g.k() == 2 * j);
    }
}

TEST_CASE("bounded target is detected", "[universal]") {
  Approximation x = approximate(TargetSet::builtin("bounded"), 3);
  CHECK_FALSE(x.all_reach_boundary());
  CHECK_THROWS_AS(complete_to_graph(x), precondition_error);
}

TEST_CASE("point-cloud targets need a resolution finer than the level", "[universal]") {
  std::vector<Point2> pts;
  for (int i = -64; i <= 64; ++i) pts.push_back({Rational(i, 8), Rational(0)});
  TargetSet coarse = TargetSet::from_cloud("cloud", PointCloud::from_points(pts, Rational(1, 4)));
  CHECK_NOTHROW(approximate(coarse, 2));
  CHECK_THROWS_AS(approximate(coarse, 3), precondition_error);
}

TEST_CASE("cascade scales match the recursion", "[universal]") {
  std::vector<std::pair<BigRational, int>> in{{BigRational(3), 2}, {BigRational(40), 4}, {BigRational(700), 6}};
  CascadeSpec c = build_cascade(in);
  CHECK(c.r == cascade_oracle(in));
  for (const auto& ch : check_cascade(c)) {
    INFO(ch.id << " " << ch.detail);
    CHECK(ch.ok);
  }
  // single level: all three terms equal 1/4; two levels: the k_{n+1} term binds for r_1
  CascadeSpec tiny = build_cascade({{BigRational(1), 1}});
  CHECK(tiny.r[1] == BigRational(1, 4));
  CascadeSpec pair = build_cascade({{BigRational(1), 1}, {BigRational(1), 1}});
  CHECK(pair.r[1] == BigRational(1, 8));
  CHECK(pair.r[2] == BigRational(1, 128));
  // length 4 at n = 1 with k_2 = 1: min{1/16, 1/8, 1/4}
  CascadeSpec four = build_cascade({{BigRational(4), 1}, {BigRational(1), 1}});
  CHECK(four.r[1] == BigRational(1, 16));
}

TEST_CASE("cascade total length stays below one", "[universal][property]") {
  std::vector<std::pair<BigRational, int>> in;
  for (int n = 1; n <= 6; ++n) in.push_back({BigRational(BigInt(1) << (3 * n)), 2 * n});
  CascadeSpec c = build_cascade(in);
  CHECK(c.total_length() < 1);
  for (size_t n = 1; n < c.r.size(); ++n) CHECK(c.r[n] < c.r[n - 1]);
}

TEST_CASE("assembled H is connected and glued", "[universal]") {
  TargetSet t = TargetSet::builtin("cross");
  std::vector<GridGraph> graphs;
  for (int j : {1, 2, 3}) graphs.push_back(complete_to_graph(approximate(t, j)));
  CascadeSpec c = build_cascade(graphs);
  CHECK(c.r == cascade_oracle([&] {
          std::vector<std::pair<BigRational, int>> in;
          for (const auto& g : graphs) in.push_back({g.length().to_big(), g.k()});
          return in;
        }()));
  AssembledH h = assemble_H(c, graphs, 3);
  CHECK(h.connected);
  for (bool b : h.glued) CHECK(b);
  CHECK(h.length <= 1);
}

TEST_CASE("rescaled H recovers the target", "[universal]") {
  TargetSet t = TargetSet::builtin("line");
  std::vector<GridGraph> graphs;
  for (int j : {2, 3, 4}) graphs.push_back(complete_to_graph(approximate(t, j)));
  CascadeSpec c = build_cascade(graphs);
  double previous = INFINITY;
  for (size_t i = 0; i < graphs.size(); ++i) {
    RecoveryReport r = verify_recovery(t, c, graphs, i + 1, static_cast<int>(i) + 2, Rational(2));
    REQUIRE(r.applicable);
    CHECK(r.ok);
    CHECK(r.scale_ok);
    CHECK(r.h_over_t <= r.bound + r.slack);
    CHECK(r.t_over_h <= r.bound + r.slack);
    CHECK(r.h_over_t <= previous);
    previous = r.h_over_t;
  }
  RecoveryReport early = verify_recovery(t, c, graphs, 1, 2, Rational(4));
  CHECK_FALSE(early.applicable);  // 2^{j-1} < R
}
