#include <catch_amalgamated.hpp>

#include <map>
#include <numeric>

#include "ftl/dendrite.hpp"

using namespace ftl;

namespace {

// Union-find over the edge list: tree iff connected and acyclic.
bool tree_oracle(const DendriteGraph& g) {
  std::map<Cell, Cell> parent;
  for (const auto& v : g.vertices()) parent[v] = v;
  auto find = [&](Cell c) {
    while (!(parent[c] == c)) c = parent[c] = parent[parent[c]];
    return c;
  };
  for (const auto& e : g.edges()) {
    Cell a = find(e.from()), b = find(e.to());
    if (a == b) return false;  // cycle
    parent[a] = b;
  }
  Cell root = find(g.vertices().front());
  for (const auto& v : g.vertices())
    if (!(find(v) == root)) return false;
  return true;
}

}  // namespace

TEST_CASE("model dendrites are trees with four leaves", "[dendrite]") {
  for (int n : {4, 6, 8})
    for (int model : {1, 2}) {
      DendriteGraph t = build_model_dendrite(n, model);
      CHECK(t.is_tree());
      CHECK(tree_oracle(t));
      CHECK(model_leaves(n, model).size() == 4);
      CHECK(t.has_vertex({0, 0}));
    }
}

TEST_CASE("stage-m dendrites are trees", "[dendrite][property]") {
  for (uint64_t seed : {1, 2, 3})
    for (int m : {1, 2}) {
      DendriteGraph t = build_Tm(4, ChoiceFunction::seeded(seed), m);
      CHECK(t.is_tree());
      CHECK(tree_oracle(t));
      CHECK(t.edges().size() + 1 == t.vertices().size());
    }
}

TEST_CASE("every edge of T_m gets one side label", "[dendrite]") {
  ChoiceFunction eta = ChoiceFunction::seeded(6);
  DendriteGraph t = build_Tm(4, eta, 2);
  std::vector<EdgeLabel> labels = classify_edges(eta, t);
  CHECK(labels.size() == t.edges().size());
  for (const auto& l : labels) CHECK(t.has_edge(l.edge));
}

TEST_CASE("tours pass the multiplicity and ordering checks", "[dendrite]") {
  for (int n : {4, 6})
    for (int model : {1, 2})
      for (bool ext : {false, true}) {
        TourPlan plan = build_tour(n, model, ext);
        for (const auto& c : check_tour(plan)) {
          INFO("n=" << n << " model=" << model << " ext=" << ext << " " << c.id << " " << c.detail);
          CHECK(c.ok);
        }
        CHECK(plan.param_of(0) == Rational(0));
        CHECK(plan.t_split() > Rational(0));
        CHECK(plan.t_split() < Rational(1));
      }
}

TEST_CASE("interval families tile [0,1] continuously", "[dendrite][property]") {
  ChoiceFunction eta = ChoiceFunction::seeded(8);
  for (int m : {0, 1, 2}) {
    IntervalFamily fam = build_family(4, eta, m);
    REQUIRE_FALSE(fam.items.empty());
    CHECK(fam.items.front().a == Rational(0));
    CHECK(fam.items.back().b == Rational(1));
    for (size_t i = 0; i + 1 < fam.items.size(); ++i) {
      CHECK(fam.items[i].b == fam.items[i + 1].a);
      CHECK(fam.items[i].q == fam.items[i + 1].p);
    }
    // every length-m word appears as exactly one N interval
    CHECK(fam.count(IntervalKind::N) == static_cast<size_t>(ipow(14, m)));
  }
}

TEST_CASE("family properties hold at small stages", "[dendrite]") {
  for (uint64_t seed : {1, 4}) {
    ChoiceFunction eta = ChoiceFunction::seeded(seed);
    for (int m : {1, 2}) {
      IntervalFamily fam = build_family(4, eta, m), next = build_family(4, eta, m + 1);
      for (const auto& c : check_properties(fam, next, eta)) {
        INFO("seed=" << seed << " m=" << m << " " << c.id << " " << c.detail);
        CHECK(c.ok);
      }
    }
  }
}

TEST_CASE("reparametrized map is a monotone measure parametrization", "[dendrite][property]") {
  ChoiceFunction eta = ChoiceFunction::seeded(2);
  ParamMap map(4, eta, 2, 3);
  const auto& cum = map.cumulative();
  CHECK(cum.front() == Rational(0));
  CHECK(cum.back() == Rational(1));
  CHECK(std::is_sorted(cum.begin(), cum.end()));
  Rational total = std::accumulate(map.masses().begin(), map.masses().end(), Rational(0));
  CHECK(total == Rational(1));
  CHECK(map.eval(Rational(0)) == Point2{Rational(0), Rational(0)});
  CHECK_THROWS_AS(map.eval(Rational(3, 2)), precondition_error);
  auto d = map.eval(0.37);
  Point2 e = map.eval(Rational(37, 100));
  CHECK(d[0] == Catch::Approx(e[0].to_double()).margin(1e-9));
  CHECK(d[1] == Catch::Approx(e[1].to_double()).margin(1e-9));
  CHECK(map.error_radius() == Catch::Approx(std::sqrt(2.0) / 16));
}

TEST_CASE("Holder constant stays below n^3 sqrt 2", "[dendrite]") {
  ParamMap map(4, ChoiceFunction::seeded(3), 2, 3);
  HolderReport h = holder_constant(map, 200, 5);
  CHECK(h.pairs > 0);
  CHECK(h.exponent == Catch::Approx(std::log(4.0) / std::log(14.0)));
  CHECK(h.constant <= 64 * std::sqrt(2.0));
}
