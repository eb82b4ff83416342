#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ftl/rational.hpp"
#include "ftl/setops.hpp"
#include "ftl/symbolic.hpp"

namespace ftl {

// Unit lattice edge from (x, y) to (x + 1, y) or (x, y + 1).
struct UnitEdge {
  int64_t x = 0;
  int64_t y = 0;
  bool up = false;
  Cell from() const { return {x, y}; }
  Cell to() const { return up ? Cell{x, y + 1} : Cell{x + 1, y}; }
  friend auto operator<=>(const UnitEdge&, const UnitEdge&) = default;
};

// Tree on the lattice n^{-depth} Z^2 with unit edges.
class DendriteGraph {
 public:
  DendriteGraph(int n, int depth, std::vector<UnitEdge> edges, std::vector<Cell> extra_vertices = {});

  int n() const { return n_; }
  int depth() const { return depth_; }
  const std::vector<Cell>& vertices() const { return vertices_; }
  const std::vector<UnitEdge>& edges() const { return edges_; }
  bool has_edge(const UnitEdge& e) const;
  bool has_vertex(const Cell& v) const;
  int degree(const Cell& v) const;
  bool is_connected() const;
  bool is_tree() const;  // connected and |E| = |V| - 1
  std::vector<Cell> leaves() const;  // degree one
  // Vertices without an edge emanating right or up.
  std::vector<Cell> sinks() const;

 private:
  int n_;
  int depth_;
  std::vector<UnitEdge> edges_;  // sorted
  std::vector<Cell> vertices_;   // sorted
};

// T^model at scale 1/n.
DendriteGraph build_model_dendrite(int n, int model);
// Leaves of T^model in the fixed order A, B, C, D.
std::vector<Cell> model_leaves(int n, int model);

DendriteGraph build_Tm(int n, const ChoiceFunction& eta, int m, uint64_t budget = 20'000'000);

struct EdgeLabel {
  UnitEdge edge;
  Word word;
  bool left_side = false;  // true: e_l, false: e_b
};
std::vector<EdgeLabel> classify_edges(const ChoiceFunction& eta, const DendriteGraph& tm);

enum class PieceKind : uint8_t { pause, edge };

struct TourPiece {
  PieceKind kind = PieceKind::pause;
  Cell at;   // pause vertex, or edge start
  Cell to;   // edge end
  int width = 2;  // half-units
  bool first_visit = false;
  bool origin = false;
  bool extension = false;
};

// Depth-first tour of T^model, optionally with the extension edges to (0, n) and (n, 0).
struct TourPlan {
  int n = 4;
  int model = 1;
  bool extended = false;
  std::vector<TourPiece> pieces;
  int total_width = 0;
  size_t first_origin = 0;  // piece indices of the origin pauses
  size_t mid_a = 0;         // first half of the middle origin pause
  size_t mid_b = 0;
  size_t last_origin = 0;
  size_t upper_ext = 0;  // zero-width pause at (0, n); extended only
  size_t lower_ext = 0;  // zero-width pause at (n, 0); extended only

  Rational param_of(size_t piece) const;  // start parameter of a piece
  Rational t_split() const;               // between the two middle halves
};

TourPlan build_tour(int n, int model, bool extended);

struct TourCheck {
  std::string id;
  bool ok = false;
  std::string detail;
};
// Edge multiplicity, preimage counts and the leaf ordering of the extended tour.
std::vector<TourCheck> check_tour(const TourPlan& plan);

enum class IntervalKind : uint8_t { E, N, F };

// One member of the stage-m families. Points are lattice coordinates at scale n^{-m}.
struct FamilyInterval {
  Rational a, b;
  IntervalKind kind = IntervalKind::N;
  bool left_side = false;  // E only
  bool forward = true;     // E only: traversal starts at the cell corner
  uint64_t word = 0;       // N and E: word index at length m
  Cell p;                  // image of a (constant image for N and F)
  Cell q;                  // image of b
};

struct IntervalFamily {
  int n = 4;
  int stage = 0;
  std::vector<FamilyInterval> items;  // ordered by parameter

  size_t count(IntervalKind k) const;
};

IntervalFamily initial_family(int n);
IntervalFamily subdivide(const IntervalFamily& fam, const ChoiceFunction& eta);
IntervalFamily build_family(int n, const ChoiceFunction& eta, int m, uint64_t budget = 30'000'000);

// f_m(t) as an exact lattice point over n^m.
Point2 eval_f(const IntervalFamily& fam, const Rational& t);

struct PropertyCheck {
  std::string id;
  bool ok = false;
  std::string detail;
};
// P1..P7 at stage m using the refinement to stage m+1 where needed, plus the
// uniform step bound between f_m and f_{m+1}.
std::vector<PropertyCheck> check_properties(const IntervalFamily& fam, const IntervalFamily& next,
                                            const ChoiceFunction& eta);

// Measure reparametrization at stage m with masses exact up to absolute depth mass_depth.
class ParamMap {
 public:
  ParamMap(int n, const ChoiceFunction& eta, int stage, int mass_depth);
  ParamMap(IntervalFamily fam, const ChoiceFunction& eta, int mass_depth);

  const IntervalFamily& family() const { return fam_; }
  const std::vector<Rational>& masses() const { return mass_; }
  const std::vector<Rational>& cumulative() const { return cum_; }
  int mass_depth() const { return mass_depth_; }

  Point2 eval(const Rational& t) const;
  std::array<double, 2> eval(double t) const;
  // Error bound for eval against the limit map: sqrt(2) n^{-m}.
  double error_radius() const;

 private:
  void compute_masses(const ChoiceFunction& eta);
  IntervalFamily fam_;
  int mass_depth_;
  std::vector<Rational> mass_;
  std::vector<Rational> cum_;  // size items + 1
  std::vector<long double> cum_ld_;
};

struct HolderReport {
  double constant = 0;
  double exponent = 0;
  size_t pairs = 0;
  double worst_s = 0;
  double worst_t = 0;
};
HolderReport holder_constant(const ParamMap& map, size_t sample_count, uint64_t seed);

}  // namespace ftl
