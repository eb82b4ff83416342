#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ftl/rational.hpp"
#include "ftl/setops.hpp"
#include "ftl/symbolic.hpp"

namespace ftl {

// x -> scale * P x + translation, P a signed permutation (entry k maps axis k
// to axis |perm[k]|-1 with sign of perm[k]). Empty perm means identity.
struct Similarity {
  Rational scale{1};
  std::vector<int> perm;
  std::vector<Rational> translation;

  static Similarity identity(int dim);
  std::vector<Rational> apply(const std::vector<Rational>& x) const;
  Point2 apply(const Point2& x) const;
  Similarity then(const Similarity& outer) const;  // outer o this
  Similarity inverse() const;
  friend bool operator==(const Similarity&, const Similarity&) = default;
};

Similarity compose(const Similarity& outer, const Similarity& inner);  // outer o inner

// Bottom-left lattice corner of the j-th model cell, in units of 1/n.
Cell model_cell(int n, int model, int j);
Similarity model_map(int n, int model, int j);

class ModelSystem {
 public:
  ModelSystem(int n, int model);
  int n() const { return n_; }
  int model() const { return model_; }
  const std::vector<Cell>& corners() const { return corners_; }  // index j-1
  std::vector<Similarity> maps() const;
  CellSet cells() const;

 private:
  int n_;
  int model_;
  std::vector<Cell> corners_;
};

struct ConstraintCheck {
  std::string id;
  bool ok = false;
  std::string detail;
};
// C1..C7 for the model layout at base n.
std::vector<ConstraintCheck> check_constraints(int n);

// Corner of phi_w in units of n^{-|w|}.
Cell phi_corner(int n, const ChoiceFunction& eta, const Word& w);
Similarity compose_phi(int n, const ChoiceFunction& eta, const Word& w);

struct CarpetApprox {
  int n = 4;
  int depth = 0;
  CellSet cells;
  std::vector<uint64_t> words;  // word index per cell, aligned with cells.cells()
};

using CellFilter = std::function<bool(const Cell& corner, int depth)>;
using CellVisitor = std::function<void(const Word& w, const Cell& corner)>;

// Depth-first enumeration of depth-m cells; subtrees whose cell fails keep are skipped.
// Throws budget_error when more than budget cells would be emitted.
void enumerate_cells(int n, const ChoiceFunction& eta, int depth, const CellFilter& keep,
                     const CellVisitor& emit, uint64_t budget);

CarpetApprox approx_cells(int n, const ChoiceFunction& eta, int depth, uint64_t budget = 20'000'000);

struct CellRelation {
  bool intersecting = false;
  Rational gap_squared;  // squared distance between the closed cells
};
CellRelation cell_relation(int n, const ChoiceFunction& eta, const Word& w, const Word& v);

struct CodedPoint {
  Point2 point;
  Rational radius_factor;  // error is at most sqrt(2) * radius_factor
  double error_radius() const;
};
CodedPoint code_point(int n, const ChoiceFunction& eta, const Word& prefix);

double alpha(int n);  // log(5n-6) / log n

struct AhlforsConstants {
  double alpha;
  double lower;  // (8 sqrt 2)^{-alpha}
  double upper;  // 9 (8 / sqrt 2)^{alpha}
  double derived_lower;  // (2 sqrt 2 n)^{-alpha}
  double derived_upper;  // 9 (sqrt 2 n)^{alpha}
};
AhlforsConstants ahlfors_constants(int n);

struct AhlforsSample {
  Point2 x;
  Rational r;
  Rational inner_mass;  // depth-m cells inside the closed ball
  Rational outer_mass;  // depth-m cells meeting the closed ball
  double inner_ratio = 0;
  double outer_ratio = 0;
  double lower = 0;
  double upper = 0;
  double eps_lower = 0;
  double eps_upper = 0;
  bool pass = false;
};
AhlforsSample ahlfors_ratio(int n, const ChoiceFunction& eta, const Point2& x, const Rational& r,
                            int depth);

}  // namespace ftl
