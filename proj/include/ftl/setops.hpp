#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ftl/rational.hpp"

namespace ftl {

// Exact length stored as its square.
struct Length {
  BigRational squared;

  double value() const;
  bool le(const Rational& bound) const;
  // Comparison against an irrational bound given in long double.
  bool le(long double bound) const;
  friend bool operator==(const Length&, const Length&) = default;
  friend bool operator<(const Length& a, const Length& b) { return a.squared < b.squared; }
};

// Finite point set in R^dim. Coordinates are coords[i*dim + c] / den with a
// shared positive denominator; resolution bounds the distance from any point
// of the represented closed set to the listed points.
class PointCloud {
 public:
  PointCloud(int dim, int64_t den, std::vector<int64_t> coords, Rational resolution);

  static PointCloud from_points(const std::vector<std::vector<Rational>>& points,
                                Rational resolution);
  static PointCloud from_points(const std::vector<Point2>& points, Rational resolution);

  int dim() const { return dim_; }
  int64_t den() const { return den_; }
  size_t size() const { return coords_.size() / static_cast<size_t>(dim_); }
  const std::vector<int64_t>& coords() const { return coords_; }
  const int64_t* raw(size_t i) const { return coords_.data() + i * static_cast<size_t>(dim_); }
  Rational coord(size_t i, int c) const { return Rational(raw(i)[c], den_); }
  std::vector<Rational> point(size_t i) const;
  const Rational& resolution() const { return resolution_; }
  void set_resolution(const Rational& r);

  bool contains_origin() const;
  // Points with |p| <= radius; nullopt when none remain.
  std::optional<PointCloud> within_ball(const Rational& radius) const;
  // Same set over the denominator den() * factor.
  PointCloud rescaled(int64_t factor) const;
  // Sort points lexicographically and drop duplicates.
  void canonicalize();

 private:
  int dim_;
  int64_t den_;
  std::vector<int64_t> coords_;
  Rational resolution_;
};

struct Cell {
  int64_t i = 0;
  int64_t j = 0;
  friend auto operator<=>(const Cell&, const Cell&) = default;
};

// Union of closed squares offset + n^{-depth} * ([i,i+1] x [j,j+1]).
class CellSet {
 public:
  CellSet(int64_t base, int depth, std::vector<Cell> cells, Point2 offset = {Rational(0), Rational(0)});

  int64_t base() const { return base_; }
  int depth() const { return depth_; }
  const std::vector<Cell>& cells() const { return cells_; }
  size_t size() const { return cells_.size(); }
  const Point2& offset() const { return offset_; }
  Rational side() const;
  bool contains(const Cell& c) const;
  // Bounding box of the lattice indices, as {min_i, min_j, max_i, max_j}.
  std::array<int64_t, 4> index_bounds() const;

 private:
  int64_t base_;
  int depth_;
  std::vector<Cell> cells_;  // sorted, distinct
  Point2 offset_;
};

struct EdgeContact {
  size_t a, b;  // indices into CellSet::cells()
  Point2 from, to;
};
struct CornerContact {
  size_t a, b;
  Point2 point;
};
// Face of [0,1]^N as a product of factors: -1 means [0,1], 0 means {0}, 1 means {1}.
struct FaceContact {
  std::vector<int> indices;
  std::vector<int> face;
};
struct ContactReport {
  std::vector<EdgeContact> edge_contacts;
  // Only points whose local configuration does not meet at edges.
  std::vector<CornerContact> corner_contacts;
  std::vector<FaceContact> faces;
};

enum class Adjacency { edge, corner };

struct Components {
  std::vector<int> label;  // per cell, ids ordered by least cell
  int count = 0;
};

Length excess(const PointCloud& a, const PointCloud& b);
Length hausdorff_distance(const PointCloud& a, const PointCloud& b);

// Cell corners as a cloud; resolution is the cell side.
PointCloud cell_corners(const CellSet& s);

std::optional<PointCloud> blow_up(const PointCloud& s, const std::vector<Rational>& x,
                                  const Rational& r, const Rational& radius);
std::optional<PointCloud> blow_up(const CellSet& s, const Point2& x, const Rational& r,
                                  const Rational& radius);

struct AwRow {
  size_t index;
  Rational radius;
  Length seq_over_target;
  Length target_over_seq;
};
struct AwProfile {
  std::vector<AwRow> rows;
  // True when the last entry at this radius is below eps in both columns.
  bool converged(const Rational& radius, const Rational& eps) const;
};
AwProfile aw_profile(const std::vector<PointCloud>& sequence, const PointCloud& target,
                     const std::vector<Rational>& radii);
// Variant with a separate target per sequence entry.
AwProfile aw_profile(const std::vector<PointCloud>& sequence,
                     const std::vector<PointCloud>& targets, const std::vector<Rational>& radii);

Components connected_components(const CellSet& s, Adjacency adjacency);

ContactReport contact_report(const CellSet& s);
std::vector<Point2> local_cut_point_candidates(const CellSet& s);

}  // namespace ftl
