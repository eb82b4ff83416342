#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ftl/rational.hpp"
#include "ftl/setops.hpp"

namespace ftl {

using RPoint = std::vector<Rational>;

struct Segment {
  RPoint a, b;
};

// Closed set given by segments and isolated points; point data carries a resolution.
class TargetSet {
 public:
  TargetSet(std::string name, int dim, std::vector<Segment> segments, std::vector<RPoint> points = {},
            Rational resolution = Rational(0));

  // line, cross, quarter, parallel, diagonal, bounded. Lines are segments of half-length extent.
  static TargetSet builtin(const std::string& name, int dim = 2, int64_t extent = 4096);
  static std::vector<std::string> builtin_names();
  static TargetSet from_cloud(const std::string& name, const PointCloud& cloud);

  const std::string& name() const { return name_; }
  int dim() const { return dim_; }
  const std::vector<Segment>& segments() const { return segments_; }
  const std::vector<RPoint>& points() const { return points_; }
  const Rational& resolution() const { return resolution_; }
  bool contains_origin() const;

  // Squared distance from v to T intersected with the box [-w, w]^dim; nullopt when that part is empty.
  std::optional<Rational> dist2_clipped(const RPoint& v, const Rational& w) const;
  // Points of T within the closed ball with consecutive spacing at most h.
  PointCloud sample(const Rational& h, const Rational& radius) const;
  // Lipschitz spot check of the distance function on random pairs in [-radius, radius]^dim.
  bool oracle_consistent(uint64_t seed, int pairs, const Rational& radius) const;

 private:
  std::string name_;
  int dim_;
  std::vector<Segment> segments_;
  std::vector<RPoint> points_;
  Rational resolution_;
};

// Vertices 2^{-k} m with m in [-2^k, 2^k]^dim; edges join vertices at distance 2^{-k}.
class GridGraph {
 public:
  GridGraph(int dim, int k, std::vector<std::vector<int64_t>> vertices);

  int dim() const { return dim_; }
  int k() const { return k_; }
  size_t vertex_count() const { return keys_.size(); }
  std::vector<int64_t> vertex(size_t i) const;
  bool contains(const std::vector<int64_t>& m) const;
  // Pairs (i, axis): edge from vertex i to vertex i + e_axis.
  std::vector<std::pair<size_t, int>> edges() const;
  size_t edge_count() const { return edges().size(); }
  Rational length() const;  // edge count times 2^{-k}
  bool has_origin() const;
  bool has_boundary() const;
  bool connected() const;
  bool in_family() const;  // origin, full boundary lattice and connected
  Rational length_bound() const;  // (2^{k+1} + 1)^dim
  uint64_t content_hash() const;   // stable across runs; identifies graphs in a cascade

 private:
  uint64_t key(const std::vector<int64_t>& m) const;
  int dim_;
  int k_;
  int64_t base_;
  std::vector<uint64_t> keys_;  // sorted
};

struct Approximation {
  int j = 1;
  int dim = 2;
  std::vector<std::vector<int64_t>> w;  // W_j as integer m, point 2^{-j} m
  int components = 0;
  std::vector<int> label;                  // component per W_j point
  std::vector<bool> component_reaches_boundary;
  bool all_reach_boundary() const;
};

Approximation approximate(const TargetSet& t, int j);
// Connected grid graph through 0 and the boundary lattice that extends W_j, at level 2j.
GridGraph complete_to_graph(const Approximation& x);

struct CascadeSpec {
  std::vector<int> k;             // k[n-1] = k_n
  std::vector<BigRational> h1;    // h1[n-1] = length of Im(G_n)
  std::vector<BigRational> r;     // r[0] = 1, r[n] for n = 1..count
  BigRational total_length() const;  // sum r_n h1_n
};

// r_n = min{1 / (2^{n+1} h1_n), r_{n-1} / 2^{n + k_{n+1} + 1}, r_{n-1} / 2^{n + k_{n-1} + 1}},
// with k_0 = 0 and a missing k_{n+1} read as 0.
CascadeSpec build_cascade(const std::vector<std::pair<BigRational, int>>& h1_and_k);
CascadeSpec build_cascade(const std::vector<GridGraph>& graphs);

struct CascadeCheck {
  std::string id;
  bool ok = false;
  std::string detail;
};
std::vector<CascadeCheck> check_cascade(const CascadeSpec& c);

struct BigSegment {
  std::vector<BigRational> a, b;
};

struct AssembledH {
  std::vector<BigSegment> segments;
  BigRational length;
  bool connected = false;
  std::vector<bool> glued;  // per level n < depth
};
AssembledH assemble_H(const CascadeSpec& c, const std::vector<GridGraph>& graphs, int depth);

struct RecoveryReport {
  int j = 0;
  size_t position = 0;  // n_j, 1-based
  Rational radius;
  bool applicable = false;
  double h_over_t = 0;  // exc(rho_j H within R, T)
  double t_over_h = 0;  // exc(T within R, rho_j H)
  double bound = 0;     // 2^{2-j} (sqrt N + 1/4)
  double slack = 0;     // sampling + small cube + target resolution
  bool scale_ok = false;  // rho_j r_{n_j+1} <= 2^{-n_j-j+1}
  bool ok = false;
};
// Compares rho_j H with T in the closed ball, rho_j = 2^j / r_{n_j}.
RecoveryReport verify_recovery(const TargetSet& t, const CascadeSpec& c, const std::vector<GridGraph>& graphs,
                               size_t position, int j, const Rational& radius, int samples_per_edge = 4);

}  // namespace ftl
