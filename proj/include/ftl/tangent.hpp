#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ftl/carpet.hpp"
#include "ftl/rational.hpp"
#include "ftl/setops.hpp"
#include "ftl/symbolic.hpp"

namespace ftl {

// Cells of K^{n,k} at depth k + extra_depth: k model-1 levels, then model-2 levels.
CellSet build_Knk(int n, int k, int extra_depth, uint64_t budget = 10'000'000);

// ((5n-6)^k - 1) / (5n-7).
uint64_t cut_point_formula(int n, int k);
// Corner contacts of K^{n,k} at depth k + 1.
uint64_t count_local_cut_points(int n, int k, uint64_t budget = 10'000'000);

// Pairwise contacts of equal-size squares; corner_contacts lists the points that do not meet at edges.
ContactReport meet_at_edges(const CellSet& cells);
// Same for rotation-free maps with a common scale 1/n applied to [0,1]^2.
ContactReport meet_at_edges(const std::vector<Similarity>& maps);

struct EdgeMeetVerdict {
  bool ok = false;
  std::string detail;
  ContactReport report;
};
// Model 2 at the given depth: all contacts meet at edges. Model 1 at depth 1: only (1/2, 2/n).
EdgeMeetVerdict check_model_contacts(int n, int model, int depth);

struct BlowupOptions {
  std::vector<Rational> radii{Rational(1), Rational(2)};
  int window_depth = -1;  // relative depth of the unit-window comparison; -1 means N + k + 1
  int aw_depth = -1;      // relative depth of the ball comparison; -1 means min(N + k + 1, 4)
  bool window = true;
  uint64_t budget = 20'000'000;
  uint64_t r1r2_budget = 1'000'000;
};

struct AwEntry {
  Rational radius;
  Length x_over_y;  // exc(X_N within radius, Y_N)
  Length y_over_x;  // exc(Y_N within radius, X_N)
  Rational resolution;
};

struct BlowupRow {
  Occurrence occ;
  bool structural = false;  // (R1)/(R2) certified from the planted rule
  Point2 x_n;               // computed from a finite prefix of w
  Point2 y_n;
  Rational x_n_error;  // |x_N - x_n| <= sqrt(2) * x_n_error
  Length shift;        // |y_N - x_n|
  Rational shift_bound;
  bool shift_ok = false;

  int window_depth = 0;
  Length window_hausdorff;
  Rational window_bound;
  Rational window_resolution;
  bool window_ok = false;
  bool window_computed = false;

  Rational collar_gap;  // distance from the cell of w(ell) to the boundary of the cell of w(ell-N), relative units
  Rational collar_bound;
  bool collar_ok = false;

  int aw_depth = 0;
  std::vector<AwEntry> aw;
  std::vector<Cell> offsets;  // integer translates of K^{n,0} inside the largest radius
};

BlowupRow blowup_run(int n, const ChoiceFunction& eta, const InfiniteWord& w, const Occurrence& occ,
                     const BlowupOptions& opt);
std::vector<BlowupRow> blowup_pipeline(const PlantSpec& spec, uint64_t seed, const BlowupOptions& opt);

struct BlowupSets {
  CellSet x;  // X_N near the origin
  CellSet y;  // Y_N near the origin
};
// Cell realizations of X_N and Y_N at relative depth d inside the box |coords| <= radius + 1.
BlowupSets blowup_sets(int n, const ChoiceFunction& eta, const InfiniteWord& w, const Occurrence& occ, int d,
                       const Rational& radius, uint64_t budget = 20'000'000);

enum class ComponentKind : uint8_t { base, planted };  // K^{n,0} copy or K^{n,k} copy

struct TangentComponent {
  Cell offset;
  ComponentKind kind = ComponentKind::base;
};

struct TangentModel {
  int n = 4;
  int k = 0;
  Rational window;
  std::vector<TangentComponent> components;
  CellSet cells = CellSet(4, 0, {});
  std::vector<Point2> cut_points;
  uint64_t expected_cut_points = 0;
  bool cut_points_inside = false;  // all inside the planted unit square
};

// L_k in a window: K^{n,k} at the origin plus K^{n,0} at each offset, at depth k + 1.
TangentModel limit_model(int n, int k, const Rational& window, const std::vector<Cell>& offsets,
                         uint64_t budget = 10'000'000);

struct StoppingFamily {
  std::vector<Rational> lipschitz;
  Rational delta_squared;
  std::vector<Word> words;
  Rational min_scale;  // L_min
};

// Words w with L_w < delta <= L_{w minus its last letter}.
StoppingFamily stopping_words(const std::vector<Rational>& lipschitz, const Rational& delta,
                              uint64_t budget = 10'000'000);
// Same with delta given through its square.
StoppingFamily stopping_words_sq(const std::vector<Rational>& lipschitz, const Rational& delta_squared,
                                 uint64_t budget = 10'000'000);
// Sum over members of L_w^s.
double moran_sum(const StoppingFamily& f, double s);

struct BallCover {
  std::vector<Word> words;
  double s = 0;
  double c1 = 0;
  double bound = 0;  // (2 / L_1)^s c_1
  bool inner_ok = false;  // every depth-D cell meeting the ball lies under a member
  bool outer_ok = false;  // every member cell lies in the closed ball of radius 2r
  bool card_ok = false;
  int check_depth = 0;
};
// Members are stopping words with diam(phi_w[0,1]^2) < r whose cell meets the closed ball.
BallCover ball_cover(const std::vector<Similarity>& ifs, const Point2& x, const Rational& r, int check_depth,
                     double s, double c1);

// Sponge maps S_i(y) = y / k + digits_i / k on [0,1]^dim.
struct Sponge {
  int k = 2;
  int dim = 2;
  std::vector<std::vector<int64_t>> digits;

  static Sponge from_model(int n, int model);
};
// Intersection of the cubes S_i([0,1]^dim) over the indices (0-based), written as S_{i_1}(C).
std::optional<FaceContact> sponge_face_intersection(const Sponge& s, const std::vector<int>& indices);

struct LineCheck {
  size_t points = 0;
  double direction = 0;  // angle of the fitted line
  double curve_to_line = 0;
  double line_to_curve = 0;
  double resolution = 0;
  double tolerance = 0;
  bool ok = false;
};
// Quarter circle sampled at t = i / samples through the rational parametrization, rounded to 2^-bits.
PointCloud quarter_circle_cloud(int64_t samples, int bits);
// Blow-up (S - x) / r inside the closed unit ball compared with its least-squares line.
LineCheck line_blowup_check(const PointCloud& curve, const std::vector<Rational>& x, const Rational& r,
                            double tolerance);

}  // namespace ftl
