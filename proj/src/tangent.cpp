#include "ftl/tangent.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>

namespace ftl {

namespace {

using ModelOf = std::function<int(const Word&)>;
using Keep = std::function<bool(const Cell&, int)>;

// Cells `depth` levels below the cell of `root`, in lattice units relative to that cell.
void descend(int n, const Word& root, int depth, const ModelOf& model_of, const Keep& keep,
             const std::function<void(const Word&, const Cell&)>& emit, uint64_t budget) {
  Alphabet a(n);
  std::vector<Cell> table[3];
  for (int model : {1, 2})
    for (int j = 1; j <= a.size(); ++j) table[model].push_back(model_cell(n, model, j));
  Word w = root;
  uint64_t emitted = 0;
  auto visit = [&](auto&& self, Cell c, int d) -> void {
    if (keep && !keep(c, d)) return;
    if (d == depth) {
      if (++emitted > budget) throw budget_error("cell enumeration exceeds budget " + std::to_string(budget));
      emit(w, c);
      return;
    }
    int model = model_of(w);
    for (int j = 1; j <= a.size(); ++j) {
      const Cell& t = table[model][static_cast<size_t>(j - 1)];
      w.push_back(j);
      self(self, Cell{c.i * n + t.i, c.j * n + t.j}, d + 1);
      w.pop_back();
    }
  };
  visit(visit, Cell{0, 0}, 0);
}

// Corner of letters from+1..to of w relative to the cell of w(from), in units n^{-(to-from)}.
Cell rel_corner(int n, const ChoiceFunction& eta, const InfiniteWord& w, size_t from, size_t to) {
  Word prefix = w.take(to);
  Cell c{0, 0};
  for (size_t p = from; p < to; ++p) {
    Cell t = model_cell(n, eta.eval(prefix.data(), p), prefix[p]);
    c = {checked_add(checked_mul(c.i, n), t.i), checked_add(checked_mul(c.j, n), t.j)};
  }
  return c;
}

Point2 lattice(const Cell& c, int64_t scale) { return {Rational(c.i, scale), Rational(c.j, scale)}; }

void require_budget(int n, int depth, uint64_t budget, const char* what) {
  long double total = std::pow(static_cast<long double>(5 * n - 6), depth);
  if (total > static_cast<long double>(budget))
    throw budget_error(std::string(what) + ": (5n-6)^" + std::to_string(depth) + " exceeds budget " +
                       std::to_string(budget));
}

// Keep filter: cell at relative depth j of the collar meets [-b, b+1]^2 after scaling by n^N and shifting by -v.
Keep box_filter(int n, int big_n, Cell v, int64_t b) {
  return [=](const Cell& c, int j) {
    auto meets = [&](int64_t ci, int64_t vi) {
      i128 lo, hi, cl, ch;
      if (j >= big_n) {
        i128 f = ipow(n, j - big_n);
        lo = (static_cast<i128>(vi) - b) * f;
        hi = (static_cast<i128>(vi) + b + 1) * f;
        cl = ci;
        ch = static_cast<i128>(ci) + 1;
      } else {
        i128 f = ipow(n, big_n - j);
        lo = static_cast<i128>(vi) - b;
        hi = static_cast<i128>(vi) + b + 1;
        cl = ci * f;
        ch = (static_cast<i128>(ci) + 1) * f;
      }
      return ch >= lo && cl <= hi;
    };
    return meets(c.i, v.i) && meets(c.j, v.j);
  };
}

}  // namespace

CellSet build_Knk(int n, int k, int extra_depth, uint64_t budget) {
  if (k < 0 || extra_depth < 0) throw precondition_error("build_Knk: negative depth");
  Alphabet a(n);
  require_budget(n, k + extra_depth, budget, "build_Knk");
  std::vector<Cell> cells;
  descend(
      n, {}, k + extra_depth, [k](const Word& w) { return static_cast<int>(w.size()) < k ? 1 : 2; }, nullptr,
      [&](const Word&, const Cell& c) { cells.push_back(c); }, budget);
  return CellSet(n, k + extra_depth, std::move(cells));
}

uint64_t cut_point_formula(int n, int k) {
  Alphabet a(n);
  uint64_t total = 0, layer = 1;
  for (int j = 0; j < k; ++j) {
    total += layer;
    layer *= static_cast<uint64_t>(a.size());
  }
  return total;  // sum of (5n-6)^j for j < k
}

uint64_t count_local_cut_points(int n, int k, uint64_t budget) {
  return local_cut_point_candidates(build_Knk(n, k, 1, budget)).size();
}

ContactReport meet_at_edges(const CellSet& cells) { return contact_report(cells); }

ContactReport meet_at_edges(const std::vector<Similarity>& maps) {
  if (maps.empty()) throw precondition_error("meet_at_edges: no maps");
  Rational scale = maps.front().scale;
  if (scale.sign() <= 0 || scale.num() != 1) throw precondition_error("meet_at_edges: scale must be 1/n");
  std::vector<Cell> cells;
  for (const auto& m : maps) {
    if (!(m.scale == scale)) throw precondition_error("meet_at_edges: scales differ");
    if (m.translation.size() != 2) throw precondition_error("meet_at_edges: planar maps only");
    Rational x = m.translation[0] / scale, y = m.translation[1] / scale;
    if (x.den() != 1 || y.den() != 1) throw precondition_error("meet_at_edges: translations off the lattice");
    cells.push_back({x.num(), y.num()});
  }
  std::sort(cells.begin(), cells.end());
  if (std::adjacent_find(cells.begin(), cells.end()) != cells.end())
    throw invariant_error("meet_at_edges: overlapping interiors");
  return contact_report(CellSet(scale.den(), 1, std::move(cells)));
}

EdgeMeetVerdict check_model_contacts(int n, int model, int depth) {
  EdgeMeetVerdict v;
  if (model == 1 && depth != 1) throw precondition_error("model 1 contacts are checked at depth 1");
  CarpetApprox ap = approx_cells(n, ChoiceFunction::constant(model), depth);
  v.report = meet_at_edges(ap.cells);
  const auto& corners = v.report.corner_contacts;
  if (model == 2) {
    v.ok = corners.empty();
    v.detail = std::to_string(corners.size()) + " corner contacts at depth " + std::to_string(depth);
  } else {
    Point2 expect{Rational(1, 2), Rational(2, n)};
    v.ok = corners.size() == 1 && corners.front().point == expect;
    v.detail = std::to_string(corners.size()) + " corner contact(s)";
    for (const auto& c : corners) v.detail += " " + to_string(c.point);
  }
  return v;
}

// ---------------------------------------------------------------- blow-ups

namespace {

struct BlowupFrame {
  size_t ell, big_n, k;
  Word collar_root;  // w(ell - N)
  Word inner_root;   // w(ell)
  Cell v;            // corner of w(ell) inside the collar, units n^{-N}
  Point2 x_n;
  Point2 y_n;
  Rational x_n_error;
};

BlowupFrame frame(int n, const ChoiceFunction& eta, const InfiniteWord& w, const Occurrence& occ, int d) {
  Alphabet a(n);
  if (occ.big_n < 1 || occ.ell < occ.big_n) throw precondition_error("blow-up: need 1 <= N <= ell");
  BlowupFrame f;
  f.ell = occ.ell;
  f.big_n = occ.big_n;
  f.k = occ.k;
  f.collar_root = w.take(occ.ell - occ.big_n);
  f.inner_root = w.take(occ.ell);
  f.v = rel_corner(n, eta, w, occ.ell - occ.big_n, occ.ell);
  size_t yl = occ.big_n + occ.k - 1;
  size_t dx = std::max<size_t>(static_cast<size_t>(d), yl) + 2;
  if (!w.has(occ.ell + dx)) throw precondition_error("blow-up: word prefix too short for x_N");
  f.x_n = lattice(rel_corner(n, eta, w, occ.ell, occ.ell + dx), ipow(n, static_cast<int>(dx)));
  f.y_n = lattice(rel_corner(n, eta, w, occ.ell, occ.ell + yl), ipow(n, static_cast<int>(yl)));
  f.x_n_error = Rational(1, ipow(n, static_cast<int>(dx)));
  return f;
}

BlowupSets sets_from_frame(int n, const ChoiceFunction& eta, const BlowupFrame& f, int d, const Rational& radius,
                           uint64_t budget) {
  const int big_n = static_cast<int>(f.big_n);
  const int k = static_cast<int>(f.k);
  if (d < k) throw precondition_error("blow-up: relative depth below k");
  Rational ceil_r = floor_div(radius);
  if (ceil_r < radius) ceil_r += Rational(1);
  int64_t b = ceil_r.num() + 1;
  if (b > ipow(n, big_n - 1)) throw precondition_error("blow-up: radius exceeds the collar of w(ell - N)");
  Keep keep = box_filter(n, big_n, f.v, b);
  const int64_t nd = ipow(n, d);
  Cell shift{f.v.i * nd, f.v.j * nd};
  std::vector<Cell> xc, yc;
  descend(
      n, f.collar_root, big_n + d, [&](const Word& u) { return eta(u); }, keep,
      [&](const Word&, const Cell& c) { xc.push_back({c.i - shift.i, c.j - shift.j}); }, budget);
  Keep keep_y = [&](const Cell& c, int j) { return keep(c, j) && !(j == big_n && c == f.v); };
  descend(
      n, f.collar_root, big_n + d, [](const Word&) { return 2; }, keep_y,
      [&](const Word&, const Cell& c) { yc.push_back({c.i - shift.i, c.j - shift.j}); }, budget);
  CellSet knk = build_Knk(n, k, d - k, budget);
  yc.insert(yc.end(), knk.cells().begin(), knk.cells().end());
  Point2 zero{Rational(0), Rational(0)};
  return BlowupSets{CellSet(n, d, std::move(xc), zero - f.x_n), CellSet(n, d, std::move(yc), zero - f.y_n)};
}

}  // namespace

BlowupSets blowup_sets(int n, const ChoiceFunction& eta, const InfiniteWord& w, const Occurrence& occ, int d,
                       const Rational& radius, uint64_t budget) {
  return sets_from_frame(n, eta, frame(n, eta, w, occ, d), d, radius, budget);
}

BlowupRow blowup_run(int n, const ChoiceFunction& eta, const InfiniteWord& w, const Occurrence& occ,
                     const BlowupOptions& opt) {
  Alphabet a(n);
  R1R2Result rr = check_R1R2(a, eta, w, occ, opt.r1r2_budget);
  if (!rr.ok) {
    std::string msg = "(R1)/(R2) fails: " + rr.reason;
    if (rr.witness) msg += " [witness " + word_str(*rr.witness) + "]";
    throw precondition_error(msg);
  }
  const int big_n = static_cast<int>(occ.big_n), k = static_cast<int>(occ.k);
  int wd = opt.window_depth >= 0 ? opt.window_depth : big_n + k + 1;
  int ad = opt.aw_depth >= 0 ? opt.aw_depth : std::min(big_n + k + 1, 4);
  BlowupFrame f = frame(n, eta, w, occ, std::max(wd, ad));

  BlowupRow row;
  row.occ = occ;
  row.structural = rr.structural;
  row.x_n = f.x_n;
  row.y_n = f.y_n;
  row.x_n_error = f.x_n_error;
  row.shift = Length{dist2(f.x_n, f.y_n).to_big()};
  row.shift_bound = rpow(Rational(n), 3 - big_n - k);
  // |y_N - x_N| <= |y_N - x_n| + sqrt(2) err, and sqrt(2) < 3/2.
  {
    Rational slack = Rational(3, 2) * f.x_n_error;
    Rational room = row.shift_bound - slack;
    row.shift_ok = room.sign() >= 0 && row.shift.le(room);
  }

  // Collar: w(ell) stays n^{-1} away from the boundary of the cell of w(ell - N), relative units.
  {
    int64_t side = ipow(n, big_n);
    int64_t gap = std::min({f.v.i, f.v.j, side - f.v.i - 1, side - f.v.j - 1});
    row.collar_gap = Rational(gap, side);
    row.collar_bound = Rational(1, n);
    row.collar_ok = row.collar_gap >= row.collar_bound;
  }

  row.window_depth = wd;
  row.window_bound = rpow(Rational(n), 4 - big_n - k);
  row.window_resolution = Rational(2, ipow(n, wd)) + Rational(3, 2) * f.x_n_error;
  if (opt.window) {
    if (wd < k) throw precondition_error("blow-up: window depth below k");
    require_budget(n, wd, opt.budget, "window comparison");
    std::vector<Cell> cells;
    descend(
        n, f.inner_root, wd, [&](const Word& u) { return eta(u); }, nullptr,
        [&](const Word&, const Cell& c) { cells.push_back(c); }, opt.budget);
    Point2 zero{Rational(0), Rational(0)};
    CellSet xa(n, wd, std::move(cells), zero - f.x_n);
    CellSet kb = build_Knk(n, k, wd - k, opt.budget);
    CellSet yb(n, wd, kb.cells(), zero - f.y_n);
    row.window_hausdorff = hausdorff_distance(cell_corners(xa), cell_corners(yb));
    row.window_ok = row.window_hausdorff.le(row.window_bound);
    row.window_computed = true;
  }

  row.aw_depth = ad;
  Rational rmax(0);
  for (const auto& r : opt.radii) rmax = std::max(rmax, r);
  if (rmax.sign() > 0) {
    BlowupSets s = sets_from_frame(n, eta, f, ad, rmax, opt.budget);
    PointCloud xc = cell_corners(s.x), yc = cell_corners(s.y);
    for (const auto& r : opt.radii) {
      AwEntry e;
      e.radius = r;
      e.resolution = Rational(2, ipow(n, ad)) + Rational(3, 2) * f.x_n_error;
      auto xin = xc.within_ball(r), yin = yc.within_ball(r);
      auto xout = xc.within_ball(r + Rational(1)), yout = yc.within_ball(r + Rational(1));
      if (!xin || !yin || !xout || !yout) throw invariant_error("blow-up: empty ball");
      e.x_over_y = excess(*xin, *yout);
      e.y_over_x = excess(*yin, *xout);
      row.aw.push_back(e);
    }
    // Integer translates m = n^N (psi_u(0) - psi_{v_N}(0)) with [m, m+1]^2 inside the closed ball.
    int64_t b = floor_div(rmax).num() + 1;
    Rational r2 = rmax * rmax;
    descend(
        n, f.collar_root, big_n, [](const Word&) { return 2; }, box_filter(n, big_n, f.v, b),
        [&](const Word&, const Cell& c) {
          Cell m{c.i - f.v.i, c.j - f.v.j};
          if (m == Cell{0, 0}) return;
          int64_t fx = std::max(std::abs(m.i), std::abs(m.i + 1)), fy = std::max(std::abs(m.j), std::abs(m.j + 1));
          if (Rational(fx * fx + fy * fy) <= r2) row.offsets.push_back(m);
        },
        opt.budget);
    std::sort(row.offsets.begin(), row.offsets.end());
  }
  return row;
}

std::vector<BlowupRow> blowup_pipeline(const PlantSpec& spec, uint64_t seed, const BlowupOptions& opt) {
  Alphabet a(spec.n);
  ChoiceFunction eta = plant_R1R2(a, seed, spec);
  std::vector<BlowupRow> rows;
  for (const auto& occ : spec.occurrences) rows.push_back(blowup_run(spec.n, eta, spec.word, occ, opt));
  return rows;
}

// ---------------------------------------------------------------- limit models

TangentModel limit_model(int n, int k, const Rational& window, const std::vector<Cell>& offsets,
                         uint64_t budget) {
  Alphabet a(n);
  if (k < 0) throw precondition_error("limit_model: negative k");
  TangentModel m;
  m.n = n;
  m.k = k;
  m.window = window;
  std::set<Cell> seen{Cell{0, 0}};
  m.components.push_back({Cell{0, 0}, ComponentKind::planted});
  for (const auto& o : offsets) {
    if (!seen.insert(o).second) throw invariant_error("limit_model: overlapping component interiors");
    m.components.push_back({o, ComponentKind::base});
  }
  const int d = k + 1;
  require_budget(n, d, budget / std::max<uint64_t>(1, m.components.size()), "limit_model");
  CellSet planted = build_Knk(n, k, 1, budget);
  CellSet base = build_Knk(n, 0, d, budget);
  const int64_t nd = ipow(n, d);
  std::vector<Cell> cells(planted.cells());
  for (const auto& o : offsets)
    for (const auto& c : base.cells()) cells.push_back({c.i + o.i * nd, c.j + o.j * nd});
  m.cells = CellSet(n, d, std::move(cells));
  m.cut_points = local_cut_point_candidates(m.cells);
  m.expected_cut_points = cut_point_formula(n, k);
  m.cut_points_inside = std::all_of(m.cut_points.begin(), m.cut_points.end(), [](const Point2& p) {
    return p[0] > Rational(0) && p[0] < Rational(1) && p[1] > Rational(0) && p[1] < Rational(1);
  });
  return m;
}

// ---------------------------------------------------------------- stopping words and covers

StoppingFamily stopping_words_sq(const std::vector<Rational>& lipschitz, const Rational& delta_squared,
                                 uint64_t budget) {
  if (lipschitz.empty()) throw precondition_error("stopping_words: empty system");
  for (const auto& l : lipschitz)
    if (l.sign() <= 0 || l >= Rational(1)) throw precondition_error("stopping_words: norms must lie in (0,1)");
  if (delta_squared.sign() <= 0) throw precondition_error("stopping_words: delta must be positive");
  StoppingFamily f;
  f.lipschitz = lipschitz;
  f.delta_squared = delta_squared;
  f.min_scale = *std::min_element(lipschitz.begin(), lipschitz.end());
  Word w;
  auto visit = [&](auto&& self, const Rational& l) -> void {
    if (l * l < delta_squared) {
      if (f.words.size() >= budget) throw budget_error("stopping_words: family exceeds budget");
      f.words.push_back(w);
      return;
    }
    for (size_t i = 0; i < lipschitz.size(); ++i) {
      w.push_back(static_cast<int>(i) + 1);
      self(self, l * lipschitz[i]);
      w.pop_back();
    }
  };
  visit(visit, Rational(1));
  return f;
}

StoppingFamily stopping_words(const std::vector<Rational>& lipschitz, const Rational& delta, uint64_t budget) {
  if (delta.sign() <= 0) throw precondition_error("stopping_words: delta must be positive");
  return stopping_words_sq(lipschitz, delta * delta, budget);
}

double moran_sum(const StoppingFamily& f, double s) {
  double total = 0;
  for (const auto& w : f.words) {
    double l = 1;
    for (int i : w) l *= f.lipschitz[static_cast<size_t>(i - 1)].to_double();
    total += std::pow(l, s);
  }
  return total;
}

namespace {

struct Box {
  Rational x0, y0, x1, y1;
};

Box image_box(const std::vector<Similarity>& ifs, const Word& w) {
  Similarity acc = Similarity::identity(2);
  for (int i : w) acc = compose(acc, ifs[static_cast<size_t>(i - 1)]);
  Point2 p = acc.apply(Point2{Rational(0), Rational(0)});
  Point2 q = acc.apply(Point2{Rational(1), Rational(1)});
  return {std::min(p[0], q[0]), std::min(p[1], q[1]), std::max(p[0], q[0]), std::max(p[1], q[1])};
}

Rational near_dist2(const Box& b, const Point2& x) {
  auto gap = [](const Rational& v, const Rational& lo, const Rational& hi) {
    if (v < lo) return lo - v;
    if (v > hi) return v - hi;
    return Rational(0);
  };
  Rational dx = gap(x[0], b.x0, b.x1), dy = gap(x[1], b.y0, b.y1);
  return dx * dx + dy * dy;
}

Rational far_dist2(const Box& b, const Point2& x) {
  Rational dx = std::max(abs(x[0] - b.x0), abs(x[0] - b.x1));
  Rational dy = std::max(abs(x[1] - b.y0), abs(x[1] - b.y1));
  return dx * dx + dy * dy;
}

}  // namespace

BallCover ball_cover(const std::vector<Similarity>& ifs, const Point2& x, const Rational& r, int check_depth,
                     double s, double c1) {
  if (r.sign() <= 0) throw precondition_error("ball_cover: radius must be positive");
  std::vector<Rational> lips;
  for (const auto& m : ifs) lips.push_back(m.scale);
  // diam(phi_w[0,1]^2) = sqrt(2) L_w < r.
  StoppingFamily fam = stopping_words_sq(lips, r * r / Rational(2));
  BallCover bc;
  bc.s = s;
  bc.c1 = c1;
  bc.check_depth = check_depth;
  const Rational r2 = r * r;
  std::set<Word> members;
  size_t longest = 0;
  for (const auto& w : fam.words) {
    if (near_dist2(image_box(ifs, w), x) <= r2) {
      bc.words.push_back(w);
      members.insert(w);
      longest = std::max(longest, w.size());
    }
  }
  if (static_cast<size_t>(check_depth) < longest) throw precondition_error("ball_cover: check depth below member length");
  bc.outer_ok = true;
  for (const auto& w : bc.words)
    if (far_dist2(image_box(ifs, w), x) > Rational(4) * r2) bc.outer_ok = false;
  // Independent pass over all depth-D words.
  bc.inner_ok = true;
  Word w;
  auto visit = [&](auto&& self) -> void {
    if (static_cast<int>(w.size()) == check_depth) {
      if (near_dist2(image_box(ifs, w), x) > r2) return;
      bool covered = false;
      for (size_t j = 0; j <= w.size() && !covered; ++j) covered = members.count(Word(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(j))) > 0;
      if (!covered) bc.inner_ok = false;
      return;
    }
    for (size_t i = 0; i < ifs.size(); ++i) {
      w.push_back(static_cast<int>(i) + 1);
      self(self);
      w.pop_back();
    }
  };
  visit(visit);
  bc.bound = std::pow(2.0 / fam.min_scale.to_double(), s) * c1;
  bc.card_ok = static_cast<double>(bc.words.size()) <= bc.bound;
  return bc;
}

// ---------------------------------------------------------------- sponges

Sponge Sponge::from_model(int n, int model) {
  ModelSystem sys(n, model);
  Sponge s;
  s.k = n;
  s.dim = 2;
  for (const auto& c : sys.corners()) s.digits.push_back({c.i, c.j});
  return s;
}

std::optional<FaceContact> sponge_face_intersection(const Sponge& s, const std::vector<int>& indices) {
  if (indices.empty()) throw precondition_error("sponge_face_intersection: no indices");
  for (int i : indices)
    if (i < 0 || static_cast<size_t>(i) >= s.digits.size())
      throw precondition_error("sponge_face_intersection: index out of range");
  FaceContact fc;
  fc.indices = indices;
  const auto& first = s.digits[static_cast<size_t>(indices.front())];
  for (int c = 0; c < s.dim; ++c) {
    // Cubes are [d, d+1] / k on each axis.
    int64_t lo = first[static_cast<size_t>(c)], hi = lo + 1;
    for (int i : indices) {
      int64_t d = s.digits[static_cast<size_t>(i)][static_cast<size_t>(c)];
      lo = std::max(lo, d);
      hi = std::min(hi, d + 1);
    }
    if (lo > hi) return std::nullopt;
    if (lo < hi) fc.face.push_back(-1);
    else fc.face.push_back(lo == first[static_cast<size_t>(c)] ? 0 : 1);
  }
  return fc;
}

// ---------------------------------------------------------------- line tangents

PointCloud quarter_circle_cloud(int64_t samples, int bits) {
  if (samples < 1 || bits < 1 || bits > 60) throw precondition_error("quarter_circle_cloud: bad parameters");
  const int64_t den = int64_t{1} << bits;
  std::vector<int64_t> coords;
  coords.reserve(static_cast<size_t>(2 * (samples + 1)));
  for (int64_t i = 0; i <= samples; ++i) {
    // ((1 - t^2), 2t) / (1 + t^2) with t = i / samples, rounded to the nearest multiple of 2^-bits.
    i128 t2 = static_cast<i128>(i) * i, s2 = static_cast<i128>(samples) * samples;
    i128 q = s2 + t2;
    auto round_div = [&](i128 num) { return static_cast<int64_t>((num * den * 2 + q) / (2 * q)); };
    coords.push_back(round_div(s2 - t2));
    coords.push_back(round_div(2 * static_cast<i128>(i) * samples));
  }
  return PointCloud(2, den, std::move(coords), Rational(1, den));
}

LineCheck line_blowup_check(const PointCloud& curve, const std::vector<Rational>& x, const Rational& r,
                            double tolerance) {
  auto blown = blow_up(curve, x, r, Rational(1));
  if (!blown || blown->size() < 2) throw precondition_error("line_blowup_check: blow-up has fewer than two points");
  LineCheck lc;
  lc.points = blown->size();
  lc.tolerance = tolerance;
  const double den = static_cast<double>(blown->den());
  double mx = 0, my = 0;
  for (size_t i = 0; i < blown->size(); ++i) {
    mx += blown->raw(i)[0] / den;
    my += blown->raw(i)[1] / den;
  }
  mx /= static_cast<double>(blown->size());
  my /= static_cast<double>(blown->size());
  double sxx = 0, sxy = 0, syy = 0;
  for (size_t i = 0; i < blown->size(); ++i) {
    double dx = blown->raw(i)[0] / den - mx, dy = blown->raw(i)[1] / den - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  double theta = 0.5 * std::atan2(2 * sxy, sxx - syy);  // principal axis of the scatter
  lc.direction = theta;
  double ux = std::cos(theta), uy = std::sin(theta);
  for (size_t i = 0; i < blown->size(); ++i) {
    double dx = blown->raw(i)[0] / den - mx, dy = blown->raw(i)[1] / den - my;
    lc.curve_to_line = std::max(lc.curve_to_line, std::abs(dx * uy - dy * ux));
  }
  // Line inside the unit ball, sampled finely on the cloud lattice.
  double c = mx * ux + my * uy;  // projection of the origin offset
  double px = mx - c * ux, py = my - c * uy;  // foot of the perpendicular from the origin
  double h2 = 1.0 - (px * px + py * py);
  if (h2 > 0) {
    double half = std::sqrt(h2);
    const int steps = 4096;
    std::vector<int64_t> coords;
    for (int i = 0; i <= steps; ++i) {
      double t = -half + 2 * half * i / steps;
      coords.push_back(static_cast<int64_t>(std::llround((px + t * ux) * den)));
      coords.push_back(static_cast<int64_t>(std::llround((py + t * uy) * den)));
    }
    PointCloud line(2, blown->den(), std::move(coords), Rational(1, blown->den()));
    lc.line_to_curve = excess(line, *blown).value();
    lc.line_to_curve = std::max(lc.line_to_curve, 0.0);
    lc.resolution = 2 * half / steps + 2.0 / den;
  }
  lc.resolution += blown->resolution().to_double();
  lc.ok = lc.curve_to_line <= tolerance && lc.line_to_curve <= tolerance;
  return lc;
}

}  // namespace ftl
