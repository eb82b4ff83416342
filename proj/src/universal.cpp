#include "ftl/universal.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include <boost/pending/disjoint_sets.hpp>
#include <sodium.h>

#include "ftl/errors.hpp"

namespace ftl {

namespace {

Rational dot(const RPoint& a, const RPoint& b) {
  Rational s(0);
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

RPoint sub(const RPoint& a, const RPoint& b) {
  RPoint r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

RPoint axpy(const RPoint& a, const Rational& t, const RPoint& d) {
  RPoint r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + t * d[i];
  return r;
}

Rational seg_dist2(const RPoint& v, const Segment& s) {
  RPoint d = sub(s.b, s.a);
  Rational dd = dot(d, d);
  RPoint va = sub(v, s.a);
  if (dd == Rational(0)) return dot(va, va);
  Rational t = std::clamp(dot(va, d) / dd, Rational(0), Rational(1));
  RPoint p = sub(axpy(s.a, t, d), v);
  return dot(p, p);
}

// Part of the segment inside [lo, hi]^dim.
std::optional<Segment> clip(const Segment& s, const Rational& lo, const Rational& hi) {
  Rational t0(0), t1(1);
  RPoint d = sub(s.b, s.a);
  for (size_t c = 0; c < d.size(); ++c) {
    if (d[c] == Rational(0)) {
      if (s.a[c] < lo || s.a[c] > hi) return std::nullopt;
      continue;
    }
    Rational ta = (lo - s.a[c]) / d[c];
    Rational tb = (hi - s.a[c]) / d[c];
    if (tb < ta) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
  }
  if (t1 < t0) return std::nullopt;
  return Segment{axpy(s.a, t0, d), axpy(s.a, t1, d)};
}

bool in_box(const RPoint& p, const Rational& lo, const Rational& hi) {
  return std::all_of(p.begin(), p.end(), [&](const Rational& x) { return lo <= x && x <= hi; });
}

RPoint unit(int dim, int axis, const Rational& value) {
  RPoint p(static_cast<size_t>(dim), Rational(0));
  p[static_cast<size_t>(axis)] = value;
  return p;
}

// d^2 <= (sqrt(b2) + rho)^2, exactly: d^2 - b2 - rho^2 <= 2 rho sqrt(b2).
bool within_sum(const Rational& d2, const Rational& b2, const Rational& rho) {
  Rational lhs = d2 - b2 - rho * rho;
  if (lhs <= Rational(0)) return true;
  return lhs * lhs <= Rational(4) * rho * rho * b2;
}

// Lattice points of [-half, half]^dim with some coordinate equal to +-half.
template <class F>
void for_each_boundary_point(int dim, int64_t half, F&& fn) {
  std::vector<int64_t> m(static_cast<size_t>(dim), -half);
  while (true) {
    bool rest_on = false;
    for (int c = 1; c < dim; ++c) rest_on = rest_on || std::abs(m[static_cast<size_t>(c)]) == half;
    if (rest_on) {
      for (m[0] = -half; m[0] <= half; ++m[0]) fn(m);
    } else {
      m[0] = -half;
      fn(m);
      m[0] = half;
      fn(m);
    }
    m[0] = -half;
    int c = 1;
    while (c < dim && m[static_cast<size_t>(c)] == half) m[static_cast<size_t>(c++)] = -half;
    if (c == dim) return;
    ++m[static_cast<size_t>(c)];
  }
}

BigRational pow2(int e) {
  BigInt one = 1;
  return e >= 0 ? BigRational(one << e) : BigRational(BigInt(1), one << (-e));
}

}  // namespace

// ---------------------------------------------------------------- TargetSet

TargetSet::TargetSet(std::string name, int dim, std::vector<Segment> segments, std::vector<RPoint> points,
                     Rational resolution)
    : name_(std::move(name)),
      dim_(dim),
      segments_(std::move(segments)),
      points_(std::move(points)),
      resolution_(resolution) {
  if (dim_ < 2) throw precondition_error("target dimension must be at least 2");
  if (resolution_ < Rational(0)) throw precondition_error("target resolution must be nonnegative");
  for (const auto& s : segments_)
    if (static_cast<int>(s.a.size()) != dim_ || static_cast<int>(s.b.size()) != dim_)
      throw precondition_error("segment dimension mismatch");
  for (const auto& p : points_)
    if (static_cast<int>(p.size()) != dim_) throw precondition_error("point dimension mismatch");
  if (segments_.empty() && points_.empty()) throw precondition_error("target set is empty");
}

std::vector<std::string> TargetSet::builtin_names() {
  return {"line", "cross", "quarter", "parallel", "diagonal", "bounded"};
}

TargetSet TargetSet::builtin(const std::string& name, int dim, int64_t extent) {
  if (dim < 2) throw precondition_error("target dimension must be at least 2");
  if (extent < 1) throw precondition_error("extent must be positive");
  Rational e(extent);
  auto axis_line = [&](int axis) { return Segment{unit(dim, axis, -e), unit(dim, axis, e)}; };
  std::vector<Segment> segs;
  std::vector<RPoint> pts;
  if (name == "line") {
    segs.push_back(axis_line(0));
  } else if (name == "cross") {
    for (int a = 0; a < dim; ++a) segs.push_back(axis_line(a));
  } else if (name == "quarter") {
    RPoint o(static_cast<size_t>(dim), Rational(0));
    segs.push_back({o, unit(dim, 0, e)});
    segs.push_back({o, unit(dim, 1, e)});
  } else if (name == "parallel") {
    segs.push_back(axis_line(0));
    Segment s = axis_line(0);
    s.a[1] = Rational(1);
    s.b[1] = Rational(1);
    segs.push_back(s);
  } else if (name == "diagonal") {
    RPoint a(static_cast<size_t>(dim), Rational(0)), b(static_cast<size_t>(dim), Rational(0));
    a[0] = a[1] = -e;
    b[0] = b[1] = e;
    segs.push_back({a, b});
  } else if (name == "bounded") {
    pts.push_back(RPoint(static_cast<size_t>(dim), Rational(0)));
    Segment s = axis_line(1);
    s.a[0] = Rational(10);
    s.b[0] = Rational(10);
    segs.push_back(s);
  } else {
    throw precondition_error("unknown target '" + name + "'");
  }
  return TargetSet(name, dim, std::move(segs), std::move(pts));
}

TargetSet TargetSet::from_cloud(const std::string& name, const PointCloud& cloud) {
  std::vector<RPoint> pts;
  pts.reserve(cloud.size());
  for (size_t i = 0; i < cloud.size(); ++i) pts.push_back(cloud.point(i));
  return TargetSet(name, cloud.dim(), {}, std::move(pts), cloud.resolution());
}

bool TargetSet::contains_origin() const {
  RPoint o(static_cast<size_t>(dim_), Rational(0));
  for (const auto& p : points_)
    if (p == o) return true;
  return std::any_of(segments_.begin(), segments_.end(),
                     [&](const Segment& s) { return seg_dist2(o, s) == Rational(0); });
}

std::optional<Rational> TargetSet::dist2_clipped(const RPoint& v, const Rational& w) const {
  std::optional<Rational> best;
  auto take = [&](const Rational& d) {
    if (!best || d < *best) best = d;
  };
  for (const auto& s : segments_)
    if (auto c = clip(s, -w, w)) take(seg_dist2(v, *c));
  for (const auto& p : points_)
    if (in_box(p, -w, w)) {
      RPoint d = sub(v, p);
      take(dot(d, d));
    }
  return best;
}

PointCloud TargetSet::sample(const Rational& h, const Rational& radius) const {
  if (h <= Rational(0) || radius <= Rational(0)) throw precondition_error("sample: h and radius must be positive");
  Rational r2 = radius * radius;
  std::vector<RPoint> out;
  for (const auto& s : segments_) {
    auto c = clip(s, -radius, radius);
    if (!c) continue;
    RPoint d = sub(c->b, c->a);
    Rational linf(0);
    for (const auto& x : d) linf = std::max(linf, abs(x));
    // Step d / 2^p has length at most sqrt(dim) linf / 2^p <= h once 2^p >= 2 linf / h (dim <= 4).
    int p = 0;
    while (Rational(ipow(2, p)) * h < Rational(2) * linf) ++p;
    int64_t steps = ipow(2, p);
    for (int64_t i = 0; i <= steps; ++i) {
      RPoint q = axpy(c->a, Rational(i, steps), d);
      if (dot(q, q) <= r2) out.push_back(std::move(q));
    }
  }
  for (const auto& q : points_)
    if (dot(q, q) <= r2) out.push_back(q);
  if (out.empty()) throw domain_error("target has no points in the ball");
  PointCloud pc = PointCloud::from_points(out, h / Rational(2) + resolution_);
  pc.canonicalize();
  return pc;
}

bool TargetSet::oracle_consistent(uint64_t seed, int pairs, const Rational& radius) const {
  std::mt19937_64 rng(seed);
  const int64_t grid = 1024;
  std::uniform_int_distribution<int64_t> coord(-grid, grid);
  Rational w(1'000'000);
  auto draw = [&] {
    RPoint p(static_cast<size_t>(dim_));
    for (auto& x : p) x = radius * Rational(coord(rng), grid);
    return p;
  };
  for (int i = 0; i < pairs; ++i) {
    RPoint x = draw(), y = draw();
    auto dx = dist2_clipped(x, w), dy = dist2_clipped(y, w);
    if (!dx || !dy) return false;
    RPoint xy = sub(x, y);
    long double a = std::sqrt(dx->to_long_double()), b = std::sqrt(dy->to_long_double());
    long double c = std::sqrt(dot(xy, xy).to_long_double());
    if (std::fabs(a - b) > c + 1e-12L) return false;
  }
  return true;
}

// ---------------------------------------------------------------- GridGraph

GridGraph::GridGraph(int dim, int k, std::vector<std::vector<int64_t>> vertices) : dim_(dim), k_(k) {
  if (dim_ < 2) throw precondition_error("grid graph dimension must be at least 2");
  if (k_ < 0 || k_ > 24) throw precondition_error("grid graph level out of range");
  base_ = (int64_t{1} << (k_ + 1)) + 1;
  long double cap = std::pow(static_cast<long double>(base_), dim_);
  if (cap >= 1.8e19L) throw precondition_error("grid graph lattice too large to index");
  keys_.reserve(vertices.size());
  for (const auto& m : vertices) keys_.push_back(key(m));
  std::sort(keys_.begin(), keys_.end());
  keys_.erase(std::unique(keys_.begin(), keys_.end()), keys_.end());
}

uint64_t GridGraph::key(const std::vector<int64_t>& m) const {
  if (static_cast<int>(m.size()) != dim_) throw precondition_error("vertex dimension mismatch");
  int64_t half = int64_t{1} << k_;
  uint64_t key = 0;
  for (int c = dim_ - 1; c >= 0; --c) {
    int64_t x = m[static_cast<size_t>(c)];
    if (x < -half || x > half) throw precondition_error("vertex outside [-1,1]^N");
    key = key * static_cast<uint64_t>(base_) + static_cast<uint64_t>(x + half);
  }
  return key;
}

std::vector<int64_t> GridGraph::vertex(size_t i) const {
  std::vector<int64_t> m(static_cast<size_t>(dim_));
  uint64_t key = keys_.at(i);
  int64_t half = int64_t{1} << k_;
  for (int c = 0; c < dim_; ++c) {
    m[static_cast<size_t>(c)] = static_cast<int64_t>(key % static_cast<uint64_t>(base_)) - half;
    key /= static_cast<uint64_t>(base_);
  }
  return m;
}

bool GridGraph::contains(const std::vector<int64_t>& m) const {
  int64_t half = int64_t{1} << k_;
  for (auto x : m)
    if (x < -half || x > half) return false;
  return std::binary_search(keys_.begin(), keys_.end(), key(m));
}

std::vector<std::pair<size_t, int>> GridGraph::edges() const {
  std::vector<std::pair<size_t, int>> out;
  int64_t half = int64_t{1} << k_;
  for (size_t i = 0; i < keys_.size(); ++i) {
    std::vector<int64_t> m = vertex(i);
    uint64_t stride = 1;
    for (int c = 0; c < dim_; ++c) {
      if (m[static_cast<size_t>(c)] < half && std::binary_search(keys_.begin(), keys_.end(), keys_[i] + stride))
        out.emplace_back(i, c);
      stride *= static_cast<uint64_t>(base_);
    }
  }
  return out;
}

Rational GridGraph::length() const {
  return Rational(static_cast<int64_t>(edge_count()), int64_t{1} << k_);
}

bool GridGraph::has_origin() const { return contains(std::vector<int64_t>(static_cast<size_t>(dim_), 0)); }

bool GridGraph::has_boundary() const {
  bool ok = true;
  for_each_boundary_point(dim_, int64_t{1} << k_, [&](const std::vector<int64_t>& m) { ok = ok && contains(m); });
  return ok;
}

bool GridGraph::connected() const {
  if (keys_.empty()) return false;
  boost::disjoint_sets_with_storage<> ds(keys_.size());
  for (size_t i = 0; i < keys_.size(); ++i) ds.make_set(i);
  uint64_t strides[8] = {1};
  for (int c = 1; c < dim_ && c < 8; ++c) strides[c] = strides[c - 1] * static_cast<uint64_t>(base_);
  for (const auto& [i, c] : edges()) {
    auto it = std::lower_bound(keys_.begin(), keys_.end(), keys_[i] + strides[c]);
    ds.union_set(i, static_cast<size_t>(it - keys_.begin()));
  }
  size_t root = ds.find_set(0);
  for (size_t i = 1; i < keys_.size(); ++i)
    if (ds.find_set(i) != root) return false;
  return true;
}

bool GridGraph::in_family() const { return has_origin() && has_boundary() && connected(); }

Rational GridGraph::length_bound() const {
  return Rational(ipow((int64_t{1} << (k_ + 1)) + 1, dim_));
}

uint64_t GridGraph::content_hash() const {
  if (sodium_init() < 0) throw invariant_error("libsodium failed to initialize");
  std::vector<uint64_t> msg;
  msg.reserve(keys_.size() + 2);
  msg.push_back(static_cast<uint64_t>(dim_));
  msg.push_back(static_cast<uint64_t>(k_));
  msg.insert(msg.end(), keys_.begin(), keys_.end());
  unsigned char out[8];
  crypto_generichash(out, sizeof out, reinterpret_cast<const unsigned char*>(msg.data()),
                     msg.size() * sizeof(uint64_t), nullptr, 0);
  uint64_t h = 0;
  for (int i = 7; i >= 0; --i) h = (h << 8) | out[i];
  return h;
}

// ---------------------------------------------------------------- approximation

bool Approximation::all_reach_boundary() const {
  return std::all_of(component_reaches_boundary.begin(), component_reaches_boundary.end(),
                     [](bool b) { return b; });
}

Approximation approximate(const TargetSet& t, int j) {
  if (j < 1) throw precondition_error("approximate: j must be at least 1");
  const int dim = t.dim();
  if (2 * j + 1 > 30 || (dim > 2 && j > 4)) throw precondition_error("approximate: level too large");
  if (t.resolution() > Rational(1, int64_t{1} << j))
    throw precondition_error("approximate: target resolution is coarser than 2^-j");
  const int64_t s = int64_t{1} << j;
  const int64_t M = s * s - 1;
  // Work in units of 2^-j: Q_j is the integer box [-M, M]^dim and the threshold is 4 sqrt(dim).
  const Rational b2(16 * dim);
  const Rational rho = t.resolution() * Rational(s);
  const int64_t reach = static_cast<int64_t>(std::floor(4.0 * std::sqrt(double(dim)))) + 1 +
                        static_cast<int64_t>(std::ceil(rho.to_double()));
  const Rational lo(-M), hi(M);

  std::vector<std::vector<int64_t>> found;
  auto scan = [&](const Segment& seg) {
    std::vector<int64_t> from(static_cast<size_t>(dim)), to(static_cast<size_t>(dim));
    for (int c = 0; c < dim; ++c) {
      Rational a = std::min(seg.a[c], seg.b[c]), b = std::max(seg.a[c], seg.b[c]);
      from[c] = std::max(-M, floor_div(a).num() - reach);
      to[c] = std::min(M, floor_div(b).num() + 1 + reach);
      if (from[c] > to[c]) return;
    }
    std::vector<int64_t> m = from;
    RPoint v(static_cast<size_t>(dim));
    while (true) {
      for (int c = 0; c < dim; ++c) v[c] = Rational(m[c]);
      if (within_sum(seg_dist2(v, seg), b2, rho)) found.push_back(m);
      int c = 0;
      while (c < dim && m[c] == to[c]) m[c] = from[c], ++c;
      if (c == dim) break;
      ++m[c];
    }
  };
  Rational sc(s);
  for (const auto& seg : t.segments()) {
    Segment scaled{axpy(RPoint(dim, Rational(0)), sc, seg.a), axpy(RPoint(dim, Rational(0)), sc, seg.b)};
    if (auto c = clip(scaled, lo, hi)) scan(*c);
  }
  for (const auto& p : t.points()) {
    RPoint q = axpy(RPoint(dim, Rational(0)), sc, p);
    if (in_box(q, lo, hi)) scan(Segment{q, q});
  }
  std::sort(found.begin(), found.end());
  found.erase(std::unique(found.begin(), found.end()), found.end());

  Approximation out;
  out.j = j;
  out.dim = dim;
  out.w = std::move(found);
  if (!std::binary_search(out.w.begin(), out.w.end(), std::vector<int64_t>(static_cast<size_t>(dim), 0)))
    throw precondition_error("approximate: origin is not in W_j; the target must contain 0");

  const size_t n = out.w.size();
  boost::disjoint_sets_with_storage<> ds(n);
  for (size_t i = 0; i < n; ++i) ds.make_set(i);
  for (size_t i = 0; i < n; ++i)
    for (int c = 0; c < dim; ++c) {
      std::vector<int64_t> nb = out.w[i];
      ++nb[c];
      auto it = std::lower_bound(out.w.begin(), out.w.end(), nb);
      if (it != out.w.end() && *it == nb) ds.union_set(i, static_cast<size_t>(it - out.w.begin()));
    }
  out.label.assign(n, -1);
  std::vector<int> root_label(n, -1);
  for (size_t i = 0; i < n; ++i) {
    size_t r = ds.find_set(i);
    if (root_label[r] < 0) {
      root_label[r] = out.components++;
      out.component_reaches_boundary.push_back(false);
    }
    out.label[i] = root_label[r];
    if (std::any_of(out.w[i].begin(), out.w[i].end(), [&](int64_t x) { return x == M || x == -M; }))
      out.component_reaches_boundary[static_cast<size_t>(out.label[i])] = true;
  }
  return out;
}

GridGraph complete_to_graph(const Approximation& x) {
  if (!x.all_reach_boundary())
    throw precondition_error("complete_to_graph: a component of X_j misses the window boundary");
  const int dim = x.dim;
  const int64_t half = int64_t{1} << (2 * x.j);
  std::vector<std::vector<int64_t>> v = x.w;
  for_each_boundary_point(dim, half, [&](const std::vector<int64_t>& m) { v.push_back(m); });
  GridGraph g(dim, 2 * x.j, std::move(v));
  if (!g.has_origin() || !g.has_boundary()) throw invariant_error("completed graph misses origin or boundary");
  if (!g.connected()) throw invariant_error("completed graph is disconnected");
  if (g.length() > g.length_bound()) throw invariant_error("completed graph exceeds the length bound");
  return g;
}

// ---------------------------------------------------------------- cascade

BigRational CascadeSpec::total_length() const {
  BigRational s = 0;
  for (size_t n = 1; n < r.size(); ++n) s += r[n] * h1[n - 1];
  return s;
}

CascadeSpec build_cascade(const std::vector<std::pair<BigRational, int>>& h1_and_k) {
  if (h1_and_k.empty()) throw precondition_error("cascade needs at least one graph");
  CascadeSpec c;
  for (const auto& [h, k] : h1_and_k) {
    if (h <= 0) throw precondition_error("graph length must be positive");
    if (k < 1) throw precondition_error("graph level must be positive");
    c.h1.push_back(h);
    c.k.push_back(k);
  }
  const int count = static_cast<int>(c.k.size());
  c.r.push_back(BigRational(1));
  for (int n = 1; n <= count; ++n) {
    int k_next = n < count ? c.k[static_cast<size_t>(n)] : 0;
    int k_prev = n >= 2 ? c.k[static_cast<size_t>(n - 2)] : 0;
    BigRational a = BigRational(1) / (pow2(n + 1) * c.h1[static_cast<size_t>(n - 1)]);
    BigRational b = c.r.back() / pow2(n + k_next + 1);
    BigRational d = c.r.back() / pow2(n + k_prev + 1);
    c.r.push_back(std::min({a, b, d}));
  }
  return c;
}

CascadeSpec build_cascade(const std::vector<GridGraph>& graphs) {
  std::vector<std::pair<BigRational, int>> hk;
  for (const auto& g : graphs) {
    if (!g.in_family()) throw precondition_error("cascade graph is not in its grid family");
    hk.emplace_back(g.length().to_big(), g.k());
  }
  return build_cascade(hk);
}

std::vector<CascadeCheck> check_cascade(const CascadeSpec& c) {
  std::vector<CascadeCheck> out;
  const size_t count = c.k.size();
  out.push_back({"r0", c.r.size() == count + 1 && c.r[0] == 1, "r_0 = 1"});
  bool dec = true, adm = true;
  for (size_t n = 1; n <= count; ++n) {
    dec = dec && c.r[n] > 0 && c.r[n] < c.r[n - 1];
    int k_next = n < count ? c.k[n] : 0;
    adm = adm && c.r[n] <= BigRational(1) / (pow2(static_cast<int>(n) + 1) * c.h1[n - 1]) &&
          c.r[n] <= c.r[n - 1] / pow2(static_cast<int>(n) + k_next + 1);
  }
  out.push_back({"decreasing", dec, "r_n strictly decreasing and positive"});
  out.push_back({"admissible", adm, "r_n within both recursion bounds"});
  bool gap = true;
  for (size_t n = 1; n < count; ++n) gap = gap && c.r[n + 1] < c.r[n] / pow2(c.k[n - 1]);
  out.push_back({"gap", gap, "r_{n+1} < r_n 2^{-k_n}, so only edges at 0 meet the cut cube"});
  out.push_back({"length", c.total_length() <= 1, "sum r_n H1(G_n) <= 1"});
  return out;
}

// ---------------------------------------------------------------- H

namespace {

using BigPoint = std::vector<BigRational>;

BigPoint scaled_vertex(const std::vector<int64_t>& m, const BigRational& step) {
  BigPoint p;
  p.reserve(m.size());
  for (auto x : m) p.push_back(step * x);
  return p;
}

}  // namespace

AssembledH assemble_H(const CascadeSpec& c, const std::vector<GridGraph>& graphs, int depth) {
  const int count = static_cast<int>(graphs.size());
  if (depth < 1 || depth > count || c.k.size() != graphs.size())
    throw precondition_error("assemble_H: depth must be within the cascade");
  const int dim = graphs[0].dim();
  AssembledH out;
  std::map<BigPoint, size_t> ids;
  auto id = [&](const BigPoint& p) {
    auto [it, fresh] = ids.emplace(p, ids.size());
    return it->second;
  };
  std::vector<std::pair<size_t, size_t>> links;
  const BigPoint origin(static_cast<size_t>(dim), BigRational(0));
  id(origin);
  for (int n = 1; n <= depth; ++n) {
    const GridGraph& g = graphs[static_cast<size_t>(n - 1)];
    if (g.dim() != dim) throw precondition_error("assemble_H: mixed dimensions");
    const BigRational step = c.r[static_cast<size_t>(n)] / pow2(g.k());
    // The last assembled level stays uncut so the partial union is connected through 0.
    const bool cut = n < depth;
    const BigRational inner = cut ? c.r[static_cast<size_t>(n + 1)] : BigRational(0);
    bool glue_found = false, glue_ok = true;
    for (const auto& [i, axis] : g.edges()) {
      std::vector<int64_t> m = g.vertex(i);
      std::vector<int64_t> m2 = m;
      ++m2[static_cast<size_t>(axis)];
      BigPoint a = scaled_vertex(m, step), b = scaled_vertex(m2, step);
      bool at_zero_a = std::all_of(m.begin(), m.end(), [](int64_t x) { return x == 0; });
      bool at_zero_b = std::all_of(m2.begin(), m2.end(), [](int64_t x) { return x == 0; });
      if (cut) {
        if (at_zero_a || at_zero_b) {
          BigPoint& z = at_zero_a ? a : b;
          z[static_cast<size_t>(axis)] = at_zero_a ? inner : BigRational(-inner);
          glue_found = true;
          // The cut point is r_{n+1} e_i, a boundary vertex of the next level.
          std::vector<int64_t> e(static_cast<size_t>(dim), 0);
          e[static_cast<size_t>(axis)] = at_zero_a ? (int64_t{1} << graphs[static_cast<size_t>(n)].k())
                                                   : -(int64_t{1} << graphs[static_cast<size_t>(n)].k());
          glue_ok = glue_ok && graphs[static_cast<size_t>(n)].contains(e);
        } else {
          // Lower bound for the sup norm along the edge.
          BigRational lb = 0;
          for (int d = 0; d < dim; ++d) {
            BigRational lo = std::min(a[d], b[d]), hi = std::max(a[d], b[d]);
            BigRational v = (lo <= 0 && hi >= 0) ? BigRational(0) : std::min(abs(lo), abs(hi));
            lb = std::max(lb, v);
          }
          glue_ok = glue_ok && lb >= inner;
        }
      }
      BigRational len = 0;
      for (int d = 0; d < dim; ++d) len += abs(b[d] - a[d]);
      out.length += len;
      links.emplace_back(id(a), id(b));
      out.segments.push_back({std::move(a), std::move(b)});
    }
    if (cut) {
      if (!glue_found) throw invariant_error("assemble_H: gluing between levels is empty");
      out.glued.push_back(glue_ok);
    }
  }
  boost::disjoint_sets_with_storage<> ds(ids.size());
  for (size_t i = 0; i < ids.size(); ++i) ds.make_set(i);
  for (const auto& [a, b] : links) ds.union_set(a, b);
  size_t root = ds.find_set(0);
  out.connected = true;
  for (size_t i = 1; i < ids.size(); ++i) out.connected = out.connected && ds.find_set(i) == root;
  return out;
}

// ---------------------------------------------------------------- recovery

RecoveryReport verify_recovery(const TargetSet& t, const CascadeSpec& c, const std::vector<GridGraph>& graphs,
                               size_t position, int j, const Rational& radius, int samples_per_edge) {
  if (position < 1 || position > graphs.size() || c.k.size() != graphs.size())
    throw precondition_error("verify_recovery: position outside the cascade");
  const GridGraph& g = graphs[position - 1];
  if (g.k() != 2 * j) throw precondition_error("verify_recovery: graph at the position is not at level 2j");
  if (g.dim() != t.dim()) throw precondition_error("verify_recovery: dimension mismatch");
  if (samples_per_edge < 1 || samples_per_edge > 64) throw precondition_error("samples per edge out of range");
  if (radius <= Rational(0)) throw precondition_error("radius must be positive");
  const int dim = t.dim();
  RecoveryReport rep;
  rep.j = j;
  rep.position = position;
  rep.radius = radius;
  rep.bound = std::ldexp(std::sqrt(double(dim)) + 0.25, 2 - j);
  rep.applicable = Rational(int64_t{1} << (j - 1)) >= radius;

  // rho_j r_{n_j+1}; zero past the end of the cascade.
  BigRational small = 0;
  if (position < graphs.size()) small = pow2(j) * c.r[position + 1] / c.r[position];
  rep.scale_ok = small <= pow2(1 - static_cast<int>(position) - j);
  const double h = std::ldexp(1.0, -j) / samples_per_edge;
  rep.slack = h + 2.0 * big_to_double(small) * std::sqrt(double(dim)) + t.resolution().to_double();
  if (!rep.applicable) return rep;

  // 2^j Im(G) has vertices 2^-j m; sample in units of 2^-j / s.
  const int64_t s = samples_per_edge;
  const int64_t den = checked_mul(int64_t{1} << j, s);
  const Rational outer = radius + Rational(static_cast<int64_t>(std::ceil(rep.bound)) + 1);
  const i128 lim = static_cast<i128>(checked_mul(outer.num(), den)) * checked_mul(outer.num(), den);
  const i128 lim_den = static_cast<i128>(outer.den()) * outer.den();
  std::vector<int64_t> coords;
  auto push = [&](const std::vector<int64_t>& p) {
    i128 n2 = 0;
    for (auto x : p) n2 += static_cast<i128>(x) * x;
    if (n2 * lim_den <= lim) coords.insert(coords.end(), p.begin(), p.end());
  };
  for (size_t i = 0; i < g.vertex_count(); ++i) {
    std::vector<int64_t> p = g.vertex(i);
    for (auto& x : p) x *= s;
    push(p);
  }
  for (const auto& [i, axis] : g.edges()) {
    std::vector<int64_t> p = g.vertex(i);
    for (auto& x : p) x *= s;
    for (int64_t q = 1; q < s; ++q) {
      ++p[static_cast<size_t>(axis)];
      push(p);
    }
  }
  PointCloud hcloud(dim, den, std::move(coords), Rational(1, 2 * den));
  hcloud.canonicalize();
  PointCloud tcloud = t.sample(Rational(1, den), outer);

  auto h_in = hcloud.within_ball(radius);
  auto t_in = tcloud.within_ball(radius);
  if (!h_in || !t_in) throw domain_error("verify_recovery: empty ball");
  rep.h_over_t = excess(*h_in, tcloud).value();
  rep.t_over_h = excess(*t_in, hcloud).value();
  rep.ok = rep.scale_ok && rep.h_over_t <= rep.bound + rep.slack && rep.t_over_h <= rep.bound + rep.slack;
  return rep;
}

}  // namespace ftl
