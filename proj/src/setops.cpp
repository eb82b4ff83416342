#include "ftl/setops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/pending/disjoint_sets.hpp>

namespace ftl {

namespace {

constexpr int64_t kCoordLimit = int64_t{1} << 61;

int64_t floor_div64(int64_t a, int64_t b) {
  int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

uint64_t pack(int64_t x, int64_t y) {
  return (static_cast<uint64_t>(static_cast<uint32_t>(x + (int64_t{1} << 31))) << 32) |
         static_cast<uint32_t>(y + (int64_t{1} << 31));
}

// |c| <= radius with c = coords / den, exact.
bool norm_le(const int64_t* c, int dim, int64_t den, const Rational& radius) {
  BigInt sum = 0;
  for (int k = 0; k < dim; ++k) sum += BigInt(c[k]) * c[k];
  BigInt lhs = sum * BigInt(radius.den()) * radius.den();
  BigInt rhs = BigInt(radius.num()) * radius.num() * den * den;
  return lhs <= rhs;
}

// Uniform bucket grid over a planar integer point set with exact ring search.
class Grid2 {
 public:
  explicit Grid2(const std::vector<int64_t>& pts) {
    size_t n = pts.size() / 2;
    minx_ = maxx_ = pts[0];
    miny_ = maxy_ = pts[1];
    for (size_t i = 0; i < n; ++i) {
      minx_ = std::min(minx_, pts[2 * i]);
      maxx_ = std::max(maxx_, pts[2 * i]);
      miny_ = std::min(miny_, pts[2 * i + 1]);
      maxy_ = std::max(maxy_, pts[2 * i + 1]);
    }
    long double w = static_cast<long double>(maxx_ - minx_) + 1;
    long double h = static_cast<long double>(maxy_ - miny_) + 1;
    long double g = std::floor(std::sqrt(w * h / static_cast<long double>(n)));
    g_ = std::max<int64_t>(1, static_cast<int64_t>(g));
    const long double cap = 4.0L * static_cast<long double>(n) + 16;
    while ((std::floor((w - 1) / g_) + 1) * (std::floor((h - 1) / g_) + 1) > cap) g_ *= 2;
    nx_ = (maxx_ - minx_) / g_ + 1;
    ny_ = (maxy_ - miny_) / g_ + 1;
    std::vector<uint32_t> count(static_cast<size_t>(nx_ * ny_) + 1, 0);
    std::vector<int64_t> bucket(n);
    for (size_t i = 0; i < n; ++i) {
      int64_t bx = (pts[2 * i] - minx_) / g_;
      int64_t by = (pts[2 * i + 1] - miny_) / g_;
      bucket[i] = by * nx_ + bx;
      ++count[static_cast<size_t>(bucket[i]) + 1];
    }
    for (size_t b = 1; b < count.size(); ++b) count[b] += count[b - 1];
    start_ = count;
    pts_.resize(2 * n);
    for (size_t i = 0; i < n; ++i) {
      uint32_t slot = count[static_cast<size_t>(bucket[i])]++;
      pts_[2 * slot] = pts[2 * i];
      pts_[2 * slot + 1] = pts[2 * i + 1];
    }
  }

  i128 nearest2(int64_t x, int64_t y) const {
    int64_t bx = floor_div64(x - minx_, g_);
    int64_t by = floor_div64(y - miny_, g_);
    auto outside = [](int64_t b, int64_t nb) -> int64_t {
      if (b < 0) return -b;
      if (b >= nb) return b - nb + 1;
      return 0;
    };
    int64_t r0 = std::max(outside(bx, nx_), outside(by, ny_));
    int64_t rmax = std::max({std::abs(bx), std::abs(bx - (nx_ - 1)), std::abs(by),
                             std::abs(by - (ny_ - 1))});
    i128 best = std::numeric_limits<i128>::max();
    auto scan = [&](int64_t cx, int64_t cy) {
      if (cx < 0 || cy < 0 || cx >= nx_ || cy >= ny_) return;
      size_t b = static_cast<size_t>(cy * nx_ + cx);
      for (uint32_t s = start_[b]; s < start_[b + 1]; ++s) {
        i128 dx = static_cast<i128>(pts_[2 * s]) - x;
        i128 dy = static_cast<i128>(pts_[2 * s + 1]) - y;
        i128 d = dx * dx + dy * dy;
        if (d < best) best = d;
      }
    };
    for (int64_t r = r0; r <= rmax; ++r) {
      int64_t ylo = std::max<int64_t>(by - r, 0);
      int64_t yhi = std::min<int64_t>(by + r, ny_ - 1);
      for (int64_t cy = ylo; cy <= yhi; ++cy) {
        if (cy == by - r || cy == by + r) {
          int64_t xlo = std::max<int64_t>(bx - r, 0);
          int64_t xhi = std::min<int64_t>(bx + r, nx_ - 1);
          for (int64_t cx = xlo; cx <= xhi; ++cx) scan(cx, cy);
        } else {
          scan(bx - r, cy);
          if (r > 0) scan(bx + r, cy);
        }
      }
      i128 reach = static_cast<i128>(r) * g_;
      if (best != std::numeric_limits<i128>::max() && best <= reach * reach) break;
    }
    return best;
  }

 private:
  int64_t minx_, maxx_, miny_, maxy_;
  int64_t g_ = 1, nx_ = 1, ny_ = 1;
  std::vector<uint32_t> start_;
  std::vector<int64_t> pts_;
};

// Squared excess numerator over the common denominator den^2.
i128 excess_numerator(const std::vector<int64_t>& a, const std::vector<int64_t>& b, int dim) {
  size_t na = a.size() / static_cast<size_t>(dim);
  size_t nb = b.size() / static_cast<size_t>(dim);
  i128 worst = 0;
  if (dim == 2) {
    Grid2 grid(b);
    for (size_t i = 0; i < na; ++i) worst = std::max(worst, grid.nearest2(a[2 * i], a[2 * i + 1]));
    return worst;
  }
  for (size_t i = 0; i < na; ++i) {
    i128 best = std::numeric_limits<i128>::max();
    for (size_t j = 0; j < nb && best > 0; ++j) {
      i128 d = 0;
      for (int c = 0; c < dim; ++c) {
        i128 diff = static_cast<i128>(a[i * dim + c]) - b[j * dim + c];
        d += diff * diff;
      }
      best = std::min(best, d);
    }
    worst = std::max(worst, best);
  }
  return worst;
}

BigInt to_big(i128 v) {
  bool neg = v < 0;
  unsigned __int128 u = neg ? static_cast<unsigned __int128>(-v) : static_cast<unsigned __int128>(v);
  BigInt r = static_cast<uint64_t>(u >> 64);
  r <<= 64;
  r += static_cast<uint64_t>(u);
  return neg ? BigInt(-r) : r;
}

std::vector<Cell> lattice_corners(const std::vector<Cell>& cells) {
  if (cells.empty()) return {};
  int64_t mi = cells[0].i, ma = cells[0].i, mj = cells[0].j, mb = cells[0].j;
  for (const auto& c : cells) {
    mi = std::min(mi, c.i);
    ma = std::max(ma, c.i);
    mj = std::min(mj, c.j);
    mb = std::max(mb, c.j);
  }
  int64_t w = ma - mi + 2;
  int64_t h = mb - mj + 2;
  std::vector<Cell> out;
  if (static_cast<long double>(w) * h <= 64.0L * cells.size() + 4e6L) {
    std::vector<bool> seen(static_cast<size_t>(w * h), false);
    for (const auto& c : cells) {
      for (int dx = 0; dx < 2; ++dx)
        for (int dy = 0; dy < 2; ++dy)
          seen[static_cast<size_t>((c.j - mj + dy) * w + (c.i - mi + dx))] = true;
    }
    for (int64_t x = 0; x < w; ++x)
      for (int64_t y = 0; y < h; ++y)
        if (seen[static_cast<size_t>(y * w + x)]) out.push_back({x + mi, y + mj});
    return out;
  }
  out.reserve(cells.size() * 4);
  for (const auto& c : cells)
    for (int dx = 0; dx < 2; ++dx)
      for (int dy = 0; dy < 2; ++dy) out.push_back({c.i + dx, c.j + dy});
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

double Length::value() const { return std::sqrt(static_cast<double>(squared)); }

bool Length::le(const Rational& bound) const {
  if (bound.sign() < 0) return false;
  BigRational b = bound.to_big();
  return squared <= b * b;
}

bool Length::le(long double bound) const { return sqrt_le(squared, bound); }

PointCloud::PointCloud(int dim, int64_t den, std::vector<int64_t> coords, Rational resolution)
    : dim_(dim), den_(den), coords_(std::move(coords)), resolution_(resolution) {
  if (dim_ < 1) throw precondition_error("point cloud dimension must be positive");
  if (den_ <= 0) throw precondition_error("point cloud denominator must be positive");
  if (coords_.size() % static_cast<size_t>(dim_) != 0)
    throw precondition_error("point cloud coordinate count not a multiple of dimension");
  if (coords_.empty()) throw domain_error("point cloud must be nonempty");
  if (resolution_.sign() < 0) throw precondition_error("resolution must be nonnegative");
  for (int64_t c : coords_) {
    if (c >= kCoordLimit || c <= -kCoordLimit) throw overflow_error("point cloud coordinate too large");
  }
}

PointCloud PointCloud::from_points(const std::vector<std::vector<Rational>>& points,
                                   Rational resolution) {
  if (points.empty()) throw domain_error("point cloud must be nonempty");
  int dim = static_cast<int>(points[0].size());
  int64_t den = 1;
  for (const auto& p : points) {
    if (static_cast<int>(p.size()) != dim) throw precondition_error("mixed point dimensions");
    for (const auto& c : p) den = lcm64(den, c.den());
  }
  std::vector<int64_t> coords;
  coords.reserve(points.size() * static_cast<size_t>(dim));
  for (const auto& p : points)
    for (const auto& c : p) coords.push_back(checked_mul(c.num(), den / c.den()));
  return PointCloud(dim, den, std::move(coords), resolution);
}

PointCloud PointCloud::from_points(const std::vector<Point2>& points, Rational resolution) {
  std::vector<std::vector<Rational>> pts;
  pts.reserve(points.size());
  for (const auto& p : points) pts.push_back({p[0], p[1]});
  return from_points(pts, resolution);
}

std::vector<Rational> PointCloud::point(size_t i) const {
  std::vector<Rational> p;
  for (int c = 0; c < dim_; ++c) p.push_back(coord(i, c));
  return p;
}

void PointCloud::set_resolution(const Rational& r) {
  if (r.sign() < 0) throw precondition_error("resolution must be nonnegative");
  resolution_ = r;
}

bool PointCloud::contains_origin() const {
  for (size_t i = 0; i < size(); ++i) {
    const int64_t* p = raw(i);
    if (std::all_of(p, p + dim_, [](int64_t c) { return c == 0; })) return true;
  }
  return false;
}

std::optional<PointCloud> PointCloud::within_ball(const Rational& radius) const {
  std::vector<int64_t> kept;
  for (size_t i = 0; i < size(); ++i) {
    if (norm_le(raw(i), dim_, den_, radius)) kept.insert(kept.end(), raw(i), raw(i) + dim_);
  }
  if (kept.empty()) return std::nullopt;
  return PointCloud(dim_, den_, std::move(kept), resolution_);
}

PointCloud PointCloud::rescaled(int64_t factor) const {
  std::vector<int64_t> c(coords_.size());
  for (size_t i = 0; i < c.size(); ++i) c[i] = checked_mul(coords_[i], factor);
  return PointCloud(dim_, checked_mul(den_, factor), std::move(c), resolution_);
}

void PointCloud::canonicalize() {
  size_t n = size();
  std::vector<size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  auto less = [&](size_t a, size_t b) {
    return std::lexicographical_compare(raw(a), raw(a) + dim_, raw(b), raw(b) + dim_);
  };
  auto equal = [&](size_t a, size_t b) { return std::equal(raw(a), raw(a) + dim_, raw(b)); };
  std::sort(idx.begin(), idx.end(), less);
  idx.erase(std::unique(idx.begin(), idx.end(), equal), idx.end());
  std::vector<int64_t> out;
  out.reserve(idx.size() * static_cast<size_t>(dim_));
  for (size_t i : idx) out.insert(out.end(), raw(i), raw(i) + dim_);
  coords_ = std::move(out);
}

CellSet::CellSet(int64_t base, int depth, std::vector<Cell> cells, Point2 offset)
    : base_(base), depth_(depth), cells_(std::move(cells)), offset_(std::move(offset)) {
  if (base_ < 2) throw precondition_error("cell set base must be at least 2");
  if (depth_ < 0) throw precondition_error("cell set depth must be nonnegative");
  std::sort(cells_.begin(), cells_.end());
  if (std::adjacent_find(cells_.begin(), cells_.end()) != cells_.end())
    throw invariant_error("cell set contains duplicate cells");
  for (const auto& c : cells_) {
    if (c.i >= (int64_t{1} << 30) || c.i <= -(int64_t{1} << 30) || c.j >= (int64_t{1} << 30) ||
        c.j <= -(int64_t{1} << 30))
      throw precondition_error("cell index outside supported bounding box");
  }
}

Rational CellSet::side() const { return Rational(1, ipow(base_, depth_)); }

bool CellSet::contains(const Cell& c) const {
  return std::binary_search(cells_.begin(), cells_.end(), c);
}

std::array<int64_t, 4> CellSet::index_bounds() const {
  if (cells_.empty()) return {0, 0, -1, -1};
  std::array<int64_t, 4> b{cells_[0].i, cells_[0].j, cells_[0].i, cells_[0].j};
  for (const auto& c : cells_) {
    b[0] = std::min(b[0], c.i);
    b[1] = std::min(b[1], c.j);
    b[2] = std::max(b[2], c.i);
    b[3] = std::max(b[3], c.j);
  }
  return b;
}

Length excess(const PointCloud& a, const PointCloud& b) {
  if (a.dim() != b.dim()) throw precondition_error("excess: dimension mismatch");
  int64_t den = lcm64(a.den(), b.den());
  const PointCloud sa = a.den() == den ? a : a.rescaled(den / a.den());
  const PointCloud sb = b.den() == den ? b : b.rescaled(den / b.den());
  i128 num = excess_numerator(sa.coords(), sb.coords(), a.dim());
  BigInt d = den;
  return Length{BigRational(to_big(num), d * d)};
}

Length hausdorff_distance(const PointCloud& a, const PointCloud& b) {
  return std::max(excess(a, b), excess(b, a));
}

PointCloud cell_corners(const CellSet& s) {
  if (s.size() == 0) throw domain_error("cell set is empty");
  int64_t scale = ipow(s.base(), s.depth());
  int64_t den = lcm64(lcm64(scale, s.offset()[0].den()), s.offset()[1].den());
  int64_t ox = checked_mul(s.offset()[0].num(), den / s.offset()[0].den());
  int64_t oy = checked_mul(s.offset()[1].num(), den / s.offset()[1].den());
  int64_t step = den / scale;
  std::vector<Cell> corners = lattice_corners(s.cells());
  std::vector<int64_t> coords;
  coords.reserve(corners.size() * 2);
  for (const auto& c : corners) {
    coords.push_back(checked_add(ox, checked_mul(c.i, step)));
    coords.push_back(checked_add(oy, checked_mul(c.j, step)));
  }
  return PointCloud(2, den, std::move(coords), s.side());
}

std::optional<PointCloud> blow_up(const PointCloud& s, const std::vector<Rational>& x,
                                  const Rational& r, const Rational& radius) {
  if (r.sign() <= 0) throw precondition_error("blow_up: scale must be positive");
  if (radius.sign() <= 0) throw precondition_error("blow_up: radius must be positive");
  if (static_cast<int>(x.size()) != s.dim()) throw precondition_error("blow_up: center dimension");
  int64_t l = s.den();
  for (const auto& c : x) l = lcm64(l, c.den());
  // ((c / den) - x) / (p / q) = (c * (l / den) - xn * (l / xd)) * q / (l * p)
  int64_t mult = l / s.den();
  std::vector<int64_t> shift(x.size());
  for (size_t k = 0; k < x.size(); ++k) shift[k] = checked_mul(x[k].num(), l / x[k].den());
  int64_t new_den = checked_mul(l, r.num());
  std::vector<int64_t> coords;
  std::vector<int64_t> pt(static_cast<size_t>(s.dim()));
  for (size_t i = 0; i < s.size(); ++i) {
    const int64_t* p = s.raw(i);
    for (int k = 0; k < s.dim(); ++k) {
      int64_t v = checked_add(checked_mul(p[k], mult), -shift[static_cast<size_t>(k)]);
      pt[static_cast<size_t>(k)] = checked_mul(v, r.den());
    }
    if (norm_le(pt.data(), s.dim(), new_den, radius)) coords.insert(coords.end(), pt.begin(), pt.end());
  }
  if (coords.empty()) return std::nullopt;
  // Reduce the shared denominator where possible.
  int64_t g = new_den;
  for (int64_t c : coords) {
    g = std::gcd(g, c);
    if (g == 1) break;
  }
  if (g > 1) {
    for (auto& c : coords) c /= g;
    new_den /= g;
  }
  return PointCloud(s.dim(), new_den, std::move(coords), s.resolution() / r);
}

std::optional<PointCloud> blow_up(const CellSet& s, const Point2& x, const Rational& r,
                                  const Rational& radius) {
  return blow_up(cell_corners(s), std::vector<Rational>{x[0], x[1]}, r, radius);
}

bool AwProfile::converged(const Rational& radius, const Rational& eps) const {
  const AwRow* last = nullptr;
  for (const auto& row : rows) {
    if (row.radius == radius && (last == nullptr || row.index >= last->index)) last = &row;
  }
  if (last == nullptr) return false;
  BigRational e = eps.to_big();
  return last->seq_over_target.squared < e * e && last->target_over_seq.squared < e * e;
}

AwProfile aw_profile(const std::vector<PointCloud>& sequence,
                     const std::vector<PointCloud>& targets, const std::vector<Rational>& radii) {
  if (targets.size() != sequence.size()) throw precondition_error("aw_profile: target count mismatch");
  for (const auto& c : sequence)
    if (!c.contains_origin()) throw precondition_error("aw_profile: sequence cloud misses the origin");
  for (const auto& c : targets)
    if (!c.contains_origin()) throw precondition_error("aw_profile: target cloud misses the origin");
  AwProfile out;
  for (size_t i = 0; i < sequence.size(); ++i) {
    for (const auto& r : radii) {
      AwRow row{i, r, Length{0}, Length{0}};
      if (auto a = sequence[i].within_ball(r)) row.seq_over_target = excess(*a, targets[i]);
      if (auto b = targets[i].within_ball(r)) row.target_over_seq = excess(*b, sequence[i]);
      out.rows.push_back(row);
    }
  }
  return out;
}

AwProfile aw_profile(const std::vector<PointCloud>& sequence, const PointCloud& target,
                     const std::vector<Rational>& radii) {
  return aw_profile(sequence, std::vector<PointCloud>(sequence.size(), target), radii);
}

Components connected_components(const CellSet& s, Adjacency adjacency) {
  const auto& cells = s.cells();
  size_t n = cells.size();
  boost::disjoint_sets_with_storage<> ds(n);
  for (size_t i = 0; i < n; ++i) ds.make_set(i);
  auto find = [&](Cell c) -> std::optional<size_t> {
    auto it = std::lower_bound(cells.begin(), cells.end(), c);
    if (it != cells.end() && *it == c) return static_cast<size_t>(it - cells.begin());
    return std::nullopt;
  };
  for (size_t i = 0; i < n; ++i) {
    const Cell& c = cells[i];
    std::vector<Cell> nbrs = {{c.i + 1, c.j}, {c.i, c.j + 1}};
    if (adjacency == Adjacency::corner) {
      nbrs.push_back({c.i + 1, c.j + 1});
      nbrs.push_back({c.i + 1, c.j - 1});
    }
    for (const auto& nb : nbrs)
      if (auto k = find(nb)) ds.union_set(i, *k);
  }
  Components out;
  out.label.assign(n, -1);
  std::vector<int> root_label(n, -1);
  for (size_t i = 0; i < n; ++i) {
    size_t r = ds.find_set(i);
    if (root_label[r] < 0) root_label[r] = out.count++;
    out.label[i] = root_label[r];
  }
  return out;
}

namespace {

enum Quadrant : uint8_t { kSW = 1, kSE = 2, kNW = 4, kNE = 8 };

struct CornerMask {
  uint64_t key;
  uint8_t mask;
};

std::vector<CornerMask> corner_masks(const std::vector<Cell>& cells) {
  std::vector<CornerMask> entries;
  entries.reserve(cells.size() * 4);
  for (const auto& c : cells) {
    entries.push_back({pack(c.i, c.j), kNE});
    entries.push_back({pack(c.i + 1, c.j), kNW});
    entries.push_back({pack(c.i, c.j + 1), kSE});
    entries.push_back({pack(c.i + 1, c.j + 1), kSW});
  }
  std::sort(entries.begin(), entries.end(),
            [](const CornerMask& a, const CornerMask& b) { return a.key < b.key; });
  std::vector<CornerMask> merged;
  for (const auto& e : entries) {
    if (!merged.empty() && merged.back().key == e.key) {
      merged.back().mask |= e.mask;
    } else {
      merged.push_back(e);
    }
  }
  return merged;
}

Cell unpack(uint64_t key) {
  return {static_cast<int64_t>(key >> 32) - (int64_t{1} << 31),
          static_cast<int64_t>(key & 0xffffffffu) - (int64_t{1} << 31)};
}

Point2 lattice_point(const CellSet& s, int64_t x, int64_t y) {
  Rational side = s.side();
  return {s.offset()[0] + side * Rational(x), s.offset()[1] + side * Rational(y)};
}

}  // namespace

ContactReport contact_report(const CellSet& s) {
  const auto& cells = s.cells();
  auto index_of = [&](Cell c) {
    return static_cast<size_t>(std::lower_bound(cells.begin(), cells.end(), c) - cells.begin());
  };
  ContactReport out;
  for (size_t a = 0; a < cells.size(); ++a) {
    const Cell& c = cells[a];
    if (s.contains({c.i + 1, c.j})) {
      out.edge_contacts.push_back({a, index_of({c.i + 1, c.j}), lattice_point(s, c.i + 1, c.j),
                                   lattice_point(s, c.i + 1, c.j + 1)});
    }
    if (s.contains({c.i, c.j + 1})) {
      out.edge_contacts.push_back({a, index_of({c.i, c.j + 1}), lattice_point(s, c.i, c.j + 1),
                                   lattice_point(s, c.i + 1, c.j + 1)});
    }
  }
  for (const auto& e : corner_masks(cells)) {
    Cell p = unpack(e.key);
    if (e.mask == (kSW | kNE)) {
      out.corner_contacts.push_back({index_of({p.i - 1, p.j - 1}), index_of({p.i, p.j}),
                                     lattice_point(s, p.i, p.j)});
    } else if (e.mask == (kNW | kSE)) {
      out.corner_contacts.push_back({index_of({p.i - 1, p.j}), index_of({p.i, p.j - 1}),
                                     lattice_point(s, p.i, p.j)});
    }
  }
  return out;
}

std::vector<Point2> local_cut_point_candidates(const CellSet& s) {
  std::vector<Point2> out;
  for (const auto& e : corner_masks(s.cells())) {
    if (e.mask == (kSW | kNE) || e.mask == (kNW | kSE)) {
      Cell p = unpack(e.key);
      out.push_back(lattice_point(s, p.i, p.j));
    }
  }
  return out;
}

}  // namespace ftl
