#include "ftl/carpet.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ftl/dendrite.hpp"

namespace ftl {

Similarity Similarity::identity(int dim) {
  return Similarity{Rational(1), {}, std::vector<Rational>(static_cast<size_t>(dim), Rational(0))};
}

std::vector<Rational> Similarity::apply(const std::vector<Rational>& x) const {
  if (x.size() != translation.size()) throw precondition_error("similarity: dimension mismatch");
  std::vector<Rational> y(x.size());
  for (size_t k = 0; k < x.size(); ++k) {
    if (perm.empty()) {
      y[k] = x[k];
    } else {
      int target = std::abs(perm[k]) - 1;
      y[static_cast<size_t>(target)] = perm[k] > 0 ? x[k] : -x[k];
    }
  }
  for (size_t k = 0; k < y.size(); ++k) y[k] = scale * y[k] + translation[k];
  return y;
}

Point2 Similarity::apply(const Point2& x) const {
  auto y = apply(std::vector<Rational>{x[0], x[1]});
  return {y[0], y[1]};
}

Similarity compose(const Similarity& outer, const Similarity& inner) {
  size_t dim = inner.translation.size();
  if (outer.translation.size() != dim) throw precondition_error("similarity: dimension mismatch");
  Similarity s;
  s.scale = outer.scale * inner.scale;
  s.translation = outer.apply(inner.translation);
  if (outer.perm.empty()) {
    s.perm = inner.perm;
  } else {
    std::vector<int> p(dim);
    for (size_t k = 0; k < dim; ++k) {
      int mid = inner.perm.empty() ? static_cast<int>(k) + 1 : inner.perm[k];
      int out = outer.perm[static_cast<size_t>(std::abs(mid) - 1)];
      p[k] = (mid > 0) == (out > 0) ? std::abs(out) : -std::abs(out);
    }
    bool ident = true;
    for (size_t k = 0; k < dim; ++k) ident = ident && p[k] == static_cast<int>(k) + 1;
    if (!ident) s.perm = p;
  }
  return s;
}

Similarity Similarity::then(const Similarity& outer) const { return compose(outer, *this); }

Similarity Similarity::inverse() const {
  size_t dim = translation.size();
  Similarity inv;
  inv.scale = Rational(1) / scale;
  if (!perm.empty()) {
    inv.perm.assign(dim, 0);
    for (size_t k = 0; k < dim; ++k) {
      int target = std::abs(perm[k]) - 1;
      inv.perm[static_cast<size_t>(target)] = perm[k] > 0 ? static_cast<int>(k) + 1 : -static_cast<int>(k) - 1;
    }
  }
  Similarity lin{inv.scale, inv.perm, std::vector<Rational>(dim, Rational(0))};
  auto t = lin.apply(translation);
  for (auto& c : t) c = -c;
  inv.translation = t;
  return inv;
}

Cell model_cell(int n, int model, int j) {
  Alphabet a(n);
  if (model != 1 && model != 2) throw precondition_error("model must be 1 or 2");
  if (!a.contains(j)) throw precondition_error("map index out of range");
  if (j <= n) return {j - 1, 0};
  if (j <= 2 * n - 1) return {n - 1, j - n};
  if (j <= 3 * n - 2) return {n - 2 - (j - 2 * n), n - 1};
  if (j <= 4 * n - 4) return {0, n - 2 - (j - (3 * n - 1))};
  if (j < a.bump_first()) {
    int i = j - (4 * n - 4);
    return {n / 2 + i - 1, 1};
  }
  int i = j - (4 * n - 4) - (n / 2 - 1);
  return {i, model == 1 ? 2 : 1};
}

Similarity model_map(int n, int model, int j) {
  Cell c = model_cell(n, model, j);
  return Similarity{Rational(1, n), {}, {Rational(c.i, n), Rational(c.j, n)}};
}

ModelSystem::ModelSystem(int n, int model) : n_(n), model_(model) {
  Alphabet a(n);
  for (int j = 1; j <= a.size(); ++j) corners_.push_back(model_cell(n, model, j));
}

std::vector<Similarity> ModelSystem::maps() const {
  std::vector<Similarity> out;
  for (int j = 1; j <= static_cast<int>(corners_.size()); ++j) out.push_back(model_map(n_, model_, j));
  return out;
}

CellSet ModelSystem::cells() const { return CellSet(n_, 1, corners_); }

namespace {

bool edge_on_cell_boundary(const UnitEdge& e, const CellSet& cells) {
  if (e.up) return cells.contains({e.x, e.y}) || cells.contains({e.x - 1, e.y});
  return cells.contains({e.x, e.y}) || cells.contains({e.x, e.y - 1});
}

}  // namespace

std::vector<ConstraintCheck> check_constraints(int n) {
  Alphabet a(n);
  ModelSystem m1(n, 1), m2(n, 2);
  std::vector<ConstraintCheck> out;

  {
    bool ok = true;
    std::string detail = "5n-6 distinct cells of side 1/n inside [0,1]^2";
    for (const ModelSystem* m : {&m1, &m2}) {
      auto c = m->corners();
      std::sort(c.begin(), c.end());
      if (std::adjacent_find(c.begin(), c.end()) != c.end()) {
        ok = false;
        detail = "duplicate cell in model " + std::to_string(m->model());
      }
      for (const auto& cell : c) {
        if (cell.i < 0 || cell.j < 0 || cell.i > n - 1 || cell.j > n - 1) {
          ok = false;
          detail = "cell outside the unit square";
        }
      }
      if (static_cast<int>(c.size()) != a.size()) ok = false;
    }
    out.push_back({"C1", ok, detail});
  }
  {
    bool ok = true;
    std::string detail = "models differ only in the bump row";
    for (int j = 1; j <= a.size(); ++j) {
      Cell p = m1.corners()[static_cast<size_t>(j - 1)];
      Cell q = m2.corners()[static_cast<size_t>(j - 1)];
      bool bump = j >= a.bump_first();
      if (!bump && !(p == q)) ok = false;
      if (bump && !(p.i == q.i && p.j == 2 && q.j == 1)) ok = false;
    }
    out.push_back({"C2", ok, detail});
  }
  {
    auto rep = contact_report(m2.cells());
    out.push_back({"C3", rep.corner_contacts.empty(),
                   std::to_string(rep.corner_contacts.size()) + " corner contacts in model 2"});
  }
  {
    auto rep = contact_report(m1.cells());
    Point2 expect{Rational(1, 2), Rational(2, n)};
    bool ok = rep.corner_contacts.size() == 1 && rep.corner_contacts[0].point == expect;
    std::string where = rep.corner_contacts.empty() ? "none" : to_string(rep.corner_contacts[0].point);
    out.push_back({"C4", ok,
                   std::to_string(rep.corner_contacts.size()) + " corner contact(s) in model 1 at " + where});
  }
  {
    bool ok = true;
    std::string detail = "dendrite edges on cell boundaries";
    for (int model : {1, 2}) {
      CellSet cells = (model == 1 ? m1 : m2).cells();
      DendriteGraph t = build_model_dendrite(n, model);
      for (const auto& e : t.edges()) {
        if (!edge_on_cell_boundary(e, cells)) {
          ok = false;
          detail = "edge off the cell boundaries in model " + std::to_string(model);
        }
      }
    }
    out.push_back({"C5", ok, detail});
  }
  {
    bool ok = connected_components(m1.cells(), Adjacency::edge).count == 1 &&
              connected_components(m2.cells(), Adjacency::edge).count == 1;
    out.push_back({"C6", ok, "cell unions connected"});
  }
  {
    bool ok = true;
    for (const ModelSystem* m : {&m1, &m2}) {
      for (int j = a.ring_size() + 1; j <= a.size(); ++j) {
        Cell c = m->corners()[static_cast<size_t>(j - 1)];
        if (c.i < 1 || c.j < 1 || c.i > n - 2 || c.j > n - 2) ok = false;
      }
    }
    out.push_back({"C7", ok, "interior maps avoid the boundary"});
  }
  return out;
}

Cell phi_corner(int n, const ChoiceFunction& eta, const Word& w) {
  Alphabet a(n);
  Cell c{0, 0};
  for (size_t k = 0; k < w.size(); ++k) {
    if (!a.contains(w[k])) throw precondition_error("letter out of range");
    Cell t = model_cell(n, eta.eval(w.data(), k), w[k]);
    c = {checked_add(checked_mul(c.i, n), t.i), checked_add(checked_mul(c.j, n), t.j)};
  }
  return c;
}

Similarity compose_phi(int n, const ChoiceFunction& eta, const Word& w) {
  Cell c = phi_corner(n, eta, w);
  int64_t s = ipow(n, static_cast<int>(w.size()));
  return Similarity{Rational(1, s), {}, {Rational(c.i, s), Rational(c.j, s)}};
}

void enumerate_cells(int n, const ChoiceFunction& eta, int depth, const CellFilter& keep,
                     const CellVisitor& emit, uint64_t budget) {
  Alphabet a(n);
  std::vector<Cell> table[3];
  for (int model : {1, 2})
    for (int j = 1; j <= a.size(); ++j) table[model].push_back(model_cell(n, model, j));
  Word w;
  w.reserve(static_cast<size_t>(depth));
  uint64_t emitted = 0;
  auto visit = [&](auto&& self, Cell c, int d) -> void {
    if (keep && !keep(c, d)) return;
    if (d == depth) {
      if (++emitted > budget) throw budget_error("cell enumeration exceeds budget " + std::to_string(budget));
      emit(w, c);
      return;
    }
    int model = eta.eval(w.data(), w.size());
    for (int j = 1; j <= a.size(); ++j) {
      const Cell& t = table[model][static_cast<size_t>(j - 1)];
      w.push_back(j);
      self(self, Cell{c.i * n + t.i, c.j * n + t.j}, d + 1);
      w.pop_back();
    }
  };
  visit(visit, Cell{0, 0}, 0);
}

CarpetApprox approx_cells(int n, const ChoiceFunction& eta, int depth, uint64_t budget) {
  Alphabet a(n);
  if (depth < 0) throw precondition_error("depth must be nonnegative");
  long double total = std::pow(static_cast<long double>(a.size()), depth);
  if (total > static_cast<long double>(budget))
    throw budget_error("approx_cells: (5n-6)^m exceeds budget " + std::to_string(budget));
  std::vector<std::pair<Cell, uint64_t>> found;
  found.reserve(static_cast<size_t>(total));
  enumerate_cells(
      n, eta, depth, nullptr,
      [&](const Word& w, const Cell& c) { found.emplace_back(c, word_index(a, w)); }, budget);
  std::sort(found.begin(), found.end());
  int64_t side = ipow(n, depth);
  std::vector<Cell> cells;
  std::vector<uint64_t> words;
  cells.reserve(found.size());
  words.reserve(found.size());
  for (const auto& [c, w] : found) {
    if (c.i < 0 || c.j < 0 || c.i >= side || c.j >= side) throw invariant_error("cell outside [0,1]^2");
    cells.push_back(c);
    words.push_back(w);
  }
  // CellSet rejects duplicate corners, which is interior-disjointness for equal-size cells.
  CellSet set(n, depth, std::move(cells));
  return CarpetApprox{n, depth, std::move(set), std::move(words)};
}

CellRelation cell_relation(int n, const ChoiceFunction& eta, const Word& w, const Word& v) {
  if (w.size() != v.size()) throw precondition_error("cell_relation: word lengths differ");
  Cell p = phi_corner(n, eta, w);
  Cell q = phi_corner(n, eta, v);
  int64_t dx = std::max<int64_t>(std::abs(p.i - q.i) - 1, 0);
  int64_t dy = std::max<int64_t>(std::abs(p.j - q.j) - 1, 0);
  int64_t s = ipow(n, static_cast<int>(w.size()));
  CellRelation rel;
  rel.intersecting = dx == 0 && dy == 0;
  rel.gap_squared = Rational(dx * dx + dy * dy) / Rational(checked_mul(s, s));
  return rel;
}

double CodedPoint::error_radius() const { return std::sqrt(2.0) * radius_factor.to_double(); }

CodedPoint code_point(int n, const ChoiceFunction& eta, const Word& prefix) {
  if (prefix.empty()) throw precondition_error("code_point needs a prefix of length >= 1");
  Cell c = phi_corner(n, eta, prefix);
  int64_t s = ipow(n, static_cast<int>(prefix.size()));
  return CodedPoint{{Rational(c.i, s), Rational(c.j, s)}, Rational(1, s)};
}

double alpha(int n) { return std::log(5.0 * n - 6.0) / std::log(static_cast<double>(n)); }

AhlforsConstants ahlfors_constants(int n) {
  double a = alpha(n);
  double r2 = std::sqrt(2.0);
  return AhlforsConstants{a, std::pow(8.0 * r2, -a), 9.0 * std::pow(8.0 / r2, a),
                          std::pow(2.0 * r2 * n, -a), 9.0 * std::pow(r2 * n, a)};
}

AhlforsSample ahlfors_ratio(int n, const ChoiceFunction& eta, const Point2& x, const Rational& r,
                            int depth) {
  Alphabet a(n);
  if (r.sign() <= 0 || r >= Rational(1, n)) throw precondition_error("ahlfors_ratio: r must lie in (0, 1/n)");
  const Rational r2 = r * r;
  std::vector<uint64_t> units(static_cast<size_t>(depth) + 1);
  for (int j = 0; j <= depth; ++j) units[static_cast<size_t>(j)] = static_cast<uint64_t>(ipow(a.size(), depth - j));
  uint64_t inner = 0, outer = 0;
  Word w;
  auto visit = [&](auto&& self, Cell c, int d) -> void {
    Rational s(1, ipow(n, d));
    Rational x0 = s * Rational(c.i), y0 = s * Rational(c.j);
    Rational x1 = x0 + s, y1 = y0 + s;
    auto clampd = [](const Rational& v, const Rational& lo, const Rational& hi) {
      if (v < lo) return lo - v;
      if (v > hi) return v - hi;
      return Rational(0);
    };
    Rational ddx = clampd(x[0], x0, x1), ddy = clampd(x[1], y0, y1);
    if (ddx * ddx + ddy * ddy > r2) return;
    Rational fx = std::max(abs(x[0] - x0), abs(x[0] - x1));
    Rational fy = std::max(abs(x[1] - y0), abs(x[1] - y1));
    if (fx * fx + fy * fy <= r2) {
      inner += units[static_cast<size_t>(d)];
      outer += units[static_cast<size_t>(d)];
      return;
    }
    if (d == depth) {
      outer += 1;
      return;
    }
    int model = eta.eval(w.data(), w.size());
    for (int j = 1; j <= a.size(); ++j) {
      Cell t = model_cell(n, model, j);
      w.push_back(j);
      self(self, Cell{c.i * n + t.i, c.j * n + t.j}, d + 1);
      w.pop_back();
    }
  };
  visit(visit, Cell{0, 0}, 0);
  AhlforsConstants k = ahlfors_constants(n);
  AhlforsSample out;
  out.x = x;
  out.r = r;
  int64_t total = ipow(a.size(), depth);
  out.inner_mass = Rational(static_cast<int64_t>(inner), total);
  out.outer_mass = Rational(static_cast<int64_t>(outer), total);
  double ra = std::pow(r.to_double(), k.alpha);
  out.inner_ratio = out.inner_mass.to_double() / ra;
  out.outer_ratio = out.outer_mass.to_double() / ra;
  out.lower = k.lower;
  out.upper = k.upper;
  // One cell layer: cells meeting the ball lie in B(x, r + delta), cells
  // inside it cover B(x, r - delta), delta the cell diameter.
  double delta = std::sqrt(2.0) / std::pow(static_cast<double>(n), depth);
  double q = delta / r.to_double();
  out.eps_upper = std::pow(1.0 + q, k.alpha) - 1.0;
  out.eps_lower = q >= 1.0 ? 1.0 : 1.0 - std::pow(1.0 - q, k.alpha);
  out.pass = out.outer_ratio <= out.upper * (1.0 + out.eps_upper) &&
             out.inner_ratio >= out.lower * (1.0 - out.eps_lower);
  return out;
}

}  // namespace ftl
