#include "ftl/dendrite.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <random>
#include <set>

#include <boost/pending/disjoint_sets.hpp>

#include "ftl/carpet.hpp"

namespace ftl {

// ---------------------------------------------------------------- graphs

DendriteGraph::DendriteGraph(int n, int depth, std::vector<UnitEdge> edges, std::vector<Cell> extra_vertices)
    : n_(n), depth_(depth), edges_(std::move(edges)) {
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
  vertices_ = std::move(extra_vertices);
  vertices_.reserve(vertices_.size() + 2 * edges_.size());
  for (const auto& e : edges_) {
    vertices_.push_back(e.from());
    vertices_.push_back(e.to());
  }
  std::sort(vertices_.begin(), vertices_.end());
  vertices_.erase(std::unique(vertices_.begin(), vertices_.end()), vertices_.end());
}

bool DendriteGraph::has_edge(const UnitEdge& e) const {
  return std::binary_search(edges_.begin(), edges_.end(), e);
}

bool DendriteGraph::has_vertex(const Cell& v) const {
  return std::binary_search(vertices_.begin(), vertices_.end(), v);
}

int DendriteGraph::degree(const Cell& v) const {
  int d = 0;
  d += has_edge({v.i, v.j, false});
  d += has_edge({v.i, v.j, true});
  d += has_edge({v.i - 1, v.j, false});
  d += has_edge({v.i, v.j - 1, true});
  return d;
}

bool DendriteGraph::is_connected() const {
  if (vertices_.empty()) return false;
  boost::disjoint_sets_with_storage<> ds(vertices_.size());
  for (size_t i = 0; i < vertices_.size(); ++i) ds.make_set(i);
  auto idx = [&](const Cell& c) {
    return static_cast<size_t>(std::lower_bound(vertices_.begin(), vertices_.end(), c) - vertices_.begin());
  };
  for (const auto& e : edges_) ds.union_set(idx(e.from()), idx(e.to()));
  size_t root = ds.find_set(0);
  for (size_t i = 1; i < vertices_.size(); ++i)
    if (ds.find_set(i) != root) return false;
  return true;
}

bool DendriteGraph::is_tree() const { return is_connected() && edges_.size() + 1 == vertices_.size(); }

std::vector<Cell> DendriteGraph::leaves() const {
  std::vector<Cell> out;
  for (const auto& v : vertices_)
    if (degree(v) == 1) out.push_back(v);
  return out;
}

std::vector<Cell> DendriteGraph::sinks() const {
  std::vector<Cell> out;
  for (const auto& v : vertices_)
    if (!has_edge({v.i, v.j, false}) && !has_edge({v.i, v.j, true})) out.push_back(v);
  return out;
}

namespace {

std::vector<UnitEdge> model_edges(int n, int model) {
  Alphabet a(n);
  if (model != 1 && model != 2) throw precondition_error("model must be 1 or 2");
  std::vector<UnitEdge> e;
  for (int x = 0; x <= n - 2; ++x) {
    e.push_back({x, 0, false});
    e.push_back({x, n - 1, false});
  }
  for (int y = 0; y <= n - 2; ++y) e.push_back({0, y, true});
  for (int y = 0; y <= n - 3; ++y) e.push_back({n - 1, y, true});
  e.push_back({n / 2, 0, true});
  for (int x = n / 2; x <= n - 3; ++x) e.push_back({x, 1, false});
  int row = model == 1 ? 2 : 1;
  for (int x = 0; x <= n / 2 - 2; ++x) e.push_back({x, row, false});
  return e;
}

}  // namespace

DendriteGraph build_model_dendrite(int n, int model) {
  DendriteGraph g(n, 1, model_edges(n, model));
  if (!g.is_tree()) throw invariant_error("model dendrite is not a tree");
  for (const auto& v : g.vertices())
    if (v.i < 0 || v.j < 0 || v.i > n - 1 || v.j > n - 1) throw invariant_error("model dendrite leaves [0,1)^2");
  return g;
}

std::vector<Cell> model_leaves(int n, int model) {
  return {{n - 1, n - 1}, {n - 1, n - 2}, {n / 2 - 1, model == 1 ? 2 : 1}, {n - 2, 1}};
}

DendriteGraph build_Tm(int n, const ChoiceFunction& eta, int m, uint64_t budget) {
  Alphabet a(n);
  if (m < 0) throw precondition_error("build_Tm: negative stage");
  if (std::pow(static_cast<long double>(a.size()), m) > static_cast<long double>(budget))
    throw budget_error("build_Tm: (5n-6)^m exceeds budget");
  std::vector<UnitEdge> model[3] = {{}, model_edges(n, 1), model_edges(n, 2)};
  std::vector<UnitEdge> edges;
  for (int s = 0; s < m; ++s) {
    std::vector<UnitEdge> next;
    next.reserve(edges.size() * static_cast<size_t>(n) + static_cast<size_t>(std::pow(a.size(), s)) * model[1].size());
    for (const auto& e : edges) {
      for (int k = 0; k < n; ++k) {
        if (e.up) {
          next.push_back({e.x * n, e.y * n + k, true});
        } else {
          next.push_back({e.x * n + k, e.y * n, false});
        }
      }
    }
    enumerate_cells(
        n, eta, s, nullptr,
        [&](const Word& w, const Cell& c) {
          int md = eta(w);
          for (const auto& e : model[md]) next.push_back({c.i * n + e.x, c.j * n + e.y, e.up});
        },
        budget);
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    edges = std::move(next);
  }
  DendriteGraph g(n, m, std::move(edges), {Cell{0, 0}});
  if (!g.is_tree()) throw invariant_error("T_m is not a tree at stage " + std::to_string(m));
  return g;
}

std::vector<EdgeLabel> classify_edges(const ChoiceFunction& eta, const DendriteGraph& tm) {
  int n = tm.n();
  Alphabet a(n);
  CarpetApprox cells = approx_cells(n, eta, tm.depth());
  const auto& cs = cells.cells.cells();
  std::vector<EdgeLabel> out;
  out.reserve(tm.edges().size());
  for (const auto& e : tm.edges()) {
    auto it = std::lower_bound(cs.begin(), cs.end(), e.from());
    if (it == cs.end() || !(*it == e.from()))
      throw invariant_error("edge without owning cell at (" + std::to_string(e.x) + "," + std::to_string(e.y) + ")");
    uint64_t w = cells.words[static_cast<size_t>(it - cs.begin())];
    out.push_back({e, word_from_index(a, w, static_cast<size_t>(tm.depth())), e.up});
  }
  return out;
}

// ---------------------------------------------------------------- tours

Rational TourPlan::param_of(size_t piece) const {
  int64_t acc = 0;
  for (size_t k = 0; k < piece; ++k) acc += pieces[k].width;
  return Rational(acc, total_width);
}

Rational TourPlan::t_split() const { return param_of(mid_b); }

namespace {

struct TourGraph {
  std::map<Cell, std::vector<Cell>> nbrs;
};

TourGraph tour_graph(int n, int model, bool with_extension) {
  TourGraph g;
  auto add = [&](Cell a, Cell b) {
    g.nbrs[a].push_back(b);
    g.nbrs[b].push_back(a);
  };
  for (const auto& e : model_edges(n, model)) add(e.from(), e.to());
  if (with_extension) {
    add({0, n - 1}, {0, n});
    add({n - 1, 0}, {n, 0});
  }
  return g;
}

std::vector<Cell> path_to(const TourGraph& g, Cell target) {
  std::map<Cell, Cell> parent;
  std::vector<Cell> stack{{0, 0}};
  parent[{0, 0}] = {0, 0};
  while (!stack.empty()) {
    Cell v = stack.back();
    stack.pop_back();
    for (const auto& u : g.nbrs.at(v)) {
      if (parent.count(u)) continue;
      parent[u] = v;
      stack.push_back(u);
    }
  }
  std::vector<Cell> path{target};
  while (!(path.back() == Cell{0, 0})) path.push_back(parent.at(path.back()));
  std::reverse(path.begin(), path.end());
  return path;
}

int direction_rank(Cell from, Cell to) {
  if (to.j > from.j) return 0;  // up
  if (to.i > from.i) return 1;  // right
  if (to.j < from.j) return 2;  // down
  return 3;                     // left
}

}  // namespace

TourPlan build_tour(int n, int model, bool extended) {
  Alphabet a(n);
  TourGraph g = tour_graph(n, model, true);
  const Cell up_ext{0, n}, low_ext{n, 0};
  std::vector<Cell> pu = path_to(g, up_ext), pl = path_to(g, low_ext);
  std::map<Cell, Cell> path_child;
  for (const auto* p : {&pu, &pl})
    for (size_t k = 0; k + 1 < p->size(); ++k) path_child[(*p)[k]] = (*p)[k + 1];

  TourPlan full;
  full.n = n;
  full.model = model;
  full.extended = true;
  std::set<Cell> seen;
  auto pause = [&](Cell v) {
    TourPiece p;
    p.kind = PieceKind::pause;
    p.at = v;
    p.to = v;
    p.width = (v == up_ext || v == low_ext) ? 0 : 2;
    p.first_visit = seen.insert(v).second;
    p.origin = v == Cell{0, 0};
    full.pieces.push_back(p);
  };
  auto edge = [&](Cell u, Cell v) {
    TourPiece p;
    p.kind = PieceKind::edge;
    p.at = u;
    p.to = v;
    p.width = 2;
    p.extension = (u == up_ext || v == up_ext || u == low_ext || v == low_ext);
    full.pieces.push_back(p);
  };
  auto visit = [&](auto&& self, Cell v, Cell parent, bool root) -> void {
    pause(v);
    std::vector<Cell> kids;
    for (const auto& u : g.nbrs.at(v))
      if (root || !(u == parent)) kids.push_back(u);
    std::sort(kids.begin(), kids.end(),
              [&](Cell x, Cell y) { return direction_rank(v, x) < direction_rank(v, y); });
    auto pc = path_child.find(v);
    if (!root && pc != path_child.end()) {
      Cell c = pc->second;
      auto it = std::find(kids.begin(), kids.end(), c);
      kids.erase(it);
      if (c == up_ext || c == low_ext) {
        kids.push_back(c);
      } else {
        kids.insert(kids.begin(), c);
      }
    }
    for (const auto& c : kids) {
      edge(v, c);
      self(self, c, v, false);
      edge(c, v);
      pause(v);
    }
  };
  visit(visit, Cell{0, 0}, Cell{0, 0}, true);

  // Split the middle origin pause into two halves.
  std::vector<size_t> origin_idx;
  for (size_t k = 0; k < full.pieces.size(); ++k)
    if (full.pieces[k].kind == PieceKind::pause && full.pieces[k].origin) origin_idx.push_back(k);
  if (origin_idx.size() != 3) throw invariant_error("tour root must pause three times");
  {
    TourPiece half = full.pieces[origin_idx[1]];
    half.width = 1;
    half.first_visit = false;
    full.pieces[origin_idx[1]] = half;
    full.pieces.insert(full.pieces.begin() + static_cast<std::ptrdiff_t>(origin_idx[1]) + 1, half);
  }

  TourPlan plan = full;
  if (!extended) {
    plan.extended = false;
    plan.pieces.clear();
    for (const auto& p : full.pieces) {
      if (p.extension || (p.kind == PieceKind::pause && p.width == 0)) continue;
      bool merge = !plan.pieces.empty() && p.kind == PieceKind::pause &&
                   plan.pieces.back().kind == PieceKind::pause && plan.pieces.back().at == p.at && !p.origin;
      if (merge) {
        plan.pieces.back().width += p.width;
        plan.pieces.back().first_visit = plan.pieces.back().first_visit || p.first_visit;
      } else {
        plan.pieces.push_back(p);
      }
    }
  }
  plan.total_width = 0;
  std::vector<size_t> origins;
  for (size_t k = 0; k < plan.pieces.size(); ++k) {
    const auto& p = plan.pieces[k];
    plan.total_width += p.width;
    if (p.kind != PieceKind::pause) continue;
    if (p.origin) origins.push_back(k);
    if (p.at == up_ext) plan.upper_ext = k;
    if (p.at == low_ext) plan.lower_ext = k;
  }
  if (origins.size() != 4) throw invariant_error("tour origin pause layout");
  plan.first_origin = origins[0];
  plan.mid_a = origins[1];
  plan.mid_b = origins[2];
  plan.last_origin = origins[3];
  return plan;
}

std::vector<TourCheck> check_tour(const TourPlan& plan) {
  int n = plan.n;
  std::vector<TourCheck> out;
  TourGraph g = tour_graph(n, plan.model, plan.extended);
  {
    std::map<std::pair<Cell, Cell>, int> count;
    for (const auto& p : plan.pieces)
      if (p.kind == PieceKind::edge) ++count[{p.at, p.to}];
    bool ok = true;
    size_t edges = 0;
    for (const auto& [v, nb] : g.nbrs) {
      for (const auto& u : nb) {
        ++edges;
        if (count[std::make_pair(v, u)] != 1) ok = false;
      }
    }
    ok = ok && count.size() == edges;
    out.push_back({"two-to-one", ok, "each edge traversed once in each direction"});
  }
  {
    std::map<Cell, int> runs;
    for (size_t k = 0; k < plan.pieces.size(); ++k) {
      const auto& p = plan.pieces[k];
      if (p.kind != PieceKind::pause) continue;
      bool continues = k > 0 && plan.pieces[k - 1].kind == PieceKind::pause && plan.pieces[k - 1].at == p.at;
      if (!continues) ++runs[p.at];
    }
    bool ok = true;
    std::string detail = "preimage components equal valence";
    for (const auto& [v, nb] : g.nbrs) {
      int expect = static_cast<int>(nb.size()) + (v == Cell{0, 0} ? 1 : 0);
      if (runs[v] != expect) {
        ok = false;
        detail = "vertex (" + std::to_string(v.i) + "," + std::to_string(v.j) + ") has " +
                 std::to_string(runs[v]) + " components, valence " + std::to_string(nb.size());
      }
    }
    out.push_back({"valence", ok, detail});
  }
  if (plan.extended) {
    auto leaves = model_leaves(n, plan.model);
    auto start = [&](Cell v) {
      for (size_t k = 0; k < plan.pieces.size(); ++k)
        if (plan.pieces[k].kind == PieceKind::pause && plan.pieces[k].at == v) return k;
      throw invariant_error("leaf missing from tour");
    };
    size_t ia = start(leaves[0]), ib = start(leaves[1]), ic = start(leaves[2]), id = start(leaves[3]);
    Rational a1 = plan.param_of(ia), a2 = plan.param_of(ic), a3 = plan.param_of(ib), a4 = plan.param_of(id);
    Rational b4 = plan.param_of(id + 1);
    Rational su = plan.param_of(plan.upper_ext), sl = plan.param_of(plan.lower_ext);
    Rational t = plan.t_split();
    bool ok = Rational(0) < a1 && a1 < su && su < a2 && a2 < t && t < a3 && a3 < sl && sl < a4 && a4 < b4 &&
              b4 < Rational(1);
    out.push_back({"leaf-order", ok,
                   "0<" + a1.str() + "<" + su.str() + "<" + a2.str() + "<" + t.str() + "<" + a3.str() + "<" +
                       sl.str() + "<" + a4.str() + "<" + b4.str() + "<1"});
    bool singleton = plan.pieces[plan.upper_ext].width == 0 && plan.pieces[plan.lower_ext].width == 0 &&
                     plan.pieces[plan.upper_ext].at == Cell{0, n} && plan.pieces[plan.lower_ext].at == Cell{n, 0};
    out.push_back({"singletons", singleton, "extension points have one-point preimages"});
  }
  return out;
}

// ---------------------------------------------------------------- families

size_t IntervalFamily::count(IntervalKind k) const {
  return static_cast<size_t>(std::count_if(items.begin(), items.end(), [&](const auto& i) { return i.kind == k; }));
}

namespace {

struct TemplatePiece {
  IntervalKind kind;
  int letter;  // child letter owning the vertex or edge
  bool left_side;
  bool forward;
  int width;
  Cell p, q;       // image endpoints in child lattice units
  int child_case;  // N pieces: refinement case of the child vertex at the next stage
};

struct Template {
  std::vector<TemplatePiece> pieces;
  int total_width = 0;
};

enum Range { kFull, kCase1, kCase2, kLFwd, kLBwd, kBFwd, kBBwd, kRangeCount };

struct ModelTemplates {
  Template range[kRangeCount];
  int up_count = 0;
  int right_count = 0;
};

struct Templates {
  int n;
  int alphabet;
  ModelTemplates model[3];
  std::map<Cell, int> letter_of[3];
};

// 1: right edge only, 2: up edge only, 3: neither, 4: both.
int case_of(bool right, bool up) {
  if (right && up) return 4;
  if (right) return 1;
  if (up) return 2;
  return 3;
}

Templates make_templates(int n) {
  Alphabet a(n);
  Templates t;
  t.n = n;
  t.alphabet = a.size();
  for (int model : {1, 2}) {
    for (int j = 1; j <= a.size(); ++j) t.letter_of[model][model_cell(n, model, j)] = j;
    std::set<UnitEdge> tree;
    for (const auto& e : model_edges(n, model)) tree.insert(e);
    auto vertex_case = [&](Cell v, bool has_b, bool has_l) {
      bool right = tree.count({v.i, v.j, false}) || (has_b && v == Cell{n - 1, 0});
      bool up = tree.count({v.i, v.j, true}) || (has_l && v == Cell{0, n - 1});
      return case_of(right, up);
    };
    TourPlan tau = build_tour(n, model, false);
    TourPlan ext = build_tour(n, model, true);
    auto make = [&](const TourPlan& plan, size_t lo, size_t hi, bool force_first_n, bool has_b, bool has_l) {
      Template tpl;
      for (size_t k = lo; k < hi; ++k) {
        const TourPiece& p = plan.pieces[k];
        TemplatePiece tp{};
        tp.width = p.width;
        if (p.kind == PieceKind::pause) {
          bool n_piece = p.first_visit || (force_first_n && k == lo);
          tp.kind = n_piece ? IntervalKind::N : IntervalKind::F;
          tp.letter = t.letter_of[model].at(p.at);
          tp.p = tp.q = p.at;
          tp.child_case = vertex_case(p.at, has_b, has_l);
        } else {
          tp.kind = IntervalKind::E;
          Cell lo_end = std::min(p.at, p.to);
          tp.left_side = p.at.i == p.to.i;
          tp.forward = p.at == lo_end;
          tp.letter = t.letter_of[model].at(lo_end);
          tp.p = p.at;
          tp.q = p.to;
        }
        tpl.total_width += tp.width;
        // The two halves of the middle origin pause form one closed interval.
        if (!tpl.pieces.empty() && tp.kind != IntervalKind::E && tpl.pieces.back().kind != IntervalKind::E) {
          auto& prev = tpl.pieces.back();
          prev.width += tp.width;
          if (tp.kind == IntervalKind::N) prev.kind = IntervalKind::N;
          continue;
        }
        tpl.pieces.push_back(tp);
      }
      return tpl;
    };
    ModelTemplates& mt = t.model[model];
    mt.range[kFull] = make(tau, 0, tau.pieces.size(), false, false, false);
    mt.range[kCase1] = make(tau, tau.first_origin, tau.mid_a + 1, false, true, false);
    mt.range[kCase2] = make(tau, tau.mid_b, tau.last_origin + 1, true, false, true);
    mt.range[kLFwd] = make(ext, ext.first_origin + 1, ext.upper_ext, false, false, true);
    mt.range[kLBwd] = make(ext, ext.upper_ext + 1, ext.mid_a, false, false, true);
    mt.range[kBFwd] = make(ext, ext.mid_b + 1, ext.lower_ext, false, true, false);
    mt.range[kBBwd] = make(ext, ext.lower_ext + 1, ext.last_origin, false, true, false);
    std::set<Cell> up_vertices, right_vertices;
    for (size_t k = tau.first_origin + 1; k < tau.mid_a; ++k)
      if (tau.pieces[k].kind == PieceKind::pause) up_vertices.insert(tau.pieces[k].at);
    for (size_t k = tau.mid_b + 1; k < tau.last_origin; ++k)
      if (tau.pieces[k].kind == PieceKind::pause) right_vertices.insert(tau.pieces[k].at);
    mt.up_count = static_cast<int>(up_vertices.size());
    mt.right_count = static_cast<int>(right_vertices.size());
    if (mt.up_count + mt.right_count != a.size() - 1) throw invariant_error("tour subtrees do not split T");
  }
  return t;
}

const Templates& templates(int n) {
  static std::mutex mu;
  static std::map<int, Templates> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, make_templates(n)).first;
  return it->second;
}

Range e_range(bool left_side, bool forward) {
  if (left_side) return forward ? kLFwd : kLBwd;
  return forward ? kBFwd : kBBwd;
}

void expand(const Template& tpl, const FamilyInterval& parent, uint64_t word, Cell corner, int n, int alphabet,
            std::vector<FamilyInterval>& out) {
  Rational len = parent.b - parent.a;
  int64_t acc = 0;
  for (const auto& tp : tpl.pieces) {
    FamilyInterval c;
    c.a = parent.a + len * Rational(acc, tpl.total_width);
    acc += tp.width;
    c.b = acc == tpl.total_width ? parent.b : parent.a + len * Rational(acc, tpl.total_width);
    c.kind = tp.kind;
    c.left_side = tp.left_side;
    c.forward = tp.forward;
    c.word = word * static_cast<uint64_t>(alphabet) + static_cast<uint64_t>(tp.letter - 1);
    c.p = {corner.i * n + tp.p.i, corner.j * n + tp.p.j};
    c.q = {corner.i * n + tp.q.i, corner.j * n + tp.q.j};
    if (c.kind == IntervalKind::F) c.word = 0;
    out.push_back(c);
  }
}

}  // namespace

IntervalFamily initial_family(int n) {
  Alphabet a(n);
  IntervalFamily f;
  f.n = n;
  f.stage = 0;
  FamilyInterval root;
  root.a = Rational(0);
  root.b = Rational(1);
  root.kind = IntervalKind::N;
  root.word = 0;
  root.p = root.q = {0, 0};
  f.items.push_back(root);
  return f;
}

IntervalFamily subdivide(const IntervalFamily& fam, const ChoiceFunction& eta) {
  const int n = fam.n;
  const Templates& t = templates(n);
  const int A = t.alphabet;
  const size_t m = static_cast<size_t>(fam.stage);
  uint64_t words = static_cast<uint64_t>(ipow(A, static_cast<int>(m)));
  std::vector<uint8_t> sides(words, 0);  // bit 0: e_b in T_m, bit 1: e_l in T_m
  for (const auto& it : fam.items)
    if (it.kind == IntervalKind::E) sides[it.word] |= it.left_side ? 2 : 1;

  IntervalFamily next;
  next.n = n;
  next.stage = fam.stage + 1;
  next.items.reserve(fam.items.size() * static_cast<size_t>(A) / 2 + 16);
  Alphabet alpha_n(n);
  for (const auto& it : fam.items) {
    if (it.kind == IntervalKind::F) {
      FamilyInterval c = it;
      c.p = {it.p.i * n, it.p.j * n};
      c.q = c.p;
      next.items.push_back(c);
      continue;
    }
    Word w = word_from_index(alpha_n, it.word, m);
    int model = eta(w);
    const ModelTemplates& mt = t.model[model];
    if (it.kind == IntervalKind::N) {
      int cs = case_of(sides[it.word] & 1, sides[it.word] & 2);
      if (cs == 4) {
        FamilyInterval c = it;
        c.word = it.word * static_cast<uint64_t>(A);  // letter 1 owns the origin corner
        c.p = {it.p.i * n, it.p.j * n};
        c.q = c.p;
        next.items.push_back(c);
        continue;
      }
      const Template& tpl = mt.range[cs == 1 ? kCase1 : (cs == 2 ? kCase2 : kFull)];
      expand(tpl, it, it.word, it.p, n, A, next.items);
      continue;
    }
    Cell corner = it.forward ? it.p : it.q;
    expand(mt.range[e_range(it.left_side, it.forward)], it, it.word, corner, n, A, next.items);
  }
  return next;
}

IntervalFamily build_family(int n, const ChoiceFunction& eta, int m, uint64_t budget) {
  Alphabet a(n);
  if (std::pow(static_cast<long double>(a.size()), m) * 6 > static_cast<long double>(budget))
    throw budget_error("build_family: stage exceeds budget");
  IntervalFamily f = initial_family(n);
  for (int s = 0; s < m; ++s) f = subdivide(f, eta);
  return f;
}

namespace {

size_t locate(const IntervalFamily& fam, const Rational& t) {
  // Last interval whose left endpoint is <= t; closed intervals own shared endpoints.
  auto it = std::upper_bound(fam.items.begin(), fam.items.end(), t,
                             [](const Rational& v, const FamilyInterval& i) { return v < i.a; });
  size_t k = static_cast<size_t>(it - fam.items.begin()) - 1;
  if (fam.items[k].a == t && fam.items[k].kind == IntervalKind::E && k > 0) --k;
  return k;
}

Point2 lattice_to_point(const Cell& c, int64_t scale) { return {Rational(c.i, scale), Rational(c.j, scale)}; }

Point2 interval_value(const FamilyInterval& it, const Rational& t, int64_t scale) {
  Point2 p = lattice_to_point(it.p, scale);
  if (it.kind != IntervalKind::E) return p;
  Point2 q = lattice_to_point(it.q, scale);
  Rational s = (t - it.a) / (it.b - it.a);
  return p + s * (q - p);
}

}  // namespace

Point2 eval_f(const IntervalFamily& fam, const Rational& t) {
  if (t < Rational(0) || t > Rational(1)) throw precondition_error("eval_f: t outside [0,1]");
  size_t k = locate(fam, t);
  return interval_value(fam.items[k], t, ipow(fam.n, fam.stage));
}

std::vector<PropertyCheck> check_properties(const IntervalFamily& fam, const IntervalFamily& next,
                                            const ChoiceFunction& eta) {
  const int n = fam.n;
  Alphabet a(n);
  const int m = fam.stage;
  const uint64_t words = static_cast<uint64_t>(ipow(a.size(), m));
  const int64_t scale = ipow(n, m);
  std::vector<PropertyCheck> out;
  auto corner_of = [&](uint64_t w) { return phi_corner(n, eta, word_from_index(a, w, static_cast<size_t>(m))); };

  // P1
  {
    std::vector<bool> hit(words, false);
    bool ok = true;
    size_t count = 0;
    for (const auto& it : fam.items) {
      if (it.kind != IntervalKind::N) continue;
      ++count;
      if (it.word >= words || hit[it.word]) ok = false;
      else hit[it.word] = true;
    }
    ok = ok && count == words;
    out.push_back({"P1", ok, std::to_string(count) + " vertex intervals for " + std::to_string(words) + " words"});
  }
  // P2
  {
    bool ok = !fam.items.empty() && fam.items.front().a == Rational(0) && fam.items.back().b == Rational(1) &&
              fam.items.front().kind != IntervalKind::E && fam.items.back().kind != IntervalKind::E;
    std::string detail = "exact partition of [0,1]";
    for (size_t k = 0; k < fam.items.size() && ok; ++k) {
      const auto& it = fam.items[k];
      if (!(it.a < it.b)) {
        ok = false;
        detail = "degenerate interval at index " + std::to_string(k);
      }
      if (k + 1 < fam.items.size()) {
        const auto& nx = fam.items[k + 1];
        bool closed_here = it.kind != IntervalKind::E, closed_next = nx.kind != IntervalKind::E;
        if (!(it.b == nx.a) || closed_here == closed_next) {
          ok = false;
          detail = "gap or overlap after index " + std::to_string(k);
        }
      }
    }
    out.push_back({"P2", ok, detail});
  }
  // P3 and the edge set of T_m
  {
    bool ok = true;
    std::string detail = "edge intervals map linearly onto their edges, in opposite pairs";
    std::map<std::pair<uint64_t, bool>, std::pair<int, int>> pairs;
    for (const auto& it : fam.items) {
      if (it.kind != IntervalKind::E) continue;
      Cell c = corner_of(it.word);
      Cell end = it.left_side ? Cell{c.i, c.j + 1} : Cell{c.i + 1, c.j};
      Cell from = it.forward ? c : end, to = it.forward ? end : c;
      if (!(it.p == from) || !(it.q == to)) {
        ok = false;
        detail = "edge interval image mismatch for word " + std::to_string(it.word);
      }
      auto& pr = pairs[{it.word, it.left_side}];
      (it.forward ? pr.first : pr.second) += 1;
    }
    for (const auto& [key, pr] : pairs) {
      if (pr.first != 1 || pr.second != 1) {
        ok = false;
        detail = "edge without exactly two opposite intervals";
      }
    }
    DendriteGraph tm = build_Tm(n, eta, m);
    auto labels = classify_edges(eta, tm);
    if (labels.size() != pairs.size()) {
      ok = false;
      detail = "T_m has " + std::to_string(labels.size()) + " edges, families cover " + std::to_string(pairs.size());
    }
    for (const auto& l : labels) {
      if (!pairs.count({word_index(a, l.word), l.left_side})) {
        ok = false;
        detail = "T_m edge not covered by edge intervals";
      }
    }
    out.push_back({"P3", ok, detail});
  }
  // P4 and P5
  std::set<Cell> vm;
  for (uint64_t w = 0; w < words; ++w) vm.insert(corner_of(w));
  {
    bool ok = true;
    for (const auto& it : fam.items)
      if (it.kind == IntervalKind::N && !(it.p == corner_of(it.word))) ok = false;
    out.push_back({"P4", ok, "vertex intervals map to their cell corners"});
  }
  {
    bool ok = true;
    std::string detail = "frozen intervals are constant at T_m vertices and persist";
    std::set<std::pair<Rational, Rational>> next_f;
    for (const auto& it : next.items)
      if (it.kind == IntervalKind::F) next_f.insert({it.a, it.b});
    for (const auto& it : fam.items) {
      if (it.kind != IntervalKind::F) continue;
      if (!vm.count(it.p) || !next_f.count({it.a, it.b})) {
        ok = false;
        detail = "frozen interval moved or off V_m";
      }
    }
    out.push_back({"P5", ok, detail});
  }
  // P6 and the cell containment of f_{m+1} on each parent
  {
    bool ok = true;
    std::string detail = "stage m+1 intervals nest and extend labels; images stay in the half-open cell";
    for (const auto& it : next.items) {
      size_t k = locate(fam, it.a);
      if (fam.items[k].b <= it.a) ++k;
      const auto& par = fam.items[k];
      if (!(par.a <= it.a && it.b <= par.b)) {
        ok = false;
        detail = "interval not nested";
        break;
      }
      if (par.kind == IntervalKind::F) {
        if (it.kind != IntervalKind::F) {
          ok = false;
          detail = "frozen parent refined";
        }
        continue;
      }
      if (it.kind != IntervalKind::F && it.word / static_cast<uint64_t>(a.size()) != par.word) {
        ok = false;
        detail = "child label does not extend the parent label";
      }
      Cell c = corner_of(par.word);
      Cell lo{c.i * n, c.j * n};
      auto in_closed = [&](Cell p) { return p.i >= lo.i && p.j >= lo.j && p.i <= lo.i + n && p.j <= lo.j + n; };
      auto in_half_open2 = [&](int64_t x2, int64_t y2) {
        return x2 >= 2 * lo.i && y2 >= 2 * lo.j && x2 < 2 * (lo.i + n) && y2 < 2 * (lo.j + n);
      };
      bool inside = it.kind == IntervalKind::E ? (in_closed(it.p) && in_closed(it.q) &&
                                                  in_half_open2(it.p.i + it.q.i, it.p.j + it.q.j))
                                               : in_half_open2(2 * it.p.i, 2 * it.p.j);
      if (!inside) {
        ok = false;
        detail = "child image leaves the parent cell";
      }
    }
    out.push_back({"P6", ok, detail});
  }
  // P7
  {
    DendriteGraph t_next = build_Tm(n, eta, m + 1);
    bool ok = true;
    size_t j = 0;
    for (const auto& e : fam.items) {
      if (e.kind != IntervalKind::E) continue;
      bool found = false;
      while (j < next.items.size() && next.items[j].b <= e.a) ++j;
      for (size_t k = j; k < next.items.size() && next.items[k].a < e.b; ++k) {
        const auto& c = next.items[k];
        if (c.kind == IntervalKind::N && t_next.degree(c.p) == 1) found = true;
      }
      if (!found) ok = false;
    }
    out.push_back({"P7", ok, "every edge interval contains a leaf interval at the next stage"});
  }
  // Uniform step bound |f_m - f_{m+1}| <= sqrt(2) n^{-m} at all breakpoints.
  {
    bool ok = true;
    Rational bound2 = Rational(2, checked_mul(scale, scale));
    Rational worst(0);
    int64_t next_scale = ipow(n, m + 1);
    for (const auto& it : next.items) {
      for (const Rational& t : {it.a, it.b}) {
        Point2 fm = eval_f(fam, t);
        Point2 fn = interval_value(it, t, next_scale);
        Rational d = dist2(fm, fn);
        worst = std::max(worst, d);
        if (d > bound2) ok = false;
      }
    }
    out.push_back({"step", ok, "max |f_m - f_{m+1}|^2 = " + worst.str() + " <= " + bound2.str()});
  }
  return out;
}

// ---------------------------------------------------------------- reparametrization

ParamMap::ParamMap(int n, const ChoiceFunction& eta, int stage, int mass_depth)
    : ParamMap(build_family(n, eta, stage), eta, mass_depth) {}

ParamMap::ParamMap(IntervalFamily fam, const ChoiceFunction& eta, int mass_depth)
    : fam_(std::move(fam)), mass_depth_(mass_depth) {
  if (mass_depth_ < fam_.stage) throw precondition_error("ParamMap: mass depth below stage");
  compute_masses(eta);
}

void ParamMap::compute_masses(const ChoiceFunction& eta) {
  const int n = fam_.n;
  const Templates& t = templates(n);
  const int A = t.alphabet;
  const int M = mass_depth_;
  Alphabet alpha_n(n);
  std::vector<Rational> c(static_cast<size_t>(M) + 2);
  for (int j = 0; j <= M + 1; ++j) c[static_cast<size_t>(j)] = Rational(1, ipow(A, j));

  // Mass of the up-subtree part of cell w at depth j.
  auto up = [&](Word& w, int j) -> Rational {
    Rational acc(0);
    size_t base = w.size();
    while (j < M) {
      acc += Rational(t.model[eta(w)].up_count) * c[static_cast<size_t>(j) + 1];
      w.push_back(1);
      ++j;
    }
    acc += c[static_cast<size_t>(j)] / Rational(2);
    w.resize(base);
    return acc;
  };
  auto side_mass = [&](Word& w, int j, bool left) {
    Rational u = up(w, j);
    return left ? u : c[static_cast<size_t>(j)] - u;
  };
  auto n_mass = [&](Word& w, int j, int cs) -> Rational {
    switch (cs) {
      case 3: return c[static_cast<size_t>(j)];
      case 1: return up(w, j);
      case 2: return c[static_cast<size_t>(j)] - up(w, j);
      default: return Rational(0);
    }
  };
  auto e_mass = [&](auto&& self, Word& w, int j, bool left, bool forward) -> Rational {
    if (j >= M) return side_mass(w, j, left) / Rational(2);
    const Template& tpl = t.model[eta(w)].range[e_range(left, forward)];
    Rational acc(0);
    for (const auto& tp : tpl.pieces) {
      if (tp.kind == IntervalKind::F) continue;
      w.push_back(tp.letter);
      if (tp.kind == IntervalKind::N) {
        acc += n_mass(w, j + 1, tp.child_case);
      } else {
        acc += self(self, w, j + 1, tp.left_side, tp.forward);
      }
      w.pop_back();
    }
    return acc;
  };

  const int m = fam_.stage;
  std::vector<uint8_t> sides(static_cast<size_t>(ipow(A, m)), 0);
  for (const auto& it : fam_.items)
    if (it.kind == IntervalKind::E) sides[it.word] |= it.left_side ? 2 : 1;
  mass_.resize(fam_.items.size());
  Word w;
  for (size_t k = 0; k < fam_.items.size(); ++k) {
    const auto& it = fam_.items[k];
    if (it.kind == IntervalKind::F) {
      mass_[k] = Rational(0);
      continue;
    }
    w = word_from_index(alpha_n, it.word, static_cast<size_t>(m));
    if (it.kind == IntervalKind::N) {
      mass_[k] = n_mass(w, m, case_of(sides[it.word] & 1, sides[it.word] & 2));
    } else {
      mass_[k] = e_mass(e_mass, w, m, it.left_side, it.forward);
    }
  }
  cum_.assign(fam_.items.size() + 1, Rational(0));
  cum_ld_.assign(fam_.items.size() + 1, 0.0L);
  for (size_t k = 0; k < mass_.size(); ++k) {
    cum_[k + 1] = cum_[k] + mass_[k];
    cum_ld_[k + 1] = cum_[k + 1].to_long_double();
  }
  if (cum_.back() != Rational(1)) throw invariant_error("reparametrization masses do not sum to 1: " + cum_.back().str());
}

Point2 ParamMap::eval(const Rational& t) const {
  if (t < Rational(0) || t > Rational(1)) throw precondition_error("eval: t outside [0,1]");
  // First interval with positive mass whose cumulative range contains t.
  auto it = std::upper_bound(cum_.begin(), cum_.end(), t);
  size_t k = it == cum_.end() ? mass_.size() - 1 : static_cast<size_t>(it - cum_.begin()) - 1;
  while (k > 0 && mass_[k].sign() == 0) --k;
  const auto& iv = fam_.items[k];
  int64_t scale = ipow(fam_.n, fam_.stage);
  Point2 p = lattice_to_point(iv.p, scale);
  if (iv.kind != IntervalKind::E) return p;
  Point2 q = lattice_to_point(iv.q, scale);
  Rational s = (t - cum_[k]) / mass_[k];
  if (s > Rational(1)) s = Rational(1);
  return p + s * (q - p);
}

std::array<double, 2> ParamMap::eval(double t) const {
  long double tl = std::clamp(static_cast<long double>(t), 0.0L, 1.0L);
  auto it = std::upper_bound(cum_ld_.begin(), cum_ld_.end(), tl);
  size_t k = it == cum_ld_.end() ? mass_.size() - 1 : static_cast<size_t>(it - cum_ld_.begin()) - 1;
  if (k >= mass_.size()) k = mass_.size() - 1;
  while (k > 0 && mass_[k].sign() == 0) --k;
  const auto& iv = fam_.items[k];
  long double scale = std::pow(static_cast<long double>(fam_.n), fam_.stage);
  long double px = iv.p.i / scale, py = iv.p.j / scale;
  if (iv.kind != IntervalKind::E) return {static_cast<double>(px), static_cast<double>(py)};
  long double s = (tl - cum_ld_[k]) / (cum_ld_[k + 1] - cum_ld_[k]);
  s = std::clamp(s, 0.0L, 1.0L);
  long double qx = iv.q.i / scale, qy = iv.q.j / scale;
  return {static_cast<double>(px + s * (qx - px)), static_cast<double>(py + s * (qy - py))};
}

double ParamMap::error_radius() const { return std::sqrt(2.0) * std::pow(static_cast<double>(fam_.n), -fam_.stage); }

HolderReport holder_constant(const ParamMap& map, size_t sample_count, uint64_t seed) {
  const int n = map.family().n;
  HolderReport rep;
  rep.exponent = 1.0 / alpha(n);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto& cum = map.cumulative();
  const auto& mass = map.masses();
  std::vector<size_t> positive;
  for (size_t k = 0; k < mass.size(); ++k)
    if (mass[k].sign() > 0) positive.push_back(k);
  std::uniform_int_distribution<size_t> pick(0, positive.size() - 1);
  auto consider = [&](double s, double t) {
    if (s > t) std::swap(s, t);
    s = std::clamp(s, 0.0, 1.0);
    t = std::clamp(t, 0.0, 1.0);
    if (!(t > s)) return;
    auto fs = map.eval(s), ft = map.eval(t);
    double d = std::hypot(fs[0] - ft[0], fs[1] - ft[1]);
    double ratio = d / std::pow(t - s, rep.exponent);
    ++rep.pairs;
    if (ratio > rep.constant) {
      rep.constant = ratio;
      rep.worst_s = s;
      rep.worst_t = t;
    }
  };
  for (size_t i = 0; i < sample_count; ++i) {
    switch (i % 4) {
      case 0: consider(unit(rng), unit(rng)); break;
      case 1: {
        double s = unit(rng);
        double delta = std::pow(10.0, -1.0 - 8.0 * unit(rng));
        consider(s, s + delta);
        break;
      }
      case 2: {
        // Pair straddling the boundary between two positive-mass intervals.
        size_t idx = positive[pick(rng)];
        size_t before = idx;
        size_t after = idx + 1;
        while (after < mass.size() && mass[after].sign() == 0) ++after;
        if (after >= mass.size()) break;
        double b = cum[idx + 1].to_double();
        double s = b - unit(rng) * mass[before].to_double();
        double t = cum[after].to_double() + unit(rng) * mass[after].to_double();
        consider(s, t);
        break;
      }
      default: {
        size_t idx = positive[pick(rng)];
        consider(cum[idx].to_double(), cum[idx + 1].to_double());
        break;
      }
    }
  }
  return rep;
}

}  // namespace ftl
