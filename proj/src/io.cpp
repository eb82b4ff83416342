#include "ftl/io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "ftl/errors.hpp"

namespace ftl {

namespace {

// Converts json access failures into precondition errors with context.
template <class F>
auto guarded(const char* what, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw precondition_error(std::string(what) + ": " + e.what());
  }
}

}  // namespace

json to_json(const CheckRecord& c) {
  return json{{"name", c.name},     {"anchor", c.anchor}, {"measured", c.measured},
              {"bound", c.bound},   {"pass", c.pass},     {"detail", c.detail}};
}

json to_json(const std::vector<CheckRecord>& checks) {
  json arr = json::array();
  for (const auto& c : checks) arr.push_back(to_json(c));
  return arr;
}

json to_json(const Rational& r) { return r.str(); }

Rational rational_from_json(const json& j) {
  if (j.is_number_integer()) return Rational(j.get<int64_t>());
  if (j.is_string()) return Rational::parse(j.get<std::string>());
  throw precondition_error("rational must be an integer or a \"p/q\" string");
}

json to_json(const CellSet& s) {
  json cells = json::array();
  for (const auto& c : s.cells()) cells.push_back({c.i, c.j});
  return json{{"base", s.base()},
              {"depth", s.depth()},
              {"offset", {to_json(s.offset()[0]), to_json(s.offset()[1])}},
              {"cells", std::move(cells)}};
}

CellSet cellset_from_json(const json& j) {
  return guarded("cell set", [&] {
    std::vector<Cell> cells;
    for (const auto& c : j.at("cells")) cells.push_back({c.at(0).get<int64_t>(), c.at(1).get<int64_t>()});
    Point2 offset{Rational(0), Rational(0)};
    if (j.contains("offset")) offset = {rational_from_json(j["offset"].at(0)), rational_from_json(j["offset"].at(1))};
    return CellSet(j.at("base").get<int64_t>(), j.at("depth").get<int>(), std::move(cells), offset);
  });
}

json to_json(const PointCloud& c) {
  json pts = json::array();
  for (size_t i = 0; i < c.size(); ++i) {
    json p = json::array();
    for (int d = 0; d < c.dim(); ++d) p.push_back(to_json(c.coord(i, d)));
    pts.push_back(std::move(p));
  }
  return json{{"resolution", to_json(c.resolution())}, {"points", std::move(pts)}};
}

PointCloud pointcloud_from_json(const json& j) {
  return guarded("point cloud", [&] {
    std::vector<std::vector<Rational>> pts;
    for (const auto& p : j.at("points")) {
      std::vector<Rational> q;
      for (const auto& x : p) q.push_back(rational_from_json(x));
      if (!pts.empty() && q.size() != pts[0].size()) throw precondition_error("point cloud: mixed dimensions");
      pts.push_back(std::move(q));
    }
    return PointCloud::from_points(pts, rational_from_json(j.at("resolution")));
  });
}

json to_json(const PlantSpec& s) {
  json occ = json::array();
  for (const auto& o : s.occurrences) occ.push_back({{"ell", o.ell}, {"N", o.big_n}, {"k", o.k}});
  return json{{"n", s.n}, {"word", word_str(s.word.prefix)}, {"tail", s.word.tail}, {"occurrences", occ}};
}

PlantSpec plantspec_from_json(const json& j) {
  return guarded("plant spec", [&] {
    PlantSpec s;
    s.n = j.at("n").get<int>();
    s.word.prefix = word_parse(j.at("word").get<std::string>());
    s.word.tail = j.value("tail", 0);
    for (const auto& o : j.at("occurrences"))
      s.occurrences.push_back({o.at("ell").get<size_t>(), o.at("N").get<size_t>(), o.at("k").get<size_t>()});
    validate_plant_spec(Alphabet(s.n), s);
    return s;
  });
}

json to_json(const Approximation& a) {
  json pts = json::array();
  for (const auto& m : a.w) pts.push_back(m);
  json reach = json::array();
  for (bool b : a.component_reaches_boundary) reach.push_back(b);
  return json{{"j", a.j},
              {"dim", a.dim},
              {"unit", to_json(Rational(1, int64_t{1} << a.j))},
              {"w", std::move(pts)},
              {"label", a.label},
              {"components", a.components},
              {"component_reaches_boundary", std::move(reach)},
              {"all_reach_boundary", a.all_reach_boundary()}};
}

json to_json(const GridGraph& g) {
  json verts = json::array();
  for (size_t i = 0; i < g.vertex_count(); ++i) verts.push_back(g.vertex(i));
  return json{{"dim", g.dim()},
              {"k", g.k()},
              {"vertices", std::move(verts)},
              {"edges", g.edge_count()},
              {"length", to_json(g.length())},
              {"length_bound", to_json(g.length_bound())},
              {"in_family", g.in_family()},
              {"hash", fmt::format("{:016x}", g.content_hash())}};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  std::error_code ec;
  if (target.has_parent_path()) {
    fs::create_directories(target.parent_path(), ec);
    if (ec) throw io_error("cannot create directory for " + path + ": " + ec.message());
  }
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw io_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw io_error("cannot move output into place: " + path);
  }
}

namespace {

std::string svg_open(double size, double x0, double y0, double w, double h) {
  return fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{0}\" viewBox=\"{1} {2} {3} {4}\">\n",
      size, x0, y0, w, h);
}

}  // namespace

std::string svg_cells(const CellSet& s, const SvgStyle& style) {
  if (s.size() == 0) throw domain_error("cell set is empty");
  auto b = s.index_bounds();
  double w = static_cast<double>(std::max(b[2] - b[0], b[3] - b[1]) + 1);
  // Lattice units with y flipped so that the picture matches the usual orientation.
  std::string out = svg_open(style.size, static_cast<double>(b[0]), -static_cast<double>(b[1]) - w, w, w);
  out += fmt::format("<g fill=\"{}\" shape-rendering=\"crispEdges\">\n", style.fill);
  for (const auto& c : s.cells())
    out += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"1\" height=\"1\"/>\n", c.i, -c.j - 1);
  out += "</g>\n</svg>\n";
  return out;
}

std::string svg_polyline(const std::vector<std::array<double, 2>>& pts, double lo, double hi,
                         const SvgStyle& style) {
  if (pts.empty()) throw domain_error("polyline is empty");
  double w = hi - lo;
  std::string out = svg_open(style.size, lo, -hi, w, w);
  out += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"{}\" points=\"", style.stroke,
                     style.stroke_width * w / style.size);
  for (size_t i = 0; i < pts.size(); ++i)
    out += fmt::format("{}{:.6f},{:.6f}", i ? " " : "", pts[i][0], -pts[i][1]);
  out += "\"/>\n</svg>\n";
  return out;
}

std::string svg_graph(const GridGraph& g, const SvgStyle& style) {
  if (g.dim() != 2) throw precondition_error("svg rendering needs a planar graph");
  double half = static_cast<double>(int64_t{1} << g.k());
  std::string out = svg_open(style.size, -half - 1, -half - 1, 2 * half + 2, 2 * half + 2);
  out += fmt::format("<g stroke=\"{}\" stroke-width=\"{}\" stroke-linecap=\"round\">\n", style.stroke,
                     style.stroke_width * (2 * half + 2) / style.size);
  for (const auto& [i, axis] : g.edges()) {
    auto m = g.vertex(i);
    int64_t x2 = m[0] + (axis == 0), y2 = m[1] + (axis == 1);
    out += fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>\n", m[0], -m[1], x2, -y2);
  }
  out += "</g>\n</svg>\n";
  return out;
}

}  // namespace ftl
