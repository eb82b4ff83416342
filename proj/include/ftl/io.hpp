#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "ftl/rational.hpp"
#include "ftl/setops.hpp"
#include "ftl/symbolic.hpp"
#include "ftl/universal.hpp"

namespace ftl {

using json = nlohmann::json;

// One machine-readable check: what was measured, against which bound, and whether it held.
struct CheckRecord {
  std::string name;
  std::string anchor;  // statement the check is tied to
  double measured = 0;
  double bound = 0;
  bool pass = false;
  std::string detail;
};

json to_json(const CheckRecord& c);
json to_json(const std::vector<CheckRecord>& checks);

json to_json(const Rational& r);  // string "p/q"
Rational rational_from_json(const json& j);

json to_json(const CellSet& s);
CellSet cellset_from_json(const json& j);

json to_json(const PointCloud& c);
PointCloud pointcloud_from_json(const json& j);

json to_json(const PlantSpec& s);
PlantSpec plantspec_from_json(const json& j);

json to_json(const Approximation& a);
json to_json(const GridGraph& g);

// Stable text: sorted keys, two-space indent, trailing newline.
std::string dump(const json& j);

std::string read_file(const std::string& path);
// Writes through a temporary file in the same directory and renames it into place.
void write_file(const std::string& path, const std::string& content);

struct SvgStyle {
  double size = 512;   // output width and height in px
  std::string fill = "#1f3b57";
  std::string stroke = "#c0392b";
  double stroke_width = 1.0;
};

// Cells of a set, viewport fitted to the lattice bounds.
std::string svg_cells(const CellSet& s, const SvgStyle& style = {});
// Polyline through the points; view box [lo, hi]^2.
std::string svg_polyline(const std::vector<std::array<double, 2>>& pts, double lo, double hi,
                         const SvgStyle& style = {});
// Edges of a planar grid graph.
std::string svg_graph(const GridGraph& g, const SvgStyle& style = {});

}  // namespace ftl
