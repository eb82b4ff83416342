// Command-line front end.
// Exit codes: 0 ok, 1 check failure, 2 usage or config error, 3 IO error, 4 budget exceeded.

#include <filesystem>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "ftl/acceptance.hpp"
#include "ftl/carpet.hpp"
#include "ftl/dendrite.hpp"
#include "ftl/errors.hpp"
#include "ftl/io.hpp"
#include "ftl/tangent.hpp"
#include "ftl/universal.hpp"

namespace {

using namespace ftl;

enum Exit : int { kOk = 0, kCheckFailed = 1, kUsage = 2, kIo = 3, kBudget = 4 };

struct Globals {
  uint64_t seed = 7;
  uint64_t budget_cells = 20'000'000;
  std::string out_dir = ".";
};

// Files are collected first and written only after the command succeeded.
struct Outputs {
  std::vector<std::pair<std::string, std::string>> files;
  void add(const Globals& g, const std::string& name, std::string content) {
    if (name.empty()) return;
    std::filesystem::path p(name);
    if (p.is_relative()) p = std::filesystem::path(g.out_dir) / p;
    files.emplace_back(p.lexically_normal().string(), std::move(content));
  }
  void flush() const {
    for (const auto& [path, content] : files) write_file(path, content);
  }
};

ChoiceFunction make_eta(const std::string& kind, uint64_t seed) {
  if (kind == "seeded") return ChoiceFunction::seeded(seed);
  if (kind == "1") return ChoiceFunction::constant(1);
  if (kind == "2") return ChoiceFunction::constant(2);
  throw precondition_error("eta must be seeded, 1 or 2");
}

json checks_report(const std::string& command, const std::vector<CheckRecord>& checks, json extra = json::object()) {
  bool ok = std::all_of(checks.begin(), checks.end(), [](const CheckRecord& c) { return c.pass; });
  extra["command"] = command;
  extra["checks"] = to_json(checks);
  extra["pass"] = ok;
  return extra;
}

bool all_pass(const std::vector<CheckRecord>& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const CheckRecord& c) { return c.pass; });
}

// ---------------------------------------------------------------- carpet

struct CarpetArgs {
  int n = 4;
  int depth = 3;
  std::string eta = "seeded";
  std::string out = "carpet.json";
  std::string svg;
  std::string in;  // render only
};

int carpet_build(const Globals& g, const CarpetArgs& a) {
  Outputs o;
  ChoiceFunction eta = make_eta(a.eta, g.seed);
  CarpetApprox c = approx_cells(a.n, eta, a.depth, g.budget_cells);
  json j{{"n", a.n}, {"depth", a.depth}, {"eta", a.eta}, {"seed", g.seed}, {"count", c.cells.size()},
         {"cells", to_json(c.cells)}};
  o.add(g, a.out, dump(j));
  if (!a.svg.empty()) o.add(g, a.svg, svg_cells(c.cells));
  o.flush();
  std::cout << c.cells.size() << " cells\n";
  return kOk;
}

int carpet_render(const Globals& g, const CarpetArgs& a) {
  if (a.in.empty()) throw precondition_error("carpet render needs --in");
  json j;
  try {
    j = json::parse(read_file(a.in));
  } catch (const json::parse_error& e) {
    throw precondition_error(std::string("cannot parse ") + a.in + ": " + e.what());
  }
  CellSet s = cellset_from_json(j.contains("cells") && j["cells"].is_object() ? j["cells"] : j);
  Outputs o;
  o.add(g, a.svg.empty() ? "carpet.svg" : a.svg, svg_cells(s));
  o.flush();
  return kOk;
}

// ---------------------------------------------------------------- param

struct ParamArgs {
  int n = 4;
  int stage = 3;
  int mass_depth = -1;
  std::string eta = "seeded";
  std::string t = "1/2";
  int samples = 2000;
  std::string out;
  std::string svg;
};

int param_eval(const Globals& g, const ParamArgs& a) {
  ChoiceFunction eta = make_eta(a.eta, g.seed);
  ParamMap map(a.n, eta, a.stage, a.mass_depth >= 0 ? a.mass_depth : a.stage + 1);
  Rational t = Rational::parse(a.t);
  Point2 p = map.eval(t);
  std::cout << p[0].str() << " " << p[1].str() << "\n";
  if (!a.out.empty()) {
    Outputs o;
    o.add(g, a.out,
          dump(json{{"n", a.n}, {"stage", a.stage}, {"t", t.str()}, {"point", {p[0].str(), p[1].str()}},
                    {"error_radius", map.error_radius()}}));
    o.flush();
  }
  return kOk;
}

int param_curve(const Globals& g, const ParamArgs& a) {
  if (a.samples < 1) throw precondition_error("samples must be positive");
  ChoiceFunction eta = make_eta(a.eta, g.seed);
  ParamMap map(a.n, eta, a.stage, a.mass_depth >= 0 ? a.mass_depth : a.stage + 1);
  std::vector<std::array<double, 2>> pts;
  json arr = json::array();
  for (int i = 0; i <= a.samples; ++i) {
    Point2 p = map.eval(Rational(i, a.samples));
    pts.push_back({p[0].to_double(), p[1].to_double()});
    arr.push_back({p[0].str(), p[1].str()});
  }
  Outputs o;
  o.add(g, a.out.empty() ? "curve.json" : a.out,
        dump(json{{"n", a.n}, {"stage", a.stage}, {"samples", a.samples}, {"points", arr}}));
  if (!a.svg.empty()) o.add(g, a.svg, svg_polyline(pts, -0.05, 1.05));
  o.flush();
  std::cout << pts.size() << " points\n";
  return kOk;
}

// ---------------------------------------------------------------- tangent

struct TangentArgs {
  int n = 4;
  int k = 1;
  int extra = 1;
  std::string spec;  // plant spec JSON; default is the built-in profile spec
  std::vector<std::string> radii{"1", "2"};
  bool no_window = false;
  std::string out;
  std::string svg;
};

int tangent_cutcount(const Globals& g, const TangentArgs& a) {
  uint64_t got = count_local_cut_points(a.n, a.k, g.budget_cells);
  uint64_t want = cut_point_formula(a.n, a.k);
  std::cout << got << "\n";
  if (!a.out.empty()) {
    Outputs o;
    o.add(g, a.out,
          dump(checks_report("tangent cutcount",
                             {{"cut points", "local cut points of K^{n,k} = ((5n-6)^k-1)/(5n-7)",
                               static_cast<double>(got), static_cast<double>(want), got == want, ""}},
                             json{{"n", a.n}, {"k", a.k}})));
    o.flush();
  }
  return got == want ? kOk : kCheckFailed;
}

int tangent_blowup(const Globals& g, const TangentArgs& a) {
  PlantSpec spec = acceptance_profile_spec();
  if (!a.spec.empty()) {
    try {
      spec = plantspec_from_json(json::parse(read_file(a.spec)));
    } catch (const json::parse_error& e) {
      throw precondition_error(std::string("cannot parse ") + a.spec + ": " + e.what());
    }
  }
  BlowupOptions opt;
  opt.budget = g.budget_cells;
  opt.window = !a.no_window;
  opt.radii.clear();
  for (const auto& r : a.radii) opt.radii.push_back(Rational::parse(r));
  std::vector<BlowupRow> rows = blowup_pipeline(spec, g.seed, opt);
  std::vector<CheckRecord> checks;
  json jrows = json::array();
  for (const auto& r : rows) {
    std::string tag = fmt::format("N={} k={}", r.occ.big_n, r.occ.k);
    checks.push_back({tag + " shift", "|y_N - x_N| <= n^{-N-k+3}", r.shift.value(), r.shift_bound.to_double(),
                      r.shift_ok, ""});
    if (r.window_computed)
      checks.push_back({tag + " window", "Hausdorff distance in the unit window <= n^{-N-k+4}",
                        r.window_hausdorff.value(), r.window_bound.to_double(), r.window_ok, ""});
    checks.push_back({tag + " collar", "cell of w(ell) stays 1/n inside the collar cell", r.collar_gap.to_double(),
                      r.collar_bound.to_double(), r.collar_ok, ""});
    json aw = json::array();
    for (const auto& e : r.aw)
      aw.push_back({{"radius", e.radius.str()},
                    {"x_over_y", e.x_over_y.value()},
                    {"y_over_x", e.y_over_x.value()},
                    {"resolution", e.resolution.str()}});
    json offs = json::array();
    for (const auto& c : r.offsets) offs.push_back({c.i, c.j});
    jrows.push_back({{"ell", r.occ.ell},
                     {"N", r.occ.big_n},
                     {"k", r.occ.k},
                     {"structural", r.structural},
                     {"x_N", {r.x_n[0].str(), r.x_n[1].str()}},
                     {"y_N", {r.y_n[0].str(), r.y_n[1].str()}},
                     {"aw", aw},
                     {"offsets", offs}});
    std::cout << fmt::format("{}: shift {:.6g} window {:.6g}\n", tag, r.shift.value(),
                             r.window_computed ? r.window_hausdorff.value() : 0.0);
  }
  Outputs o;
  o.add(g, a.out.empty() ? "blowup.json" : a.out,
        dump(checks_report("tangent blowup", checks, json{{"spec", to_json(spec)}, {"seed", g.seed}, {"rows", jrows}})));
  o.flush();
  return all_pass(checks) ? kOk : kCheckFailed;
}

int tangent_render_model(const Globals& g, const TangentArgs& a) {
  CellSet s = build_Knk(a.n, a.k, a.extra, g.budget_cells);
  Outputs o;
  o.add(g, a.svg.empty() ? "model.svg" : a.svg, svg_cells(s));
  if (!a.out.empty()) o.add(g, a.out, dump(json{{"n", a.n}, {"k", a.k}, {"cells", to_json(s)}}));
  o.flush();
  std::cout << s.size() << " cells\n";
  return kOk;
}

// ---------------------------------------------------------------- universal

struct UniversalArgs {
  std::string target = "line";
  int dim = 2;
  int j = 3;
  std::vector<int> levels{2, 3, 4};
  std::string radius = "2";
  std::string cloud;  // point cloud JSON target
  std::string out;
  std::string svg;
};

TargetSet make_target(const UniversalArgs& a) {
  if (!a.cloud.empty()) {
    try {
      return TargetSet::from_cloud(a.cloud, pointcloud_from_json(json::parse(read_file(a.cloud))));
    } catch (const json::parse_error& e) {
      throw precondition_error(std::string("cannot parse ") + a.cloud + ": " + e.what());
    }
  }
  return TargetSet::builtin(a.target, a.dim);
}

int universal_approx(const Globals& g, const UniversalArgs& a) {
  TargetSet t = make_target(a);
  Approximation x = approximate(t, a.j);
  Outputs o;
  o.add(g, a.out.empty() ? "xj.json" : a.out, dump(json{{"target", t.name()}, {"approximation", to_json(x)}}));
  if (!a.svg.empty()) o.add(g, a.svg, svg_graph(GridGraph(x.dim, 2 * x.j, x.w)));
  o.flush();
  std::cout << fmt::format("|W_j| = {}, {} components, all reach boundary: {}\n", x.w.size(), x.components,
                           x.all_reach_boundary() ? "yes" : "no");
  return x.all_reach_boundary() ? kOk : kCheckFailed;
}

int universal_verify(const Globals& g, const UniversalArgs& a) {
  if (a.levels.empty()) throw precondition_error("levels must be nonempty");
  TargetSet t = make_target(a);
  Rational radius = Rational::parse(a.radius);
  std::vector<CheckRecord> checks;
  std::vector<GridGraph> graphs;
  for (int j : a.levels) {
    Approximation x = approximate(t, j);
    checks.push_back({fmt::format("j={} boundary", j), "every component of X_j meets the window boundary",
                      static_cast<double>(x.components), static_cast<double>(x.components), x.all_reach_boundary(),
                      ""});
    if (!x.all_reach_boundary()) {
      Outputs o;
      o.add(g, a.out.empty() ? "report.json" : a.out, dump(checks_report("universal verify", checks)));
      o.flush();
      return kCheckFailed;
    }
    graphs.push_back(complete_to_graph(x));
  }
  CascadeSpec c = build_cascade(graphs);
  for (const auto& ch : check_cascade(c)) checks.push_back({"cascade " + ch.id, ch.detail, ch.ok ? 1.0 : 0.0, 1, ch.ok, ""});
  AssembledH h = assemble_H(c, graphs, static_cast<int>(graphs.size()));
  checks.push_back({"H connected", "assembled H is connected", h.connected ? 1.0 : 0.0, 1, h.connected, ""});
  bool glued = std::all_of(h.glued.begin(), h.glued.end(), [](bool b) { return b; });
  checks.push_back({"H glued", "consecutive levels meet on the cut cube", glued ? 1.0 : 0.0, 1, glued, ""});
  checks.push_back({"H length", "H^1(H) <= 1", big_to_double(h.length), 1, h.length <= 1, ""});
  json levels = json::array();
  for (size_t i = 0; i < a.levels.size(); ++i) {
    int j = a.levels[i];
    RecoveryReport r = verify_recovery(t, c, graphs, i + 1, j, radius);
    std::string tag = fmt::format("j={}", j);
    levels.push_back({{"j", j},
                      {"position", r.position},
                      {"applicable", r.applicable},
                      {"h_over_t", r.h_over_t},
                      {"t_over_h", r.t_over_h},
                      {"bound", r.bound},
                      {"slack", r.slack},
                      {"hash", fmt::format("{:016x}", graphs[i].content_hash())}});
    if (!r.applicable) {
      std::cout << tag << ": not applicable, 2^{j-1} < R\n";
      continue;
    }
    double lim = r.bound + r.slack;
    checks.push_back({tag + " H over T", "exc(rho_j H in B(0,R), T) <= 2^{2-j}(sqrt N + 1/4) + slack", r.h_over_t, lim,
                      r.h_over_t <= lim, ""});
    checks.push_back({tag + " T over H", "exc(T in B(0,R), rho_j H) <= 2^{2-j}(sqrt N + 1/4) + slack", r.t_over_h, lim,
                      r.t_over_h <= lim, ""});
    checks.push_back({tag + " scale", "rho_j r_{n_j+1} <= 2^{-n_j-j+1}", r.scale_ok ? 1.0 : 0.0, 1, r.scale_ok, ""});
    std::cout << fmt::format("{}: exc(H,T) {:.6g} exc(T,H) {:.6g} bound {:.6g}\n", tag, r.h_over_t, r.t_over_h, lim);
  }
  json scales = json::array();
  for (const auto& r : c.r) scales.push_back(r.str());
  Outputs o;
  o.add(g, a.out.empty() ? "report.json" : a.out,
        dump(checks_report("universal verify", checks,
                           json{{"target", t.name()}, {"radius", radius.str()}, {"levels", levels}, {"r", scales}})));
  if (!a.svg.empty() && t.dim() == 2) o.add(g, a.svg, svg_graph(graphs.back()));
  o.flush();
  return all_pass(checks) ? kOk : kCheckFailed;
}

// ---------------------------------------------------------------- verify-all

struct VerifyArgs {
  int n = 4;
  std::vector<int> only;
  std::string out = "report.json";
};

int verify_all(const Globals& g, const VerifyArgs& a) {
  AcceptanceOptions opt;
  opt.seed = g.seed;
  opt.n = a.n;
  opt.only = a.only;
  if (opt.n != 4 && opt.n != 6 && opt.n != 8) throw precondition_error("verify-all supports n in {4, 6, 8}");
  auto results = run_acceptance(opt, [](const CriterionResult& r) {
    std::cout << summary_line(r) << "\n";
    std::cout.flush();
  });
  bool ok = std::all_of(results.begin(), results.end(), [](const CriterionResult& r) { return r.pass; });
  json arr = json::array();
  for (const auto& r : results) arr.push_back(to_json(r));
  Outputs o;
  o.add(g, a.out, dump(json{{"seed", g.seed}, {"n", a.n}, {"criteria", arr}, {"pass", ok}}));
  o.flush();
  return ok ? kOk : kCheckFailed;
}

// ---------------------------------------------------------------- config

// INI file: top-level kind, seed, budget_cells, out_dir and one section named after the kind.
int run_config(Globals g, const std::string& path) {
  namespace pt = boost::property_tree;
  if (!std::filesystem::exists(path)) throw io_error("config not found: " + path);
  pt::ptree tree;
  try {
    pt::read_ini(path, tree);
  } catch (const pt::ini_parser_error& e) {
    throw precondition_error(std::string("malformed config: ") + e.what());
  }
  static const std::set<std::string> kinds = {"carpet", "param", "tangent", "universal", "verify-all"};
  std::string kind = tree.get<std::string>("kind", "");
  if (!kinds.count(kind)) throw precondition_error("config kind must be one of carpet, param, tangent, universal, verify-all");
  for (const auto& [key, node] : tree) {
    bool section = !node.empty();
    if (section ? key != kind : !std::set<std::string>{"kind", "seed", "budget_cells", "out_dir"}.count(key))
      throw precondition_error("unexpected config entry '" + key + "'");
  }
  try {
    if (tree.count("seed")) g.seed = tree.get<uint64_t>("seed");
    long long budget = tree.count("budget_cells") ? tree.get<long long>("budget_cells")
                                                  : static_cast<long long>(g.budget_cells);
    if (budget <= 0) throw precondition_error("budget_cells must be positive");
    g.budget_cells = static_cast<uint64_t>(budget);
    g.out_dir = tree.get<std::string>("out_dir", g.out_dir);
    const pt::ptree empty;
    const pt::ptree& s = tree.get_child(kind, empty);
    std::set<std::string> allowed;
    auto get = [&](const char* key, auto fallback) {
      allowed.insert(key);
      // ptree's defaulted get swallows unparsable values, so look the key up first.
      return s.count(key) ? s.get<decltype(fallback)>(key) : fallback;
    };
    auto split_ints = [](const std::string& text) {
      std::vector<int> out;
      std::stringstream ss(text);
      std::string item;
      while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(std::stoi(item));
      return out;
    };
    std::function<int()> action;
    std::string act = get("action", std::string());
    if (kind == "carpet") {
      CarpetArgs a;
      a.n = get("n", a.n);
      a.depth = get("depth", a.depth);
      a.eta = get("eta", a.eta);
      a.out = get("out", a.out);
      a.svg = get("svg", a.svg);
      action = [=] { return carpet_build(g, a); };
    } else if (kind == "param") {
      ParamArgs a;
      a.n = get("n", a.n);
      a.stage = get("stage", a.stage);
      a.eta = get("eta", a.eta);
      a.t = get("t", a.t);
      a.samples = get("samples", a.samples);
      a.out = get("out", a.out);
      a.svg = get("svg", a.svg);
      if (act != "eval" && act != "curve") throw precondition_error("param action must be eval or curve");
      action = [=] { return act == "eval" ? param_eval(g, a) : param_curve(g, a); };
    } else if (kind == "tangent") {
      TangentArgs a;
      a.n = get("n", a.n);
      a.k = get("k", a.k);
      a.spec = get("spec", a.spec);
      a.out = get("out", a.out);
      a.svg = get("svg", a.svg);
      if (!a.spec.empty() && !std::filesystem::exists(a.spec)) throw precondition_error("spec file not found: " + a.spec);
      if (act == "cutcount") action = [=] { return tangent_cutcount(g, a); };
      else if (act == "blowup") action = [=] { return tangent_blowup(g, a); };
      else if (act == "render-model") action = [=] { return tangent_render_model(g, a); };
      else throw precondition_error("tangent action must be cutcount, blowup or render-model");
    } else if (kind == "universal") {
      UniversalArgs a;
      a.target = get("target", a.target);
      a.j = get("j", a.j);
      std::string levels = get("levels", std::string("2,3,4"));
      a.levels = split_ints(levels);
      a.radius = get("radius", a.radius);
      a.out = get("out", a.out);
      a.svg = get("svg", a.svg);
      if (act == "approx") action = [=] { return universal_approx(g, a); };
      else if (act == "verify") action = [=] { return universal_verify(g, a); };
      else throw precondition_error("universal action must be approx or verify");
    } else {
      VerifyArgs a;
      a.n = get("n", a.n);
      a.only = split_ints(get("only", std::string()));
      a.out = get("out", a.out);
      action = [=] { return verify_all(g, a); };
    }
    for (const auto& [key, node] : s)
      if (!allowed.count(key)) throw precondition_error("unexpected key '" + key + "' in section [" + kind + "]");
    return action();
  } catch (const precondition_error&) {
    throw;
  } catch (const pt::ptree_bad_data& e) {
    throw precondition_error(std::string("bad config value: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw precondition_error(std::string("bad config value: ") + e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  Globals g;
  CLI::App app{"fractal tangent lab"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand
  app.add_option("--seed", g.seed, "seed for choice functions and sampling")->envname("FTL_SEED");
  app.add_option("--budget-cells", g.budget_cells, "maximum cells enumerated by one operation")
      ->envname("FTL_BUDGET_CELLS")
      ->check(CLI::PositiveNumber);
  app.add_option("--out-dir", g.out_dir, "directory for relative output paths")->envname("FTL_OUT_DIR");

  std::function<int()> action;

  // carpet
  CarpetArgs ca;
  auto* carpet = app.add_subcommand("carpet", "carpet approximations");
  carpet->require_subcommand(1);
  auto* cb = carpet->add_subcommand("build", "depth-m cells of K^eta");
  cb->add_option("--n", ca.n)->check(CLI::Range(4, 64));
  cb->add_option("--depth", ca.depth)->check(CLI::Range(0, 12));
  cb->add_option("--eta", ca.eta, "seeded, 1 or 2");
  cb->add_option("--out", ca.out);
  cb->add_option("--svg", ca.svg);
  cb->callback([&] { action = [&] { return carpet_build(g, ca); }; });
  auto* cr = carpet->add_subcommand("render", "SVG of a cell set JSON");
  cr->add_option("--in", ca.in)->required();
  cr->add_option("--out", ca.svg);
  cr->callback([&] { action = [&] { return carpet_render(g, ca); }; });

  // param
  ParamArgs pa;
  auto* param = app.add_subcommand("param", "dendrite parametrization");
  param->require_subcommand(1);
  auto* pe = param->add_subcommand("eval", "F_m(t) as an exact point");
  auto* pc = param->add_subcommand("curve", "sampled F_m");
  for (auto* c : {pe, pc}) {
    c->add_option("--n", pa.n)->check(CLI::Range(4, 64));
    c->add_option("--stage", pa.stage)->check(CLI::Range(0, 8));
    c->add_option("--mass-depth", pa.mass_depth);
    c->add_option("--eta", pa.eta, "seeded, 1 or 2");
    c->add_option("--out", pa.out);
  }
  pe->add_option("--t", pa.t, "parameter p/q in [0,1]");
  pc->add_option("--samples", pa.samples)->check(CLI::Range(1, 1'000'000));
  pc->add_option("--svg", pa.svg);
  pe->callback([&] { action = [&] { return param_eval(g, pa); }; });
  pc->callback([&] { action = [&] { return param_curve(g, pa); }; });

  // tangent
  TangentArgs ta;
  auto* tangent = app.add_subcommand("tangent", "tangent experiments");
  tangent->require_subcommand(1);
  auto* tc = tangent->add_subcommand("cutcount", "local cut points of K^{n,k}");
  tc->add_option("--n", ta.n)->check(CLI::Range(4, 64));
  tc->add_option("--k", ta.k)->check(CLI::Range(0, 8));
  tc->add_option("--out", ta.out);
  tc->callback([&] { action = [&] { return tangent_cutcount(g, ta); }; });
  auto* tb = tangent->add_subcommand("blowup", "planted blow-up pipeline");
  tb->add_option("--spec", ta.spec, "plant spec JSON")->check(CLI::ExistingFile);
  tb->add_option("--radii", ta.radii)->delimiter(',');
  tb->add_flag("--no-window", ta.no_window);
  tb->add_option("--out", ta.out);
  tb->callback([&] { action = [&] { return tangent_blowup(g, ta); }; });
  auto* tm = tangent->add_subcommand("render-model", "SVG of K^{n,k}");
  tm->add_option("--n", ta.n)->check(CLI::Range(4, 64));
  tm->add_option("--k", ta.k)->check(CLI::Range(0, 8));
  tm->add_option("--extra", ta.extra, "model-2 levels below the model-1 block")->check(CLI::Range(0, 6));
  tm->add_option("--out", ta.out);
  tm->add_option("--svg", ta.svg);
  tm->callback([&] { action = [&] { return tangent_render_model(g, ta); }; });

  // universal
  UniversalArgs ua;
  auto* universal = app.add_subcommand("universal", "universal curve");
  universal->require_subcommand(1);
  auto* uap = universal->add_subcommand("approx", "W_j and the components of X_j");
  auto* uv = universal->add_subcommand("verify", "cascade and excess recovery");
  for (auto* c : {uap, uv}) {
    c->add_option("--target", ua.target, "line, cross, quarter, parallel, diagonal or bounded");
    c->add_option("--cloud", ua.cloud, "point cloud JSON target")->check(CLI::ExistingFile);
    c->add_option("--dim", ua.dim)->check(CLI::Range(2, 3));
    c->add_option("--out", ua.out);
    c->add_option("--svg", ua.svg);
  }
  uap->add_option("--j", ua.j)->check(CLI::Range(1, 10));
  uv->add_option("--levels", ua.levels)->delimiter(',')->check(CLI::Range(1, 6));
  uv->add_option("--radius", ua.radius);
  uap->callback([&] { action = [&] { return universal_approx(g, ua); }; });
  uv->callback([&] { action = [&] { return universal_verify(g, ua); }; });

  // verify-all
  VerifyArgs va;
  auto* va_cmd = app.add_subcommand("verify-all", "all acceptance criteria");
  va_cmd->add_option("--n", va.n, "base for the single-n criteria");
  va_cmd->add_option("--only", va.only, "criterion ids")->delimiter(',');
  va_cmd->add_option("--out", va.out);
  va_cmd->callback([&] { action = [&] { return verify_all(g, va); }; });

  // run
  std::string config;
  auto* run = app.add_subcommand("run", "run an INI experiment config");
  run->add_option("--config", config)->required();
  run->callback([&] { action = [&] { return run_config(g, config); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    return action();
  } catch (const budget_error& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return kBudget;
  } catch (const io_error& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kIo;
  } catch (const precondition_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ftl::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const invariant_error& e) {
    std::cerr << "invariant violated: " << e.what() << "\n";
    return kCheckFailed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kCheckFailed;
  }
}
