// Runs every acceptance criterion and prints one line per criterion.
// Usage: ftl_acceptance [--seed S] [--only 1,2,...] [--report path.json]

#include <iostream>

#include <CLI11.hpp>

#include "ftl/acceptance.hpp"

int main(int argc, char** argv) {
  ftl::AcceptanceOptions opt;
  std::string report;
  CLI::App app{"acceptance criteria"};
  app.add_option("--seed", opt.seed, "seed for sampled criteria");
  app.add_option("--only", opt.only, "criterion ids")->delimiter(',');
  app.add_option("--report", report, "write a JSON report");
  CLI11_PARSE(app, argc, argv);

  auto results = ftl::run_acceptance(opt, [](const ftl::CriterionResult& r) {
    std::cout << ftl::summary_line(r) << "\n";
    for (const auto& c : r.checks)
      if (!c.pass) std::cout << "       failed: " << c.name << " measured " << c.measured << " bound " << c.bound
                             << (c.detail.empty() ? "" : " (" + c.detail + ")") << "\n";
    std::cout.flush();
  });
  bool ok = true;
  ftl::json arr = ftl::json::array();
  for (const auto& r : results) {
    ok = ok && r.pass;
    arr.push_back(ftl::to_json(r));
  }
  if (!report.empty()) ftl::write_file(report, ftl::dump(ftl::json{{"criteria", arr}, {"pass", ok}}));
  std::cout << (ok ? "all criteria passed" : "some criteria failed") << "\n";
  return ok ? 0 : 1;
}
