#include <catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

// Runs the CLI with the given arguments inside dir.
Run cli(const fs::path& dir, const std::string& args) {
  std::string cmd = "cd '" + dir.string() + "' && '" FTL_CLI_PATH "' " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p);
  char buf[4096];
  size_t got;
  while ((got = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, got);
  int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  fs::path d = fs::temp_directory_path() / ("ftl_cli_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST_CASE("cut point count for n = 6, k = 2", "[cli]") {
  fs::path d = scratch("cutcount");
  Run r = cli(d, "tangent cutcount --n 6 --k 2");
  CHECK(r.code == 0);
  CHECK(r.out == "25\n");
}

TEST_CASE("usage errors exit with 2", "[cli]") {
  fs::path d = scratch("usage");
  CHECK(cli(d, "").code == 2);
  CHECK(cli(d, "no-such-command").code == 2);
  CHECK(cli(d, "tangent cutcount --n 5").code == 2);
  CHECK(cli(d, "param eval --t 3/2").code == 2);
  CHECK(cli(d, "universal approx --target nope").code == 2);
}

TEST_CASE("missing inputs exit with 3", "[cli]") {
  fs::path d = scratch("io");
  CHECK(cli(d, "carpet render --in absent.json").code == 3);
  CHECK(cli(d, "run --config absent.ini").code == 3);
}

TEST_CASE("budget overrun exits with 4", "[cli]") {
  fs::path d = scratch("budget");
  CHECK(cli(d, "--budget-cells 100 carpet build --n 4 --depth 3").code == 4);
  CHECK_FALSE(fs::exists(d / "carpet.json"));
}

TEST_CASE("failed checks exit with 1", "[cli]") {
  fs::path d = scratch("check");
  CHECK(cli(d, "universal approx --target bounded --j 3").code == 1);
}

TEST_CASE("malformed configs exit with 2 and write nothing", "[cli]") {
  fs::path d = scratch("config");
  write(d / "kind.ini", "kind = nonsense\n");
  write(d / "value.ini", "kind = carpet\nout_dir = out\n[carpet]\nn = four\n");
  write(d / "key.ini", "kind = carpet\nout_dir = out\n[carpet]\nn = 4\ncolour = red\n");
  write(d / "syntax.ini", "kind = carpet\n[carpet\n");
  write(d / "section.ini", "kind = carpet\nout_dir = out\n[param]\nn = 4\n");
  for (const char* f : {"kind.ini", "value.ini", "key.ini", "syntax.ini", "section.ini"}) {
    INFO(f);
    CHECK(cli(d, std::string("run --config ") + f).code == 2);
  }
  CHECK_FALSE(fs::exists(d / "out"));
}

TEST_CASE("config runs write under out_dir", "[cli]") {
  fs::path d = scratch("config_ok");
  write(d / "ok.ini", "kind = tangent\nout_dir = res\n[tangent]\naction = cutcount\nn = 6\nk = 2\nout = cc.json\n");
  Run r = cli(d, "run --config ok.ini");
  CHECK(r.code == 0);
  CHECK(r.out == "25\n");
  CHECK(fs::exists(d / "res" / "cc.json"));
}

TEST_CASE("outputs are byte-identical across runs", "[cli]") {
  fs::path d = scratch("determinism");
  for (const char* out : {"a", "b"}) {
    std::string o(out);
    REQUIRE(cli(d, "--seed 11 carpet build --n 4 --depth 2 --out " + o + "_carpet.json").code == 0);
    REQUIRE(cli(d, "universal approx --target cross --j 2 --out " + o + "_xj.json").code == 0);
    REQUIRE(cli(d, "universal verify --target cross --levels 2,3 --radius 2 --out " + o + "_rep.json").code == 0);
    REQUIRE(cli(d, "--seed 11 param curve --stage 1 --samples 64 --out " + o + "_curve.json").code == 0);
  }
  for (const char* f : {"carpet.json", "xj.json", "rep.json", "curve.json"}) {
    INFO(f);
    std::string a = slurp(d / (std::string("a_") + f)), b = slurp(d / (std::string("b_") + f));
    CHECK_FALSE(a.empty());
    CHECK(a == b);
  }
  // a different seed changes the carpet
  REQUIRE(cli(d, "--seed 12 carpet build --n 4 --depth 2 --out c_carpet.json").code == 0);
  CHECK(slurp(d / "a_carpet.json") != slurp(d / "c_carpet.json"));
}

TEST_CASE("environment supplies global defaults", "[cli]") {
  fs::path d = scratch("env");
  CHECK(cli(d, "--out-dir flag tangent cutcount --n 4 --k 1 --out cc.json").code == 0);
  CHECK(fs::exists(d / "flag" / "cc.json"));
  CHECK(cli(d, "tangent cutcount --n 4 --k 1 --out cc.json --out-dir trailing").code == 0);
  CHECK(fs::exists(d / "trailing" / "cc.json"));
  REQUIRE(setenv("FTL_OUT_DIR", "fromenv", 1) == 0);
  CHECK(cli(d, "tangent cutcount --n 4 --k 1 --out cc.json").code == 0);
  unsetenv("FTL_OUT_DIR");
  CHECK(fs::exists(d / "fromenv" / "cc.json"));
}

TEST_CASE("universal verify reports every level", "[cli]") {
  fs::path d = scratch("verify");
  Run r = cli(d, "universal verify --target cross --levels 2,3,4 --radius 2 --out report.json");
  CHECK(r.code == 0);
  std::string rep = slurp(d / "report.json");
  CHECK(rep.find("\"pass\": true") != std::string::npos);
  CHECK(rep.find("\"j\": 4") != std::string::npos);
}
