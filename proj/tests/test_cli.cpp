#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "flatdyn/connections.hpp"
#include "flatdyn/io.hpp"

#include "../tools/runner.hpp"

using namespace flatdyn;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  REQUIRE(f.good());
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

struct TempDir {
  fs::path path;
  TempDir(const char* tag) {
    path = fs::temp_directory_path() / (std::string("flatdyn-test-") + tag);
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

const char* torus_text = "d=2\npi=2 1\nlambda=3 2\ntau=1 -1\n";

fs::path write_surface(const TempDir& dir, const std::string& text) {
  fs::path p = dir.path / "surface.txt";
  std::ofstream(p) << text;
  return p;
}

} // namespace

TEST_CASE("rational literals") {
  CHECK(parse_rational("3/2") == Rational(3, 2));
  CHECK(parse_rational("-7") == Rational(-7));
  CHECK(parse_rational("0.25") == Rational(1, 4));
  CHECK(parse_rational(rational_str(Rational(-22, 7))) == Rational(-22, 7));
  CHECK_THROWS_AS(parse_rational("x"), FlatError);
  CHECK_THROWS_AS(parse_rational("1/0"), FlatError);
}

TEST_CASE("surface files round-trip") {
  SurfaceSpec s = parse_surface(torus_text);
  CHECK(s.d == 2);
  CHECK(s.pi == std::vector<int>{0, 2, 1});
  CHECK(s.lambda[1] == 3);
  CHECK(s.tau[2] == -1);
  CHECK(s.backend == "rational");
  SurfaceSpec t = parse_surface(emit_surface(s));
  CHECK(emit_surface(t) == emit_surface(s));
  auto X = realize<Rational>(s);
  CHECK(X.area() == 5);
}

TEST_CASE("surface parse errors carry context") {
  CHECK_THROWS_AS(parse_surface("d=2\npi=2 1\nlambda=3\ntau=1 -1\n"), FlatError);
  CHECK_THROWS_AS(parse_surface("d=2\npi=1 2\nlambda=3 2\ntau=1 -1\n"), FlatError);
  CHECK_THROWS_AS(parse_surface("pi=2 1\nlambda=3 2\ntau=1 -1\n"), FlatError);
  try {
    parse_surface("d=2\npi=2 1\nlambda=3 oops\ntau=1 -1\n");
    CHECK(false);
  } catch (const FlatError& e) {
    CHECK(e.code() == Errc::parse);
  }
}

TEST_CASE("output header embeds config hash and seed") {
  std::string h = output_header("verb=cf\nalpha=11/4\n", 42);
  CHECK(h.find("seed=42") != std::string::npos);
  CHECK(h[0] == '#');
  std::ostringstream os;
  os << std::hex << fnv1a64("verb=cf\nalpha=11/4\n");
  CHECK(h.find(os.str()) != std::string::npos);
  // different config, different hash line
  CHECK(h != output_header("verb=cf\nalpha=11/5\n", 42));
}

TEST_CASE("cli: build and enumerate on the torus") {
  TempDir dir("build");
  auto sp = write_surface(dir, torus_text);
  int rc = runner::run_cli({"build", "--surface", sp.string(), "--outdir",
                            dir.path.string(), "--seed", "5"});
  CHECK(rc == 0);
  std::string b = slurp(dir.path / "build.txt");
  CHECK(b.find("area=5") != std::string::npos);
  CHECK(b.find("lambda_star=5") != std::string::npos);
  CHECK(b.find("stratum=1") != std::string::npos);

  rc = runner::run_cli({"enumerate", "--surface", sp.string(), "--lmax", "4",
                        "--outdir", dir.path.string(), "--seed", "5"});
  CHECK(rc == 0);
  std::string csv = slurp(dir.path / "enumerate.csv");
  // oracle: the length-4 ball of this torus holds 8 connections
  std::size_t rows = 0;
  for (char c : csv)
    if (c == '\n') ++rows;
  CHECK(rows == 2 + 8); // header comment + column line + 8 connections
  auto cs = enumerate_connections(
      realize<Rational>(parse_surface(torus_text)), Rational(4));
  CHECK(cs.size() == 8);
  for (auto& c : cs) {
    std::ostringstream probe;
    probe << scalar_traits<Rational>::to_double(c.hol.x);
    CHECK(csv.find(probe.str()) != std::string::npos);
  }
}

TEST_CASE("cli: cf emits the hand example") {
  TempDir dir("cf");
  int rc = runner::run_cli({"cf", "--alpha", "11/4", "--depth", "10",
                            "--outdir", dir.path.string()});
  CHECK(rc == 0);
  std::string csv = slurp(dir.path / "cf.csv");
  CHECK(csv.find("0,2,1,2,") != std::string::npos);
  CHECK(csv.find("1,1,1,3,") != std::string::npos);
  CHECK(csv.find("2,3,4,11,") != std::string::npos);
}

TEST_CASE("cli: exit codes") {
  TempDir dir("codes");
  // validation error: inadmissible permutation
  auto bad = write_surface(dir, "d=2\npi=1 2\nlambda=3 2\ntau=1 -1\n");
  CHECK(runner::run_cli({"build", "--surface", bad.string(), "--outdir",
                         dir.path.string()}) == 1);
  // missing file
  CHECK(runner::run_cli({"build", "--surface", (dir.path / "nope").string(),
                         "--outdir", dir.path.string()}) == 1);
  // unknown flag
  CHECK(runner::run_cli({"build", "--nonsense"}) == 1);
  // budget exhaustion maps to 2: depth beyond the filtration atom budget is
  // hard to hit; use an enumerate with a vertical connection instead (1) and
  // flow with impossible budgets is not reachable here, so test 2 via cf on
  // a huge depth being fine (0) and khinchin with tiny budget is not exposed.
  auto sp = write_surface(dir, torus_text);
  CHECK(runner::run_cli({"enumerate", "--surface", sp.string(), "--lmax", "6",
                         "--outdir", dir.path.string()}) == 1);
}

TEST_CASE("cli: determinism across runs and worker counts") {
  TempDir d1("det1"), d2("det2"), d3("det3");
  std::vector<std::string> base{"khinchin", "--mode",    "twisted",
                                "--samples", "12",       "--phi",
                                "1,1,0",     "--nmax",   "2000",
                                "--seed",    "7"};
  auto run = [&](const TempDir& d, const char* workers) {
    auto args = base;
    args.insert(args.end(), {"--workers", workers, "--outdir", d.path.string()});
    CHECK(runner::run_cli(args) == 0);
    return slurp(d.path / "khinchin-twisted.jsonl") +
           slurp(d.path / "khinchin-twisted-summary.csv");
  };
  std::string a = run(d1, "1");
  std::string b = run(d2, "1");
  std::string c = run(d3, "8");
  CHECK(a == b);
  CHECK(a == c); // byte-identical regardless of worker count
}

TEST_CASE("cli: twisted level table on the exact backend") {
  TempDir dir("tw");
  int rc = runner::run_cli({"twisted", "--alpha", "7/5", "--levels", "1",
                            "--outdir", dir.path.string()});
  CHECK(rc == 0);
  std::string csv = slurp(dir.path / "twisted.csv");
  // level 1: nu=1, s=(3,4), s'=(2,3) -> k=3, j=4, kp=2, jp=3, det=1
  CHECK(csv.find("1,1,3,4,2,3,1,") != std::string::npos);
}
