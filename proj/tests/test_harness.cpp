#include "doctest.h"

#include <fstream>
#include <sstream>

#include "toeplab/cache.hpp"
#include "toeplab/config.hpp"
#include "toeplab/experiments.hpp"
#include "toeplab/report.hpp"

using namespace toeplab;
using namespace toeplab::config;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("toeplab_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

}  // namespace

TEST_CASE("grid specs") {
  const auto g = parse_grid("100:800:8:geometric");
  CHECK(g.geometric);
  CHECK(g.count == 8);
  CHECK(g.values().back() == 800.0);
  const auto l = parse_grid("-200:-20:10");
  CHECK_FALSE(l.geometric);
  CHECK(l.values().front() == -200.0);
  CHECK(parse_grid(grid_text(g)).stop == g.stop);
  CHECK_THROWS_AS(parse_grid("1:2"), Error);
  CHECK_THROWS_AS(parse_grid("1:2:x"), Error);
  CHECK_THROWS_AS(parse_grid("1:2:3:log"), Error);
}

TEST_CASE("config files report the field and line") {
  const auto dir = scratch("config");
  spit(dir / "bad.json", "{\n  \"experiment\": \"trace\",\n  \"window\": {\n    \"eps\": \"wide\"\n  }\n}\n");
  try {
    load_file(dir / "bad.json");
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "window.eps");
    CHECK(e.line() == 4);
  }
  spit(dir / "unknown.json", "{\n  \"model\": {\"d\": 1, \"colour\": 3}\n}\n");
  CHECK_THROWS_WITH_AS(load_file(dir / "unknown.json"), doctest::Contains("model.colour"), ConfigError);
  spit(dir / "syntax.json", "{\n  \"seed\": 3,\n  oops\n}\n");
  try {
    load_file(dir / "syntax.json");
    FAIL("expected a syntax error");
  } catch (const ConfigError& e) {
    CHECK(e.line() == 3);
  }
  spit(dir / "good.json",
       "{\"experiment\": \"local\", \"model\": {\"d\": 2, \"weights\": [2, 4, 1]},"
       " \"window\": {\"shape\": \"bump\", \"tau0\": 3.141592653589793, \"eps\": 0.7},"
       " \"grids\": {\"lambda\": \"50:100:3:geometric\", \"u\": [0, 1]}, \"seed\": 7}");
  const auto cfg = load_file(dir / "good.json");
  CHECK(cfg.kind == Kind::local);
  CHECK(cfg.weights == std::vector<int>{2, 4, 1});
  CHECK(cfg.seed == 7);
  CHECK_NOTHROW(validate(cfg));
}

TEST_CASE("validation") {
  ExperimentConfig cfg;
  CHECK_NOTHROW(validate(cfg));
  cfg.eps = 1.6;  // half the gap at pi is pi/2
  CHECK_THROWS_WITH_AS(validate(cfg), doctest::Contains("window.eps"), ConfigError);
  cfg = {};
  cfg.weights = {1, 2, 3};
  CHECK_THROWS_AS(validate(cfg), ConfigError);
  cfg = {};
  cfg.tail_tolerance = 0.0;
  CHECK_THROWS_AS(validate(cfg), ConfigError);
  cfg = {};
  cfg.lambda_grid = {800.0, 100.0, 8, true};
  CHECK_THROWS_AS(validate(cfg), ConfigError);
  cfg = {};
  cfg.u_norms = {};
  CHECK_THROWS_AS(validate(cfg), ConfigError);
}

TEST_CASE("config hash") {
  ExperimentConfig a, b;
  CHECK(a.hash() == b.hash());
  CHECK(a.hash().size() == 8);
  b.eps = 1.2;
  CHECK(a.hash() != b.hash());
  ExperimentConfig c;
  apply_json(c, a.to_json());
  CHECK(c.hash() == a.hash());
}

TEST_CASE("report formats") {
  report::ScanReport r;
  r.kind = "test";
  r.add(1.0, Complex(2.0, 1.0), Complex(1.0, 0.0));
  r.add(2.0, Complex(0.5, 0.0), Complex(0.25, 0.25));
  CHECK_NOTHROW(r.validate());
  CHECK(report::format_double(0.1) == "1.0000000000000001e-01");
  const auto dir = scratch("report");
  report::write_all(r, dir, "scan");
  const std::string csv = slurp(dir / "scan.csv");
  CHECK(csv.rfind("grid,exact_re,exact_im,pred_re,pred_im,ratio_abs,ratio_arg\n", 0) == 0);
  CHECK(fs::exists(dir / "scan.json"));
  CHECK(slurp(dir / "scan.gp").find("scan.csv") != std::string::npos);
  r.add(1.5, 1.0, 1.0);
  CHECK_THROWS_AS(r.validate(), Error);
  report::ScanReport bad;
  bad.add(1.0, 1.0, 0.0);
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("cache round trip and corruption") {
  const auto dir = scratch("cache");
  const auto m = geometry::calibrated(geometry::ProjectiveModel(1, {1, 2}));
  const auto first = cache::load_or_build(m, 25, {}, dir);
  CHECK_FALSE(first.from_cache);
  const auto second = cache::load_or_build(m, 25, {}, dir);
  CHECK(second.from_cache);
  CHECK(second.package.sorted_eigenvalues() == first.package.sorted_eigenvalues());
  const auto path = cache::cache_file(dir, m, 25, spectral::Route::analytic);
  std::string bytes = slurp(path);
  bytes[bytes.size() / 2] ^= 0x5a;
  spit(path, bytes);
  CHECK_THROWS_AS(cache::load_package(path, m, 25), CacheCorrupt);
  const auto third = cache::load_or_build(m, 25, {}, dir);
  CHECK_FALSE(third.from_cache);
  CHECK(third.rebuilt_corrupt);
  CHECK(cache::load_or_build(m, 25, {}, dir).from_cache);
  // a header for another k_max is rejected
  CHECK_THROWS_AS(cache::load_package(path, m, 26), CacheCorrupt);
  spit(path, "TOEPLAB");
  CHECK_THROWS_AS(cache::load_package(path, m, 25), CacheCorrupt);
}

TEST_CASE("spectrum runs are reproducible") {
  const auto dir = scratch("spectrum");
  ExperimentConfig cfg;
  cfg.kind = Kind::spectrum;
  cfg.k_max = 30;
  cfg.cache_dir = (dir / "cache").string();
  cfg.out_dir = dir / "a";
  std::ostringstream log;
  experiments::run(cfg, log);
  cfg.out_dir = dir / "b";
  experiments::run(cfg, log);
  CHECK(log.str().find("(cache)") != std::string::npos);
  const std::string a = slurp(dir / "a" / "spectrum.csv");
  CHECK(a == slurp(dir / "b" / "spectrum.csv"));
  CHECK(a.rfind("k,index,lambda,multiplicity_hint\n", 0) == 0);
  // degree 3, second basis element z0^2 z1: lambda = 4, shared by three sections
  const auto at = a.find("\n3,1,");
  REQUIRE(at != std::string::npos);
  const std::string line = a.substr(at + 1, a.find('\n', at + 1) - at - 1);
  CHECK(std::stod(line.substr(4)) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(line.substr(line.rfind(',') + 1) == "3");
}

TEST_CASE("an invalid window stops the run before any work") {
  const auto dir = scratch("guard");
  ExperimentConfig cfg;
  cfg.kind = Kind::trace;
  cfg.eps = 2.0;
  cfg.out_dir = dir / "never";
  cfg.cache_dir = (dir / "cache").string();
  std::ostringstream log;
  CHECK_THROWS_AS(experiments::run(cfg, log), ConfigError);
  CHECK_FALSE(fs::exists(cfg.out_dir));
  CHECK_FALSE(fs::exists(dir / "cache"));
}

TEST_CASE("trace, local and parity runs write reports") {
  const auto dir = scratch("runs");
  ExperimentConfig cfg;
  cfg.cache_dir = (dir / "cache").string();
  cfg.out_dir = dir / "out";
  cfg.lambda_grid = {60.0, 120.0, 4, true};
  cfg.u_norms = {0.0, 1.0};
  std::ostringstream log;
  for (Kind k : {Kind::trace, Kind::local, Kind::parity, Kind::offlocus}) {
    cfg.kind = k;
    const auto res = experiments::run(cfg, log);
    CHECK(res.exit_code == 0);
    CHECK_FALSE(res.artifacts.empty());
    for (const auto& a : res.artifacts) CHECK(fs::exists(a));
  }
  const auto trace = nlohmann::json::parse(slurp(cfg.out_dir / "trace.json"));
  CHECK(trace.contains("fits"));
  CHECK(fs::exists(cfg.out_dir / "local_u1.csv"));
  CHECK(fs::exists(cfg.out_dir / "parity_u0.csv"));
  CHECK(fs::exists(cfg.out_dir / "offlocus_shrinking.csv"));
}
