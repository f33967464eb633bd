#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <map>
#include <set>
#include <sstream>

#include "dirlab/cli.hpp"
#include "dirlab/config.hpp"
#include "dirlab/digest.hpp"
#include "dirlab/errors.hpp"
#include "dirlab/reports.hpp"
#include "dirlab/rng.hpp"

using namespace dirlab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("dirlab_cli_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "dirlab");
  std::ostringstream out, err;
  const int code = cli_main(args, out, err);
  return {code, out.str(), err.str()};
}

double random_double(Substream& rng) {
  switch (rng.next_u64() % 5) {
    case 0: return rng.uniform(-1.0, 1.0);
    case 1: return std::ldexp(rng.uniform(), static_cast<int>(rng.next_u64() % 600) - 300);
    case 2: return static_cast<double>(static_cast<std::int64_t>(rng.next_u64() % 2001) - 1000);
    case 3: return 0.1 * static_cast<double>(rng.next_u64() % 10);
    default: return -std::exp(rng.uniform(-40.0, 40.0));
  }
}

std::string random_word(Substream& rng) {
  static const std::string alphabet = "abcdefghijklmnopqrstuvwxyz_./-0123456789 ,=";
  std::string s;
  const int len = 1 + static_cast<int>(rng.next_u64() % 12);
  for (int i = 0; i < len; ++i) s += alphabet[rng.next_u64() % alphabet.size()];
  // surrounding whitespace does not survive trimming
  while (!s.empty() && s.back() == ' ') s.pop_back();
  while (!s.empty() && s.front() == ' ') s.erase(s.begin());
  return s.empty() ? "x" : s;
}

std::vector<double> random_list(Substream& rng) {
  std::vector<double> v(rng.next_u64() % 6);
  for (auto& x : v) x = random_double(rng);
  return v;
}

ExperimentConfig random_config(Substream& rng) {
  ExperimentConfig c;
  c.subcommand = random_word(rng);
  c.m = static_cast<std::int64_t>(rng.next_u64() % 9) - 2;
  c.n = static_cast<std::int64_t>(rng.next_u64());
  c.alpha = random_list(rng);
  c.beta = random_list(rng);
  c.psi_family = random_word(rng);
  c.psi_params = random_list(rng);
  c.psi_t0 = random_double(rng);
  c.rate_source = random_word(rng);
  c.rate_value = random_double(rng);
  c.matrix = random_list(rng);
  c.classify_horizons.clear();
  for (int i = 0, k = static_cast<int>(rng.next_u64() % 4); i < k; ++i)
    c.classify_horizons.push_back(static_cast<std::int64_t>(rng.next_u64() >> 1));
  c.dani_s_max = random_double(rng);
  c.dani_step = random_double(rng);
  c.check_horizon = random_double(rng);
  c.check_oracle = random_word(rng);
  c.check_cf_depth = static_cast<std::int64_t>(rng.next_u64() % 100);
  c.check_classic = rng.next_u64() % 2;
  c.measure_kind = random_word(rng);
  c.measure_r = random_list(rng);
  c.measure_n = static_cast<std::int64_t>(rng.next_u64() % 1000000);
  c.measure_s_push = random_double(rng);
  c.measure_freeze_lambda = rng.next_u64() % 2;
  c.orbit_mode = random_word(rng);
  c.orbit_variant = random_word(rng);
  c.orbit_ensemble = static_cast<std::int64_t>(rng.next_u64() % 1000);
  c.orbit_k_lo = -static_cast<std::int64_t>(rng.next_u64() % 1000);
  c.orbit_k_hi = static_cast<std::int64_t>(rng.next_u64() % 1000);
  c.orbit_a = random_double(rng);
  c.orbit_c_r = random_double(rng);
  c.disjoint_r = random_double(rng);
  c.disjoint_samples = static_cast<std::int64_t>(rng.next_u64() % 5000);
  c.disjoint_c0 = random_double(rng);
  c.crossval_members = static_cast<std::int64_t>(rng.next_u64() % 500);
  c.crossval_s_max = random_double(rng);
  c.crossval_step = random_double(rng);
  c.seed = rng.next_u64();
  c.out = random_word(rng);
  return c;
}

}  // namespace

TEST_CASE("config round-trip on randomized configs") {
  Substream rng(2024, "config", 0);
  for (int i = 0; i < 300; ++i) {
    const ExperimentConfig c = random_config(rng);
    const std::string text = print_config(c);
    const ExperimentConfig back = parse_config(text);
    CHECK(back == c);
    CHECK(print_config(back) == text);
  }
}

TEST_CASE("config text grammar") {
  const auto c = parse_config(
      "# comment line\n"
      "\n"
      "  psi.family = constant_ratio   # trailing comment\n"
      "psi.params=0.5\n"
      "measure.r = 0.1, 0.2 ,0.3\n"
      "weights.alpha =\n"
      "check.classic = true\n"
      "seed = 18446744073709551615\n");
  CHECK(c.psi_family == "constant_ratio");
  CHECK(c.psi_params == std::vector<double>{0.5});
  CHECK(c.measure_r == std::vector<double>{0.1, 0.2, 0.3});
  CHECK(c.alpha.empty());
  CHECK(c.check_classic);
  CHECK(c.seed == 18446744073709551615ULL);
  // later lines win
  CHECK(parse_config("orbit.a = 0.5\norbit.a = 0.7\n").orbit_a == 0.7);
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(parse_config("nope = 1\n"), ValidationError);
  CHECK_THROWS_AS(parse_config("psi.t0\n"), ValidationError);
  CHECK_THROWS_AS(parse_config("psi.t0 = 1.5x\n"), ValidationError);
  CHECK_THROWS_AS(parse_config("dims.m = 1.5\n"), ValidationError);
  CHECK_THROWS_AS(parse_config("check.classic = yes\n"), ValidationError);
  CHECK_THROWS_AS(parse_config("measure.r = 0.1,,0.2\n"), ValidationError);
  ExperimentConfig c;
  CHECK_THROWS_AS(c.set("out", "a#b"), ValidationError);

  ExperimentConfig w;
  w.alpha = {0.3, 0.3};
  w.m = 2;
  CHECK_THROWS_AS(w.validate(), ValidationError);  // weights must sum to 1
  w.alpha = {0.25, 0.75};
  CHECK_NOTHROW(w.validate());
  w.alpha = {1.0};
  CHECK_THROWS_AS(w.validate(), ValidationError);  // wrong length
  ExperimentConfig s;
  s.subcommand = "plot";
  CHECK_THROWS_AS(s.validate(), ValidationError);
  ExperimentConfig t;
  t.psi_family = "tabulated";
  t.psi_params = {2.0, 0.4, 4.0, 0.2};
  CHECK_NOTHROW(t.psi());
  t.psi_params = {2.0, 0.4, 4.0};
  CHECK_THROWS_AS(t.psi(), ValidationError);
}

TEST_CASE("default config validates for every subcommand") {
  for (const char* sub : {"classify", "dani", "check", "measure", "orbit", "disjoint", "crossval"}) {
    ExperimentConfig c;
    c.subcommand = sub;
    CHECK_NOTHROW(c.validate());
  }
}

TEST_CASE("classify with ConstantRatio(0.5), d = 2 prints Divergent") {
  const auto dir = scratch("classify");
  const Run r = run({"classify", "--psi.family", "constant_ratio", "--psi.params", "0.5", "--out", dir.string()});
  CHECK(r.code == 0);
  CHECK(r.out == "Divergent\n");
  const auto doc = nlohmann::json::parse(slurp(dir / "classify.json"));
  CHECK(doc["verdict"] == "Divergent");
}

TEST_CASE("check with A = 0 passes with no uncovered interval") {
  const auto dir = scratch("check");
  const Run r = run({"check", "--out", dir.string()});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("PASS", 0) == 0);
  CHECK(slurp(dir / "uncovered.csv") == "oracle,lo,hi,boundary\n");
  const auto doc = nlohmann::json::parse(slurp(dir / "check.json"));
  CHECK(doc["lattice"]["uncovered"].empty());
}

TEST_CASE("check with both oracles reports agreement") {
  const auto dir = scratch("check_both");
  const Run r = run({"check", "--oracle", "both", "--matrix", "0.41421356237309503", "--psi.family", "constant_ratio",
                     "--psi.params", "0.6", "--psi.t0", "1.5", "--out", dir.string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("oracles agree") != std::string::npos);
  const auto doc = nlohmann::json::parse(slurp(dir / "check.json"));
  CHECK(doc["agreement"]["agree"] == true);
  CHECK(doc["verdict"] == "FAIL");  // c = 0.6 < 1 fails infinitely often for sqrt(2) - 1
}

TEST_CASE("exit codes") {
  const auto dir = scratch("codes");
  const Run d = run({"disjoint", "--r", "0.02", "--out", dir.string()});
  CHECK(d.code == 1);
  CHECK(d.err.find("0.0183156") != std::string::npos);  // e^-4 cap in the message
  const Run u = run({"--no-such-flag"});
  CHECK(u.code == 1);
  CHECK(u.err.find("Usage") != std::string::npos);
  CHECK(run({"--set", "psi.nope=1", "--out", dir.string()}).code == 1);
  CHECK(run({"--set", "missing-equals", "--out", dir.string()}).code == 1);
  const Run b = run({"check", "--horizon", "1e15", "--out", dir.string()});
  CHECK(b.code == 2);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("config file, --set and flags layer in order") {
  const auto dir = scratch("layers");
  fs::create_directories(dir);
  const fs::path cfg = dir / "run.cfg";
  std::ofstream(cfg) << "subcommand = classify\npsi.family = constant_ratio\npsi.params = 0.9\nseed = 5\n";
  const Run r = run({"--config", cfg.string(), "--set", "psi.params=0.5", "--seed", "9", "--out",
                     (dir / "o").string()});
  CHECK(r.code == 0);
  const ExperimentConfig echo = parse_config(slurp(dir / "o" / "config.txt"));
  CHECK(echo.subcommand == "classify");
  CHECK(echo.psi_params == std::vector<double>{0.5});
  CHECK(echo.seed == 9);
  CHECK(echo.out == (dir / "o").string());
  // the echoed config reproduces the run
  const Run again = run({"--config", (dir / "o" / "config.txt").string()});
  CHECK(again.code == 0);
  CHECK(again.out == r.out);
}

TEST_CASE("missing nested output directory is created") {
  const auto dir = scratch("nested") / "a" / "b";
  CHECK(run({"classify", "--out", dir.string()}).code == 0);
  CHECK(fs::exists(dir / "manifest.json"));
}

TEST_CASE("manifest digests match file contents and the manifest is last") {
  const auto dir = scratch("manifest");
  REQUIRE(run({"dani", "--out", dir.string()}).code == 0);
  const auto doc = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(doc["artifact_version"] == kArtifactVersion);
  CHECK(doc["config"]["subcommand"] == "dani");
  CHECK(doc["config"].size() == config_keys().size());
  std::set<std::string> listed;
  for (const auto& f : doc["files"]) {
    const std::string body = slurp(dir / f["name"].get<std::string>());
    CHECK(f["sha256"] == sha256_hex(body));
    CHECK(f["bytes"] == body.size());
    listed.insert(f["name"]);
  }
  std::set<std::string> present;
  for (const auto& e : fs::directory_iterator(dir)) present.insert(e.path().filename().string());
  present.erase("manifest.json");
  CHECK(listed == present);
  CHECK(listed.count("dani_rate.dat") == 1);
}

namespace {

std::map<std::string, std::string> outputs(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    const std::string name = e.path().filename().string();
    if (name != "manifest.json") files[name] = slurp(e.path());
  }
  return files;
}

std::string digests(const fs::path& dir) {
  auto doc = nlohmann::json::parse(slurp(dir / "manifest.json"));
  return doc["files"].dump();
}

}  // namespace

TEST_CASE("re-runs and thread counts give byte-identical outputs") {
  const std::vector<std::vector<std::string>> cases = {
      {"measure", "--samples", "1500", "--kind", "primed"},
      {"orbit", "--ensemble", "50", "--k-hi", "30"},
      {"disjoint", "--samples", "40"},
      {"crossval", "--members", "4", "--s-max", "12"},
      {"dani"},
      {"check", "--matrix", "0.3", "--horizon", "500"},
  };
  int idx = 0;
  for (const auto& base : cases) {
    CAPTURE(base[0]);
    std::vector<fs::path> dirs;
    for (const char* threads : {"1", "1", "3"}) {
      const fs::path dir = scratch("det_" + std::to_string(idx++));
      // same out path for each run so the config echo matches too
      const fs::path shared = scratch("det_shared_" + base[0]);
      auto args = base;
      args.insert(args.end(), {"--seed", "77", "--threads", threads, "--out", shared.string()});
      REQUIRE(run(args).code == 0);
      fs::rename(shared, dir);
      dirs.push_back(dir);
    }
    CHECK(outputs(dirs[0]) == outputs(dirs[1]));
    CHECK(outputs(dirs[0]) == outputs(dirs[2]));
    CHECK(digests(dirs[0]) == digests(dirs[2]));
  }
}

TEST_CASE("a different seed changes Monte Carlo outputs") {
  const auto a = scratch("seed_a"), b = scratch("seed_b");
  REQUIRE(run({"measure", "--samples", "1500", "--seed", "1", "--out", a.string()}).code == 0);
  REQUIRE(run({"measure", "--samples", "1500", "--seed", "2", "--out", b.string()}).code == 0);
  CHECK(slurp(a / "measure.csv") != slurp(b / "measure.csv"));
}

TEST_CASE("report writer") {
  const auto dir = scratch("writer");
  ReportWriter rw(dir);
  rw.write_csv("t.csv", {"a", "b"}, {{"1", "x,y"}, {"say \"hi\"", ""}});
  CHECK(slurp(dir / "t.csv") == "a,b\n1,\"x,y\"\n\"say \"\"hi\"\"\",\n");
  rw.write_plot("p.dat", "r", "mu", "r^2 log(1/r)", {0.5, 0.25}, {1.0, 0.1});
  CHECK(slurp(dir / "p.dat") == "# r mu\n# reference: r^2 log(1/r)\n0.5 1\n0.25 0.1\n");
  CHECK_THROWS_AS(rw.write_csv("bad.csv", {"a"}, {{"1", "2"}}), std::logic_error);
  REQUIRE(rw.files().size() == 2);
  CHECK(rw.files()[0].sha256 == sha256_hex(slurp(dir / "t.csv")));

  // IO errors carry the path
  std::ofstream(dir / "blocker") << "x";
  try {
    ReportWriter bad(dir / "blocker" / "sub");
    FAIL("expected an error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("blocker") != std::string::npos);
  }
}
