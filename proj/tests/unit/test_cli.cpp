#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "check.hpp"
#include "doctest.h"
#include "edgelab/cli.hpp"
#include "edgelab/fredholm.hpp"
#include "json.hpp"

using namespace edgelab;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  args.insert(args.begin(), "edge-lab");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

/// Fresh scratch directory under the system temp path.
fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("edgelab_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string l;
  while (std::getline(ss, l)) out.push_back(l);
  return out;
}

}  // namespace

TEST_CASE("usage errors exit with code 2") {
  CHECK(run({}).code == cli::kUsage);
  CHECK(run({"bogus"}).code == cli::kUsage);
  const auto dir = scratch("usage");
  const auto r = run({"equilibrium", "--out", dir.string()});
  CHECK(r.code == cli::kUsage);
  CHECK(r.err.find("--potential") != std::string::npos);
  CHECK(run({"equilibrium", "--potential", "poly:0,0,-2", "--out", dir.string()}).code == cli::kUsage);
  CHECK(run({"recurrence", "--potential", "poly:0,0,2", "--out", dir.string()}).code == cli::kUsage);
  CHECK(run({"tw", "--s-range", "1:0:0.1", "--out", dir.string()}).code == cli::kUsage);
  CHECK(run({"tw", "--quad-order", "3", "--out", dir.string()}).code == cli::kUsage);
  CHECK(run({"equilibrium", "--potential", "poly:0,0,2", "--kind", "three-cut", "--out", dir.string()}).code ==
        cli::kUsage);
  CHECK(run({"--help"}).code == cli::kOk);
}

TEST_CASE("verify rejects n below four as a diagnostic failure") {
  const auto dir = scratch("small_n");
  const auto r = run({"verify", "--potential", "poly:0,0,2", "--n-list", "2", "--out", dir.string()});
  CHECK(r.code == cli::kDiagnosticFailure);
  CHECK(r.out.find("insufficient n") != std::string::npos);
  const auto j = nlohmann::json::parse(slurp(dir / "verify.json"));
  CHECK(j["status"] == "insufficient n");
  CHECK(j["pass"] == false);
}

TEST_CASE("equilibrium output for the Gaussian and the two-cut quartic") {
  const auto dir = scratch("eq");
  REQUIRE(run({"equilibrium", "--potential", "poly:0,0,2", "--out", dir.string()}).code == cli::kOk);
  auto j = nlohmann::json::parse(slurp(dir / "equilibrium.json"));
  CHECK(j["kind"] == "OneCut");
  CHECK(j["a"].get<double>() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(j["gamma"].get<double>() == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(j["energy"].get<double>() == doctest::Approx(0.75 + std::log(2.0)).epsilon(1e-10));
  const auto rows = lines(slurp(dir / "equilibrium_density.csv"));
  CHECK(rows.size() == 2 + 801);
  CHECK(rows[1] == "lambda,rho");

  const auto dir2 = scratch("eq2");
  REQUIRE(run({"equilibrium", "--potential", "poly:0,0,-2,0,0.25", "--out", dir2.string()}).code == cli::kOk);
  j = nlohmann::json::parse(slurp(dir2 / "equilibrium.json"));
  CHECK(j["kind"] == "TwoCut");
  CHECK(j["a"].get<double>() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-8));
  CHECK(j["b"].get<double>() == doctest::Approx(std::sqrt(6.0)).epsilon(1e-8));
  CHECK(j["edges"].size() == 4);
  // forcing the wrong topology is a numerical failure, not a crash
  const auto forced = run({"equilibrium", "--potential", "poly:0,0,-2,0,0.25", "--kind", "one-cut", "--out",
                           dir2.string()});
  CHECK(forced.code != cli::kOk);
}

TEST_CASE("tw table: row count, monotone column, identical to the library") {
  const auto dir = scratch("tw");
  REQUIRE(run({"tw", "--s-range", "-6:4:0.1", "--out", dir.string()}).code == cli::kOk);
  const auto rows = lines(slurp(dir / "tw.csv"));
  REQUIRE(rows.size() == 2 + 101);
  CHECK(rows[0].rfind("# edge-lab tw config_hash=", 0) == 0);
  CHECK(rows[1] == "s,F2");
  double prev = -1.0;
  std::vector<double> s, f;
  for (std::size_t i = 2; i < rows.size(); ++i) {
    const auto comma = rows[i].find(',');
    s.push_back(std::stod(rows[i].substr(0, comma)));
    f.push_back(std::stod(rows[i].substr(comma + 1)));
    CHECK(f.back() >= prev);
    prev = f.back();
  }
  CHECK(s.front() == -6.0);
  CHECK(s.back() == doctest::Approx(4.0).epsilon(1e-12));
  // shortest round-trip text parses back to the exact library value
  CHECK(f.front() == tw_cdf(s.front()).det);
  CHECK(f.back() == tw_cdf(s.back()).det);
  CHECK(f[60] == tw_cdf(s[60]).det);

  const auto side = nlohmann::json::parse(slurp(dir / "tw.json"));
  REQUIRE(side["refinement"].size() == 101);
  for (const auto& r : side["refinement"]) {
    CHECK(r.contains("quad_order"));
    CHECK(r["history"].size() >= 2);
  }
}

TEST_CASE("outputs embed the config hash and reruns are byte-identical") {
  const auto d1 = scratch("hash1");
  const auto d2 = scratch("hash2");
  const std::vector<std::string> base{"kernel-edge", "--potential", "poly:0,0,2", "--n", "40", "--out"};
  auto a1 = base, a2 = base;
  a1.push_back(d1.string());
  a2.push_back(d2.string());
  REQUIRE(run(a1).code == cli::kOk);
  REQUIRE(run(a2).code == cli::kOk);
  for (const char* name : {"kernel_edge_n40.csv", "kernel_edge_n40.json"}) {
    CHECK(slurp(d1 / name) == slurp(d2 / name));
  }
  cli::RunConfig cfg;
  cfg.command = "kernel-edge";
  cfg.potential = "poly:0,0,2";
  cfg.n_list = {40};
  const std::string hash = cli::config_hash(cfg);
  CHECK(hash.size() == 16);
  CHECK(slurp(d1 / "kernel_edge_n40.csv").find("config_hash=" + hash) != std::string::npos);
  const auto j = nlohmann::json::parse(slurp(d1 / "kernel_edge_n40.json"));
  CHECK(j["provenance"]["config_hash"] == hash);
  CHECK(j["provenance"]["modules"].size() >= 6);
  // the output directory is not part of the configuration hash
  CHECK(j["provenance"]["config"].get<std::string>().find("hash1") == std::string::npos);
}

TEST_CASE("config hashing") {
  CHECK(cli::fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(cli::fnv1a("a") == 0xaf63dc4c8601ec8cULL);
  cli::RunConfig a, b;
  a.command = b.command = "tw";
  CHECK(cli::config_hash(a) == cli::config_hash(b));
  b.tol = 1e-9;
  CHECK(cli::config_hash(a) != cli::config_hash(b));
}

TEST_CASE("config files parse and command-line flags override them") {
  const auto entries = cli::parse_config_text("# comment\npotential = poly:0,0,2  # trailing\n\nn_list=10, 20\n");
  CHECK(entries.size() == 2);
  CHECK(entries.at("potential") == "poly:0,0,2");
  cli::RunConfig cfg;
  cli::apply_config(cfg, entries);
  CHECK(cfg.n_list == std::vector<int>{10, 20});
  CHECK(testing::catch_error([] { cli::parse_config_text("novalue\n"); }));
  CHECK(testing::catch_error([] { cli::parse_config_text("=3\n"); }));
  CHECK(testing::catch_error([&] { cli::apply_config(cfg, {{"colour", "red"}}); }));
  CHECK(testing::catch_error([&] { cli::apply_config(cfg, {{"n", "ten"}}); }));
  CHECK(testing::catch_error([&] { cli::apply_config(cfg, {{"tol", "0"}}); }));

  const auto r = cli::parse_s_range("-1:1:0.5");
  CHECK(r.points() == std::vector<double>{-1.0, -0.5, 0.0, 0.5, 1.0});
  CHECK(cli::parse_s_range("0:0.3:0.1").points().size() == 4);
  CHECK(testing::catch_error([] { cli::parse_s_range("0:1"); }));
  CHECK(testing::catch_error([] { cli::parse_s_range("0:1:0"); }));

  const auto dir = scratch("config");
  const fs::path file = dir / "run.cfg";
  std::ofstream(file) << "potential=poly:0,0,2\ns_range=0:1:0.5\nn=30\n";
  REQUIRE(run({"airy", "--config", file.string(), "--s-range", "0:2:1", "--out", dir.string()}).code == cli::kOk);
  const auto rows = lines(slurp(dir / "airy.csv"));
  REQUIRE(rows.size() == 2 + 3);
  CHECK(rows.back().rfind("2,", 0) == 0);
  CHECK(run({"airy", "--config", (dir / "missing.cfg").string(), "--out", dir.string()}).code == cli::kUsage);
}

TEST_CASE("recurrence and hole-probability outputs") {
  const auto dir = scratch("rec");
  REQUIRE(run({"recurrence", "--potential", "poly:0,0,2", "--n-list", "20,40", "--out", dir.string()}).code ==
          cli::kOk);
  const auto rows = lines(slurp(dir / "recurrence_n40.csv"));
  const auto meta = nlohmann::json::parse(slurp(dir / "recurrence_n40.json"));
  CHECK(rows.size() == 2 + meta["n1"].get<std::size_t>() + 1);
  CHECK(rows[2 + 39].rfind("39,", 0) == 0);
  CHECK(fs::exists(dir / "recurrence_n20.csv"));

  REQUIRE(run({"hole-prob", "--potential", "poly:0,0,2", "--n", "100", "--s-range", "0:1:1", "--out",
               dir.string()}).code == cli::kOk);
  const auto j = nlohmann::json::parse(slurp(dir / "hole_prob_n100.json"));
  REQUIRE(j["rows"].size() == 2);
  for (const auto& r : j["rows"]) {
    CHECK(std::abs(r["E_n"].get<double>() - r["F2"].get<double>()) < 0.05);
  }
}
