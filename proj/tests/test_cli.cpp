#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hysup/arc_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CmdResult {
  int exit_code = -1;
  std::string stdout_text;
};

CmdResult run_cli(const std::string& args, const fs::path& dir) {
  fs::create_directories(dir);
  const fs::path out = dir / "stdout.txt";
  const std::string cmd =
      std::string(HYSUP_CLI_PATH) + " " + args + " > " + out.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  CmdResult r;
  r.exit_code = WEXITSTATUS(status);
  std::ifstream in(out);
  std::stringstream ss;
  ss << in.rdbuf();
  r.stdout_text = ss.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "hysup_cli_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("simulate emits a summary that matches the trajectory CSV") {
  const auto dir = fresh_dir("figA");
  const auto r = run_cli("simulate --preset ex1-figA --out " + dir.string(), dir);
  REQUIRE(r.exit_code == 0);

  const json summary = json::parse(slurp(dir / "summary.json"));
  CHECK(summary["termination"] == "Converged");
  CHECK(summary["switch_times"].size() == 1);
  const double t_switch = summary["switch_times"][0]["t"].get<double>();
  CHECK(t_switch > 4.4);
  CHECK(t_switch < 4.8);

  // Round trip: recompute the census from the emitted CSV.
  std::ifstream csv(dir / "trajectory.csv");
  const auto parsed = hysup::read_arc_csv(csv);
  std::size_t q_col = 0;
  for (std::size_t i = 0; i < parsed.columns.size(); ++i) {
    if (parsed.columns[i] == "q") q_col = i;
  }
  int switches = 0;
  for (std::size_t k = 0; k + 1 < parsed.arc.intervals.size(); ++k) {
    const auto& pre = parsed.arc.intervals[k].samples.back();
    const auto& post = parsed.arc.intervals[k + 1].samples.front();
    CHECK(pre.t == post.t);  // jump rows share t
    if ((pre.x[q_col] < 0.5) != (post.x[q_col] < 0.5)) {
      ++switches;
      CHECK(pre.t == t_switch);
    }
  }
  CHECK(switches == 1);

  // The domain file carries the interval structure and termination reason.
  const json domain = json::parse(slurp(dir / "domain.json"));
  CHECK(domain["termination"] == "Converged");
  CHECK(domain["domain"].size() == parsed.arc.intervals.size());
}

TEST_CASE("simulate is byte-deterministic") {
  const auto dir1 = fresh_dir("det1");
  const auto dir2 = fresh_dir("det2");
  REQUIRE(run_cli("simulate --preset ex1-figB --seed 9 --out " + dir1.string(), dir1).exit_code ==
          0);
  REQUIRE(run_cli("simulate --preset ex1-figB --seed 9 --out " + dir2.string(), dir2).exit_code ==
          0);
  CHECK(slurp(dir1 / "trajectory.csv") == slurp(dir2 / "trajectory.csv"));
  CHECK(slurp(dir1 / "summary.json") == slurp(dir2 / "summary.json"));
}

TEST_CASE("a long dwell time delays the handoff") {
  const auto dir = fresh_dir("dwell10");
  const auto r =
      run_cli("simulate --preset ex1-figA --param tau_star=10 --out " + dir.string(), dir);
  REQUIRE(r.exit_code == 0);
  const json summary = json::parse(slurp(dir / "summary.json"));
  REQUIRE(summary["switch_times"].size() == 1);
  // z1 drops below eps1a long before tau reaches 10; the dwell gate dominates.
  CHECK(summary["switch_times"][0]["t"].get<double>() == doctest::Approx(10.0).epsilon(1e-6));
}

TEST_CASE("malformed configuration exits with code 2 and names the field") {
  const auto dir = fresh_dir("badcfg");
  {
    std::ofstream out(dir / "bad.json");
    out << R"({"preset": "ex1-figA", "solver": {"dt": "fast"}})";
  }
  const auto r = run_cli("simulate --config " + (dir / "bad.json").string(), dir);
  CHECK(r.exit_code == 2);
  const json err = json::parse(r.stdout_text);
  CHECK(err["error"]["field"] == "solver.dt");

  const auto r2 = run_cli("simulate --preset no-such-preset", dir);
  CHECK(r2.exit_code == 2);
}

TEST_CASE("design emits the report with the expected keys") {
  const auto dir = fresh_dir("design");
  const auto r = run_cli("design --out " + dir.string(), dir);
  REQUIRE(r.exit_code == 0);
  const json report = json::parse(slurp(dir / "design_report.json"));
  for (const char* key :
       {"eps0b", "eps0a", "eps1b", "eps1a", "tau_star", "lhs_step3", "pass", "provenance"}) {
    CHECK(report.contains(key));
  }
  CHECK(report["pass"].get<bool>());
  CHECK(report["provenance"] == "analytic");
  CHECK(report["lhs_step3"].get<double>() <= 0.015);

  SUBCASE("a failing dwell time is still reported, with exit 1") {
    const auto rf = run_cli("design --tau-star 1 --out " + dir.string(), dir);
    CHECK(rf.exit_code == 1);
    const json failing = json::parse(slurp(dir / "design_report.json"));
    CHECK_FALSE(failing["pass"].get<bool>());
  }
  SUBCASE("nonsensical thresholds exit with code 2") {
    CHECK(run_cli("design --eps1b 0", dir).exit_code == 2);
  }
  SUBCASE("the estimated path is labeled") {
    const auto re = run_cli("design --estimate --out " + dir.string(), dir);
    REQUIRE(re.exit_code == 0);
    const json est = json::parse(slurp(dir / "design_report.json"));
    CHECK(est["provenance"] == "simulated");
  }
}

TEST_CASE("sweep handles empty grids and writes rows in order") {
  const auto dir = fresh_dir("sweep");
  {
    std::ofstream out(dir / "empty.json");
    out << R"({"preset": "ex1-figA", "sweep": {"kind": "delta", "values": []}})";
  }
  const auto r = run_cli("sweep --config " + (dir / "empty.json").string() + " --out " +
                             dir.string(),
                         dir);
  CHECK(r.exit_code == 0);
  const std::string csv = slurp(dir / "sweep.csv");
  CHECK(csv.find("index,delta") == 0);
  CHECK(csv.find('\n') == csv.size() - 1);  // header only

  SUBCASE("delta sweep rows appear in grid order") {
    {
      std::ofstream out(dir / "d.json");
      out << R"({"preset": "ex1-figA", "sweep": {"kind": "delta", "values": [0, 0.005]}})";
    }
    const auto rs = run_cli("sweep --config " + (dir / "d.json").string() + " --jobs 2 --out " +
                                dir.string(),
                            dir);
    REQUIRE(rs.exit_code == 0);
    const std::string rows = slurp(dir / "sweep.csv");
    CHECK(rows.find("\n0,0,") != std::string::npos);
    CHECK(rows.find("\n1,0.005") != std::string::npos);
  }
  SUBCASE("a 5x5 grid of initial conditions all converge") {
    {
      std::ofstream out(dir / "grid.json");
      out << R"({"preset": "ex1-figA",
                 "solver": {"max_t": 25},
                 "sweep": {"kind": "initial", "n": 5, "x1": [-10, 10], "x2": [-10, 10]}})";
    }
    const auto rs = run_cli("sweep --config " + (dir / "grid.json").string() + " --out " +
                                dir.string(),
                            dir);
    REQUIRE(rs.exit_code == 0);
    std::istringstream rows(slurp(dir / "sweep.csv"));
    std::string line;
    std::getline(rows, line);  // header
    int converged = 0;
    while (std::getline(rows, line)) {
      if (line.find("Converged") != std::string::npos) ++converged;
    }
    CHECK(converged == 25);
  }
}

TEST_CASE("the field dump exposes the route potentials and audit regions") {
  const auto dir = fresh_dir("field");
  const auto r = run_cli("field --n 5 --out " + (dir / "field.csv").string(), dir);
  REQUIRE(r.exit_code == 0);
  const std::string csv = slurp(dir / "field.csv");
  CHECK(csv.find("x,y,phi1,phi2,d1,d2,O1,O2") == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 26);  // header + 25 grid rows
}

TEST_CASE("verify exposes the named suites") {
  const auto dir = fresh_dir("verify");
  const auto r = run_cli("verify --suite solver-order", dir);
  CHECK(r.exit_code == 0);
  CHECK(r.stdout_text.find("[PASS] solver-order") != std::string::npos);

  const auto bad = run_cli("verify --suite no-such-suite", dir);
  CHECK(bad.exit_code == 2);
}
