// End-to-end checks of the permitsim binary: exit codes, output schemas, and
// byte-level determinism of the data files.
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

int failures = 0;

void check(bool ok, const std::string& what) {
  std::printf("%s %s\n", ok ? "[ok]" : "[FAIL]", what.c_str());
  if (!ok) ++failures;
}

int run(const std::string& args) {
  const std::string cmd = std::string(PERMITSIM_BIN) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

int run_capture(const std::string& args, std::string& out) {
  const fs::path tmp = fs::temp_directory_path() / "permitsim_cli_stdout.txt";
  const std::string cmd =
      std::string(PERMITSIM_BIN) + " " + args + " >" + tmp.string() + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  std::ifstream in(tmp);
  std::ostringstream buf;
  buf << in.rdbuf();
  out = buf.str();
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string first_line(const std::string& text) {
  return text.substr(0, text.find('\n'));
}

}  // namespace

int main() {
  const fs::path work = fs::temp_directory_path() / "permitsim_cli_test";
  fs::remove_all(work);
  fs::create_directories(work);
  const std::string config = std::string(CONFIG_DIR) + "/five_firms.json";

  // --- montecarlo: determinism of every data output ------------------------
  const fs::path out_a = work / "mc_a";
  const fs::path out_b = work / "mc_b";
  check(run("montecarlo --config " + config + " --paths 60 --seed 42 --out " + out_a.string()) ==
            0,
        "montecarlo exits 0");
  check(run("montecarlo --config " + config + " --paths 60 --seed 42 --out " + out_b.string()) ==
            0,
        "montecarlo repeat exits 0");
  for (const char* name : {"nets.csv", "cdf.csv", "pdf.csv", "summary.json", "risk.json"}) {
    check(slurp(out_a / name) == slurp(out_b / name),
          std::string("byte-identical per seed: ") + name);
    check(!slurp(out_a / name).empty(), std::string("non-empty: ") + name);
  }
  run("montecarlo --config " + config + " --paths 60 --seed 7 --out " + (work / "mc_c").string());
  check(slurp(out_a / "nets.csv") != slurp(work / "mc_c" / "nets.csv"),
        "different seed changes the sample");
  check(first_line(slurp(out_a / "nets.csv")) == "path_index,x_in,x_out,net",
        "nets.csv schema");
  check(fs::exists(out_a / "run_manifest.json"), "manifest written");

  // stochastic matching and the paper sign convention are wired through
  const fs::path out_s = work / "mc_stochastic";
  check(run("montecarlo --config " + config +
            " --paths 30 --seed 42 --matching stochastic --risk-convention paper --out " +
            out_s.string()) == 0,
        "stochastic matching run exits 0");
  const std::string risk_json = slurp(out_s / "risk.json");
  check(risk_json.find("\"convention\": \"paper\"") != std::string::npos,
        "risk report carries the selected convention");

  // --- adopt ----------------------------------------------------------------
  const fs::path adopt_out = work / "adopt";
  check(run("adopt --config " + config + " --pg-sweep 1.5,2.5,3.5,4.5 --out " +
            adopt_out.string()) == 0,
        "adopt exits 0");
  for (const char* name :
       {"trajectory_no_support.csv", "trajectory_support.csv", "adoption_times.csv",
        "adoption_summary.csv", "sweep_adoption.csv", "sweep_first_adoption.csv"})
    check(fs::exists(adopt_out / name), std::string("adopt output exists: ") + name);
  check(first_line(slurp(adopt_out / "trajectory_support.csv")) ==
            "period,firm,status,expected_price",
        "trajectory schema");

  // --- market ---------------------------------------------------------------
  const fs::path positions = work / "positions.json";
  std::ofstream(positions) << R"({"positions": [
      {"id": "a", "x": -1.0, "tech": "new", "profit": 5.0},
      {"id": "b", "x": 1.0, "profit": 5.0}]})";
  std::string report;
  check(run_capture("market " + positions.string() + " --penalty 10", report) == 0,
        "market exits 0");
  check(report.find("\"price\": 6.93485") != std::string::npos,
        "market price matches the single-seller equilibrium");

  std::string supported;
  check(run_capture("market " + positions.string() + " --penalty 10 --price-support 5",
                    supported) == 0,
        "market with support exits 0");
  check(supported.find("\"price\": 8.41") != std::string::npos,
        "support floor lifts the single-seller price");

  const fs::path no_supply = work / "no_supply.json";
  std::ofstream(no_supply) << R"({"positions": [{"id": "b", "x": 2.0}]})";
  std::string starving;
  check(run_capture("market " + no_supply.string() + " --penalty 10", starving) == 0,
        "no-supply market still reports");
  check(starving.find("no supply") != std::string::npos, "no-supply note present");
  check(starving.find("\"uncovered\": 2.0") != std::string::npos,
        "entire need penalized without supply");

  // --- error paths ----------------------------------------------------------
  const fs::path bad_config = work / "bad.json";
  std::ofstream(bad_config) << "{ not json";
  check(run("montecarlo --config " + bad_config.string() + " --paths 5 --out " +
            (work / "x1").string()) == 2,
        "malformed config exits 2");

  const fs::path invalid_config = work / "invalid.json";
  {
    std::string text = slurp(config);
    const auto pos = text.find("\"price_support\": 5.0");
    text.replace(pos, std::string("\"price_support\": 5.0").size(), "\"price_support\": 50.0");
    std::ofstream(invalid_config) << text;
  }
  check(run("adopt --config " + invalid_config.string() + " --out " + (work / "x2").string()) ==
            2,
        "invariant violation exits 2");

  const fs::path bad_positions = work / "bad_positions.json";
  std::ofstream(bad_positions) << "{\"positions\": [\n  {\"id\": \"a\" \"x\": 1}\n]}";
  std::string parse_err;
  check(run_capture("market " + bad_positions.string() + " --penalty 10", parse_err) == 2,
        "malformed positions exits 2");

  // nine undecided firms over eight periods: 8^9 scenarios > default budget
  const fs::path huge = work / "huge.json";
  {
    std::ostringstream firms;
    firms << "[";
    for (int i = 0; i < 9; ++i) {
      firms << (i ? "," : "")
            << R"({"q0": 100, "u_old": 1.14, "d_old": 1.06, "u_new": 1.09, "d_new": 1.03,
                   "cost_new": 90, "s_up": 6, "s_down": 4})";
    }
    firms << "]";
    std::ofstream(huge) << R"({"policy": {"horizon": 8, "penalty": 10, "price_support": 5,
        "allocation": {"family": {"first": {"alpha": -0.4, "beta": 25},
                                  "last": {"alpha": -1.5, "beta": 20}}}},
        "economy": {"q": 0.5, "r": 0.05, "rho": 0.1},
        "firms": {"explicit": )"
                    << firms.str() << "}}";
  }
  check(run("adopt --config " + huge.string() + " --out " + (work / "x3").string()) == 4,
        "enumeration budget exceeded exits 4");

  std::printf("%s\n", failures == 0 ? "cli: all checks passed" : "cli: FAILURES");
  return failures == 0 ? 0 : 1;
}
