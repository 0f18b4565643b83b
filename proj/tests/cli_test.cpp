// End-to-end checks of the installed command line interface. The binary path
// comes in through IMELA_BIN_PATH; everything runs in the test working
// directory.

#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "imela/trace.hpp"

namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string(IMELA_BIN_PATH) + " " + args + " > cli_stdout.json 2> cli_stderr.txt";
  return std::system(cmd.c_str());
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("run writes a converged trace on the counterexample") {
    REQUIRE(run_cli("run --problem counterexample --method imela --budget 1500 --out cli_a.csv") == 0);
    auto trace = imela::read_trace_csv_file("cli_a.csv");
    REQUIRE(!trace.rows.empty());
    REQUIRE(trace.rows.back().stat.has_value());
    CHECK(*trace.rows.back().stat <= 1e-3);
    const std::string summary = slurp("cli_stdout.json");
    CHECK(summary.find("\"m_lambda\"") != std::string::npos);
    CHECK(summary.find("\"K_apriori\"") != std::string::npos);
  }

  TEST_CASE("rerunning the same config is byte identical") {
    REQUIRE(run_cli("run --problem polytope-rand --seed 11 --method imela --budget 600 --out cli_b1.csv") == 0);
    REQUIRE(run_cli("run --problem polytope-rand --seed 11 --method imela --budget 600 --out cli_b2.csv") == 0);
    CHECK(slurp("cli_b1.csv") == slurp("cli_b2.csv"));
    CHECK(!slurp("cli_b1.csv").empty());
  }

  TEST_CASE("ssg traces leave stat and comp_slack empty") {
    REQUIRE(run_cli("run --problem counterexample --method ssg --params eps=1e-5 --params eta=1e-3 "
                    "--budget 200 --out cli_ssg.csv") == 0);
    auto trace = imela::read_trace_csv_file("cli_ssg.csv");
    for (const auto& row : trace.rows) {
      CHECK_FALSE(row.stat.has_value());
      CHECK_FALSE(row.comp_slack.has_value());
      CHECK(!row.branch.empty());
    }
  }

  TEST_CASE("tune returns the single point of a degenerate grid") {
    REQUIRE(run_cli("tune --problem counterexample --method ippp --grid rho=500 --budget 300 "
                    "--out cli_tune.csv") == 0);
    const std::string summary = slurp("cli_stdout.json");
    CHECK(summary.find("\"candidates\": 1") != std::string::npos);
    CHECK(summary.find("\"rho\": 500.0") != std::string::npos);
    const std::string table = slurp("cli_tune.csv");
    CHECK(table.find("candidate,params,score,failed,oracle_used,failure") == 0);
  }

  TEST_CASE("report merges traces onto the union oracle grid") {
    REQUIRE(run_cli("run --problem counterexample --method imela --budget 400 --out cli_m1.csv") == 0);
    REQUIRE(run_cli("run --problem counterexample --method splm --params eta=0.05 --budget 400 "
                    "--out cli_m2.csv") == 0);
    REQUIRE(run_cli("report cli_m1.csv cli_m2.csv --out cli_merged.csv") == 0);
    const std::string merged = slurp("cli_merged.csv");
    CHECK(merged.find("cum_oracle,cli_m1_obj") == 0);
    CHECK(merged.find("cli_m2_obj") != std::string::npos);
  }

  TEST_CASE("schema mismatches name the offending file") {
    std::ofstream bad("cli_bad.csv", std::ios::binary);
    bad << "# imela trace v9\nwhatever\n";
    bad.close();
    CHECK(run_cli("report cli_bad.csv --out cli_x.csv") != 0);
    CHECK(slurp("cli_stderr.txt").find("cli_bad.csv") != std::string::npos);
  }

  TEST_CASE("bad configs exit nonzero with a diagnostic") {
    CHECK(run_cli("run --problem nope --method imela --out cli_y.csv") != 0);
    CHECK(slurp("cli_stderr.txt").find("unknown problem") != std::string::npos);
    CHECK(run_cli("run --problem counterexample --method imela --params bogus=1 --out cli_z.csv") != 0);
    CHECK(run_cli("run --problem fairness --method imela --out cli_w.csv") != 0);  // missing --data
  }

  TEST_CASE("fairness problem runs from a csv dataset") {
    {
      std::ofstream data("cli_fair.csv", std::ios::binary);
      data << "f1,f2,label,group\n";
      imela::Rng rng(77);
      for (int i = 0; i < 120; ++i) {
        const int grp = rng.uniform() < 0.5 ? 1 : 0;
        const double f1 = rng.normal() + (grp ? 0.8 : 0.0);
        const double f2 = rng.normal();
        const int label = (f1 + f2 + 0.3 * rng.normal()) > 0.0 ? 1 : -1;
        data << f1 << ',' << f2 << ',' << label << ',' << grp << "\n";
      }
    }
    REQUIRE(run_cli("run --problem fairness --data cli_fair.csv --seed 5 --radius 20 --method imela "
                    "--budget 800 --out cli_fair_trace.csv") == 0);
    auto trace = imela::read_trace_csv_file("cli_fair_trace.csv");
    CHECK(!trace.rows.empty());
    CHECK(trace.rows.back().infeas <= 1e-2);
  }
}
