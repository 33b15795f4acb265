#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "tss/config.hpp"
#include "tss/dataset.hpp"
#include "tss/rng.hpp"

using namespace tss;
using nlohmann::json;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(TSS_BIN) + " " + args;
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("design serialization round trip") {
  const SimDesign d = preset_design(PresetCase::C3B, 40, PresetDist::T5, {.4, .5}, 99u);
  const SimDesign back = design_from_json(design_to_json(d));
  const SimData a = generate(d, 2);
  const SimData b = generate(back, 2);
  CHECK((a.X - b.X).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.y - b.y).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("strict config schema") {
  json good = {
      {"command", "screen"},
      {"preset", "table1"},
      {"cell", "gaussian,gamma=.4,alpha=.6,p=1000"},
      {"reps", 10},
      {"seed", 7},
      {"method", {{"screen", "glss"}, {"band", 15}}},
      {"output", {{"path", ""}, {"format", "csv"}}},
  };
  CHECK_NOTHROW(parse_run_config(good));

  SUBCASE("unknown top-level key") {
    json bad = good;
    bad["repz"] = 10;
    CHECK_THROWS_WITH_AS(parse_run_config(bad), doctest::Contains("repz"), ConfigError);
  }
  SUBCASE("unknown nested key") {
    json bad = good;
    bad["method"]["bandz"] = 3;
    CHECK_THROWS_WITH_AS(parse_run_config(bad), doctest::Contains("bandz"), ConfigError);
  }
  SUBCASE("unknown command") {
    json bad = good;
    bad["command"] = "screne";
    CHECK_THROWS_AS(parse_run_config(bad), ConfigError);
  }
  SUBCASE("conflicting selection rules") {
    json bad = good;
    bad["selection"] = {{"top", 5}, {"threshold", 0.5}};
    CHECK_THROWS_AS(parse_run_config(bad), ConfigError);
  }
}

TEST_CASE("cell parsing") {
  const PresetCell cell = parse_cell("gaussian,gamma=.4,alpha=.6,p=1000");
  CHECK(*cell.dist == PresetDist::Gaussian);
  CHECK(*cell.gamma == doctest::Approx(0.4));
  CHECK(*cell.alpha == doctest::Approx(0.6));
  CHECK(*cell.p == 1000);
  CHECK_THROWS_AS(parse_cell("gaussain"), ConfigError);
  CHECK_THROWS_AS(parse_cell("rho=.4"), ConfigError);
}

TEST_CASE("csv ingest and export") {
  SUBCASE("numeric round trip keeps full precision") {
    TimeSeriesDataset data;
    Rng rng(7u);
    data.values.resize(9, 3);
    for (int i = 0; i < 9; ++i)
      for (int j = 0; j < 3; ++j) data.values(i, j) = rng.gaussian() * std::pow(10.0, j - 1);
    data.columns = {"a", "b", "c"};
    write_csv(data, "cli_roundtrip.csv");
    const TimeSeriesDataset back = ingest_csv("cli_roundtrip.csv");
    REQUIRE(back.cols() == 3);
    REQUIRE(back.rows() == 9);
    CHECK(back.columns == data.columns);
    CHECK((back.values - data.values).cwiseAbs().maxCoeff() == 0.0);
    std::remove("cli_roundtrip.csv");
  }
  SUBCASE("simple header dataset") {
    std::ofstream("cli_small.csv") << "u,v\n1,2\n3,4\n5,6\n";
    const TimeSeriesDataset d = ingest_csv("cli_small.csv");
    CHECK(d.rows() == 3);
    CHECK(d.columns == std::vector<std::string>{"u", "v"});
    CHECK(d.values(2, 1) == 6.0);
    std::remove("cli_small.csv");
  }
  SUBCASE("time column is preserved as labels") {
    std::ofstream("cli_time.csv") << "date,v\n2001-01,2\n2001-02,4\n";
    CsvSchema schema;
    schema.time_column = "date";
    const TimeSeriesDataset d = ingest_csv("cli_time.csv", schema);
    CHECK(d.cols() == 1);
    CHECK(d.time == std::vector<std::string>{"2001-01", "2001-02"});
    std::remove("cli_time.csv");
  }
  SUBCASE("non-numeric cell names its location") {
    std::ofstream("cli_bad.csv") << "a,b\n1,2\n3,4\n5,4\n2,1\n7,oops\n";
    CHECK_THROWS_WITH_AS(ingest_csv("cli_bad.csv"), doctest::Contains("row 5, column 2"),
                         CsvError);
    std::remove("cli_bad.csv");
  }
  SUBCASE("ragged rows and NaN are rejected") {
    std::ofstream("cli_ragged.csv") << "a,b\n1,2\n3\n";
    CHECK_THROWS_AS(ingest_csv("cli_ragged.csv"), CsvError);
    std::remove("cli_ragged.csv");
    std::ofstream("cli_nan.csv") << "a,b\n1,nan\n";
    CHECK_THROWS_AS(ingest_csv("cli_nan.csv"), CsvError);
    std::remove("cli_nan.csv");
  }
}

TEST_CASE("cli end to end") {
  SUBCASE("simulate is byte-identical across runs") {
    REQUIRE(run_cli("simulate --preset c1 --cell gaussian,gamma=.4,alpha=.6,p=8 --seed 3 "
                    "--out cli_sim_a.csv") == 0);
    REQUIRE(run_cli("simulate --preset c1 --cell gaussian,gamma=.4,alpha=.6,p=8 --seed 3 "
                    "--out cli_sim_b.csv") == 0);
    CHECK(slurp("cli_sim_a.csv") == slurp("cli_sim_b.csv"));
    CHECK(!slurp("cli_sim_a.csv").empty());
    std::remove("cli_sim_b.csv");
  }
  SUBCASE("screen on a csv with a constant column warns and scores it zero") {
    {
      std::ofstream out("cli_const.csv");
      out << "x1,x2,y\n";
      Rng rng(11u);
      for (int i = 0; i < 30; ++i) {
        const double x1 = rng.gaussian();
        out << x1 << ",5.0," << (2 * x1 + 0.1 * rng.gaussian()) << "\n";
      }
    }
    REQUIRE(run_cli("screen --data cli_const.csv --target y --method sis --top 1 "
                    "--out cli_const_report.csv 2> cli_const_err.txt") == 0);
    const std::string report = slurp("cli_const_report.csv");
    CHECK(report.find("x2,sis,0,") != std::string::npos);  // zero score
    CHECK(slurp("cli_const_err.txt").find("zero-variance") != std::string::npos);
    std::remove("cli_const.csv");
    std::remove("cli_const_report.csv");
    std::remove("cli_const_err.txt");
  }
  SUBCASE("explain prints the resolved config and exits cleanly") {
    REQUIRE(run_cli("screen --preset table1 --cell gaussian,gamma=.4,alpha=.6,p=1000 "
                    "--reps 5 --explain > cli_explain.json") == 0);
    const auto parsed = json::parse(slurp("cli_explain.json"));
    CHECK(parsed["command"] == "screen");
    CHECK(parsed["reps"] == 5);
    CHECK(parsed["method"]["band"] == 15);
    std::remove("cli_explain.json");
  }
  SUBCASE("validation failures exit with code 1") {
    CHECK(run_cli("screen --preset table9 --reps 2 2> /dev/null") == 1);
    CHECK(run_cli("screen --data does_not_exist.csv --target y 2> /dev/null") == 1);
  }
  SUBCASE("config file with an unknown key is rejected") {
    std::ofstream("cli_bad_config.json") << R"({"command":"screen","repz":3})";
    CHECK(run_cli("screen --config cli_bad_config.json 2> /dev/null") == 1);
    std::remove("cli_bad_config.json");
  }
  SUBCASE("a small preset experiment emits a csv report") {
    REQUIRE(run_cli("screen --preset table1 --cell gaussian,gamma=.4,alpha=.6,p=60 --reps 4 "
                    "--seed 5 --dn 59 --out cli_table1.csv") == 0);
    const std::string report = slurp("cli_table1.csv");
    CHECK(report.find("design,method,value,mc_se") != std::string::npos);
    CHECK(report.find("sis") != std::string::npos);
    CHECK(report.find("glss") != std::string::npos);
    std::remove("cli_table1.csv");
  }
  std::remove("cli_sim_a.csv");
}
