#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <regex>

#include "causal_tradeoff/csv.hpp"
#include "causal_tradeoff/json_io.hpp"
#include "causal_tradeoff/regression.hpp"
#include "causal_tradeoff/svg.hpp"
#include "support/specs.hpp"

using namespace causal_tradeoff;
using namespace causal_tradeoff::testing;
namespace fs = std::filesystem;

#ifndef CAUSAL_TRADEOFF_CLI
#define CAUSAL_TRADEOFF_CLI "causal-tradeoff"
#endif
#ifndef CAUSAL_TRADEOFF_GOLDEN_DIR
#define CAUSAL_TRADEOFF_GOLDEN_DIR "tests/golden"
#endif

namespace {

fs::path temp_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("causal_tradeoff_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(CAUSAL_TRADEOFF_CLI) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

}  // namespace

TEST_CASE("role strings parse and validate") {
  const ColumnRoles roles = ColumnRoles::parse("y=bw,x=stress,z=weekday,w=age+parity,u=hidden");
  CHECK(roles.outcome == "bw");
  CHECK(roles.exposure == "stress");
  CHECK(roles.instrument == "weekday");
  CHECK(roles.covariates == std::vector<std::string>{"age", "parity"});
  CHECK(roles.latent == "hidden");
  CHECK_THROWS_AS(ColumnRoles::parse("y=a,x=b"), ParseError);
  CHECK_THROWS_AS(ColumnRoles::parse("y=a,x=b,z=c,bad"), ParseError);
}

TEST_CASE("csv ingestion binds and standardizes columns") {
  const fs::path dir = temp_dir("csv_basic");
  write_file(dir / "d.csv", "y,x,z,w1\n1,2,3,4\n2,4,5,1\n5,1,2,9\n");
  const Dataset ds = ingest_csv((dir / "d.csv").string(),
                                ColumnRoles::parse("y=y,x=x,z=z,w=w1"));
  CHECK(ds.n() == 3);
  CHECK(std::abs(sample_mean(ds.outcome.values)) < 1e-12);
  CHECK(sample_variance(ds.covariates[0].values) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("csv errors carry the cell location") {
  const fs::path dir = temp_dir("csv_errors");
  write_file(dir / "blank.csv", "y,x\n1,2\n3,\n");
  try {
    read_csv((dir / "blank.csv").string());
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("row 3") != std::string::npos);
    CHECK(std::string(e.what()).find("column 2") != std::string::npos);
  }

  write_file(dir / "alpha.csv", "y,x\n1,2\n3,abc\n");
  CHECK_THROWS_AS(read_csv((dir / "alpha.csv").string()), NonNumeric);

  write_file(dir / "ok.csv", "y,x\n1,2\n3,4\n5,6\n");
  CHECK_THROWS_AS(ingest_csv((dir / "ok.csv").string(),
                             ColumnRoles::parse("y=y,x=x,z=missing")),
                  MissingColumn);
}

TEST_CASE("csv round trip preserves fits to 1e-9") {
  const fs::path dir = temp_dir("csv_roundtrip");
  const GeneratedData data = generate(ind_reference_cov(), 800, 91);
  write_csv((dir / "gen.csv").string(),
            {data.column("y"), data.column("x"), data.column("z"), data.column("w")});
  const Dataset ds =
      ingest_csv((dir / "gen.csv").string(), ColumnRoles::parse("y=y,x=x,z=z,w=w"));
  const RegressionFit direct = fit_ols(standardize(data.column("y")),
                                       {standardize(data.column("x")),
                                        standardize(data.column("w"))});
  const RegressionFit loaded = fit_ols(ds.outcome, {ds.exposure, ds.covariates[0]});
  CHECK((direct.coefficients - loaded.coefficients).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("cli: closed form output matches the committed fixture") {
  const fs::path dir = temp_dir("cli_golden");
  const fs::path golden = fs::path(CAUSAL_TRADEOFF_GOLDEN_DIR);
  const int rc = run_cli("closed-form --spec " + (golden / "spec_er_reference.json").string() +
                         " --out " + dir.string());
  REQUIRE(rc == 0);
  CHECK(slurp(dir / "closed_form.json") == slurp(golden / "closed_form_er_reference.json"));
}

TEST_CASE("cli: sensitivity reports are byte-stable across runs with one seed") {
  const fs::path golden = fs::path(CAUSAL_TRADEOFF_GOLDEN_DIR);
  const fs::path a = temp_dir("cli_stable_a");
  const fs::path b = temp_dir("cli_stable_b");
  const std::string spec = (golden / "spec_er_demo.json").string();
  REQUIRE(run_cli("sensitivity --spec " + spec + " --out " + a.string()) == 0);
  REQUIRE(run_cli("sensitivity --spec " + spec + " --out " + b.string()) == 0);
  CHECK(slurp(a / "report.json") == slurp(b / "report.json"));
  CHECK(slurp(a / "plots" / "sensitivity_exclusion_restriction.svg") ==
        slurp(b / "plots" / "sensitivity_exclusion_restriction.svg"));
}

TEST_CASE("cli: svg legend numbers equal the report fields") {
  const fs::path golden = fs::path(CAUSAL_TRADEOFF_GOLDEN_DIR);
  const fs::path dir = temp_dir("cli_svg");
  REQUIRE(run_cli("sensitivity --spec " + (golden / "spec_er_demo.json").string() +
                  " --out " + dir.string()) == 0);
  const Json report = parse_json_file((dir / "report.json").string())[0];
  const std::string svg = slurp(dir / "plots" / "sensitivity_exclusion_restriction.svg");

  CHECK(svg.find("Benchmarked ER Violation = " +
                 svg_format(report.at("benchmarked_violation").get<double>())) !=
        std::string::npos);
  const Json& branch = report.at("branches")[0];
  CHECK(svg.find("gamma implied (anchor) = " +
                 svg_format(branch.at("gamma_implied").get<double>())) != std::string::npos);
  for (std::size_t m = 0; m < 3; ++m) {
    const double ir = branch.at("ir_per_multiplier")[m].get<double>();
    const double req = branch.at("required_violation_per_multiplier")[m].get<double>();
    CHECK(svg.find("IR = " + svg_format(ir)) != std::string::npos);
    CHECK(svg.find("ER Violation Required = " + svg_format(req)) != std::string::npos);
  }
  CHECK(svg.find("True IR = " + svg_format(report.at("true_ir").get<double>())) !=
        std::string::npos);
}

TEST_CASE("cli: exit codes") {
  const fs::path dir = temp_dir("cli_exit");
  // Infeasible spec: exit 2.
  write_file(dir / "infeasible.json",
             R"({"kind": "perfect_iv", "weights": {"c0": 0.3, "c1": 0.8, "c2": 0.3, "c3": 0.8}})");
  CHECK(run_cli("closed-form --spec " + (dir / "infeasible.json").string()) == 2);
  // Missing file and bad JSON: exit 3.
  CHECK(run_cli("closed-form --spec " + (dir / "missing.json").string()) == 3);
  write_file(dir / "bad.json", "{not json");
  CHECK(run_cli("closed-form --spec " + (dir / "bad.json").string()) == 3);
  // Constant instrument column in user data: exit 2.
  write_file(dir / "const.csv", "y,x,z,w\n1,2,3,4\n2,1,3,2\n4,5,3,1\n0,2,3,2\n");
  CHECK(run_cli("analyze --data " + (dir / "const.csv").string() +
                " --roles y=y,x=x,z=z,w=w") == 2);
  // Unknown role column: exit 3.
  CHECK(run_cli("analyze --data " + (dir / "const.csv").string() +
                " --roles y=y,x=x,z=nope,w=w") == 3);
}

TEST_CASE("cli: oracle flag reports a ratio close to the closed-form ratio") {
  const fs::path golden = fs::path(CAUSAL_TRADEOFF_GOLDEN_DIR);
  const fs::path dir = temp_dir("cli_oracle");
  REQUIRE(run_cli("sensitivity --spec " + (golden / "spec_er_oracle.json").string() +
                  " --expose-u --out " + dir.string()) == 0);
  const Json report = parse_json_file((dir / "report.json").string())[0];
  CHECK(report.at("decomposition").at("oracle").get<bool>());
  const double ir = report.at("branches")[0].at("ir_per_multiplier")[1].get<double>();
  const double truth = report.at("true_ir").get<double>();
  CHECK(std::abs(ir - truth) < 0.08);
}

TEST_CASE("contour: winner surface equals an independent argmin pass") {
  GridAxis strength{"c3", 0.1, 0.7, 0.1};
  GridAxis violation{"c_er", 0.0, 0.4, 0.1};
  ScenarioSpec base = make_spec(ScenarioKind::exclusion_restriction, false,
                                {{"c0", 0.3}, {"c1", 0.7}, {"c2", 0.7},
                                 {"c3", 0.0}, {"c_er", 0.0}});
  const ContourGrid grid = contour(base, strength, violation);
  CHECK(grid.feasible_cells > 0);
  const auto sv = strength.values();
  const auto vv = violation.values();
  for (std::size_t i = 0; i < sv.size(); ++i) {
    for (std::size_t j = 0; j < vv.size(); ++j) {
      const std::size_t at = i * vv.size() + j;
      if (grid.winner[at] == 0) {
        CHECK(std::isnan(grid.lambda2[at]));
        continue;
      }
      double best = grid.lambda2[at];
      int who = 2;
      if (grid.lambda3[at] < best) {
        best = grid.lambda3[at];
        who = 3;
      }
      if (grid.lambda4[at] < best) who = 4;
      CHECK(grid.winner[at] == who);
      // No violation: the IV estimator wins wherever the cell is feasible.
      if (vv[j] == 0.0) CHECK(grid.winner[at] == 4);
    }
  }
  // Strong instrument, moderate violation: the IV route still wins.
  const ContourGrid fine =
      contour(base, GridAxis{"c3", 0.6, 0.6, 0.1}, GridAxis{"c_er", 0.1, 0.1, 0.1});
  CHECK(fine.winner[0] == 4);
}

TEST_CASE("contour with no feasible cell reports an empty grid") {
  ScenarioSpec base = make_spec(ScenarioKind::exclusion_restriction, false,
                                {{"c0", 0.3}, {"c1", 0.9}, {"c2", 0.9},
                                 {"c3", 0.0}, {"c_er", 0.0}});
  CHECK_THROWS_AS(contour(base, GridAxis{"c3", 0.5, 0.9, 0.1},
                          GridAxis{"c_er", 0.5, 0.9, 0.1}),
                  EmptyGrid);
}
