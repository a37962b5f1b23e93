#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "fourthkind/cases.hpp"
#include "fourthkind/error.hpp"
#include "fourthkind/io.hpp"

using namespace fourthkind;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("fourthkind-io-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("csv numbers") {
  CHECK(format_csv_number(0.5) == "0.5");
  CHECK(format_csv_number(1.0 / 3.0) == "0.333333333333");
  CHECK(std::stod(format_csv_number(123456.789)) == 123456.789);
}

TEST_CASE("dataset csv round trip") {
  for (const std::string name : {"gaussian-mean", "coin-2", "lotka-volterra", "quadratic"}) {
    const Scenario s = builtin_scenario(name);
    const Dataset data = scenario_data(s);
    const std::string csv = dataset_to_csv(data, s.spec);
    const Dataset back = dataset_from_csv(csv, s.spec);
    REQUIRE(back.sample_count() == data.sample_count());
    for (std::size_t i = 0; i < data.sample_count(); ++i) {
      CHECK((back.samples[i] - data.samples[i]).cwiseAbs().maxCoeff() <= 1e-11 * (1.0 + data.samples[i].cwiseAbs().maxCoeff()));
    }
    CHECK(back.times.size() == data.times.size());
  }
  const Scenario lv = builtin_scenario("lotka-volterra");
  const std::string header = dataset_to_csv(scenario_data(lv), lv.spec).substr(0, 10);
  CHECK(header.rfind("t,x_1,x_2", 0) == 0);
}

TEST_CASE("dataset csv errors") {
  const Scenario gm = builtin_scenario("gaussian-mean");
  CHECK_THROWS_AS(dataset_from_csv("x_1\nabc\n", gm.spec), IoError);
  CHECK_THROWS_AS(dataset_from_csv("x_1,x_2\n1,2\n", gm.spec), IoError);
  CHECK_THROWS_AS(dataset_from_csv("", gm.spec), IoError);
  CHECK_THROWS_AS(read_dataset_csv("/nonexistent/data.csv", gm.spec), IoError);
  const Scenario lv = builtin_scenario("lotka-volterra");
  CHECK_THROWS_AS(dataset_from_csv("t,x_1,x_2\n0.7,1,2\n", lv.spec), IoError);
}

TEST_CASE("model spec json round trip") {
  for (const std::string& name : builtin_scenario_names()) {
    const ModelSpec spec = builtin_scenario(name).spec;
    const std::string json = model_spec_to_json(spec);
    const ModelSpec back = model_spec_from_json(json);
    CHECK(model_spec_to_json(back) == json);
    CHECK(back.kind == spec.kind);
    CHECK(back.box.lower() == spec.box.lower());
    CHECK(back.sigma == spec.sigma);
  }
  CHECK_THROWS_AS(model_spec_from_json("{\"kind\": \"gaussian-mean\", \"bogus\": 1}"), IoError);
  CHECK_THROWS_AS(model_spec_from_json("not json"), IoError);
}

TEST_CASE("scenario json round trip") {
  for (const std::string& name : builtin_scenario_names()) {
    const Scenario s = builtin_scenario(name);
    const std::string json = scenario_to_json(s);
    CHECK(scenario_to_json(scenario_from_json(json)) == json);
  }
}

TEST_CASE("solution json is exact and deterministic") {
  Scenario s = builtin_scenario("gaussian-mean");
  s.alpha = std::exp(-0.5);
  RandomStream a(5);
  RandomStream b(5);
  const std::string first = solution_to_json(solve_scenario(s, observe(s, a), a));
  const std::string second = solution_to_json(solve_scenario(s, observe(s, b), b));
  CHECK(first == second);
  CHECK(first.find("\"decision\"") != std::string::npos);
  CHECK(first.find("\"risk\"") != std::string::npos);
  CHECK(first.find("\"atoms\"") != std::string::npos);
}

TEST_CASE("atomic writes and report directories") {
  const fs::path dir = scratch("report");
  write_text_file(dir / "a.txt", "hello");
  CHECK(read_text_file(dir / "a.txt") == "hello");
  CHECK_FALSE(fs::exists(dir / "a.txt.tmp"));
  CHECK_THROWS_AS(read_text_file(dir / "missing.txt"), IoError);
  CHECK_THROWS_AS(write_text_file("/nonexistent-dir/x/y.txt", "x"), IoError);

  RunOptions options;
  options.beta_curve = false;
  options.risk_curve = false;
  RandomStream stream(1);
  const ScenarioReport report = run_scenario(builtin_scenario("coin-1"), stream, options);
  write_report(dir, report);
  for (const char* file : {"scenario.json", "data.csv", "mle.json", "solution.json", "trace.csv", "region.csv"}) {
    CHECK(fs::exists(dir / file));
  }
  CHECK_FALSE(fs::exists(dir / "risk_curve.csv"));
  fs::remove_all(dir);
}
