#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "json.hpp"
#include "shapecalc/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace shapecalc;
using namespace shapecalc::cli;
using doctest::Approx;
namespace fs = std::filesystem;

namespace {

const char* kSmall = R"({
  "shapes": [{"id": "c", "type": "circle", "r": 1},
             {"id": "s", "type": "segment", "p0": [0, 0], "p1": [1, 0]}],
  "fields": [{"id": "radial", "type": "radial", "dim": 2},
             {"id": "e1", "type": "constant", "value": [1, 0]}],
  "functionals": [{"id": "length", "type": "length"}],
  "suites": [
    {"id": "a", "suite": "compare", "functional": "length", "shape": "c", "field": "radial"},
    {"id": "b", "suite": "compare", "functional": "length", "shape": "s", "field": "e1"},
    {"id": "neg", "suite": "nullity", "functional": "length", "shape": "c",
     "fields": ["radial"], "expect_fail": true}
  ]
})";

// Replaces the first occurrence of `from` in the small config.
std::string small_with(const std::string& from, const std::string& to) {
  std::string s = kSmall;
  const auto pos = s.find(from);
  REQUIRE(pos != std::string::npos);
  s.replace(pos, from.size(), to);
  return s;
}

std::string config_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path temp_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("shapecalc_test_cli_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("config parsing resolves catalog objects") {
  const ExperimentConfig cfg = parse_config(kSmall);
  CHECK(cfg.shapes.size() == 2);
  CHECK(cfg.fields.size() == 2);
  CHECK(cfg.functionals.count("length") == 1);
  REQUIRE(cfg.suites.size() == 3);
  CHECK(cfg.suites[0].label == "a");
  CHECK(cfg.suites[2].expect_fail);
  CHECK(cfg.suites[2].fields.ids == std::vector<std::string>{"radial"});
  CHECK(cfg.fd.t0 == 1e-2);
  CHECK(cfg.output.json);
  CHECK_FALSE(cfg.output.csv);
}

TEST_CASE("config errors name the offending path") {
  CHECK(config_error(small_with("\"circle\"", "\"torus\"")) ==
        "shapes[0].type: unknown shape 'torus'");
  CHECK(config_error(small_with("\"suites\"", "\"tolerances\": {\"rel\": -1}, \"suites\"")) ==
        "tolerances.rel: must be positive, got -1");
  CHECK(config_error(small_with("\"r\": 1", "\"r\": 1, \"radius\": 2")) ==
        "shapes[0].radius: unknown field");
  CHECK(config_error(small_with("\"r\": 1", "\"r\": 0")) ==
        "shapes[0].r: must be positive, got 0");
  CHECK(config_error(small_with("\"field\": \"radial\"", "\"field\": \"nope\"")).find(
            "suites[0].field") == 0);
  CHECK(config_error(small_with("\"value\": [1, 0]", "\"value\": [1, 0, 0]")).find(
            "suites[1].field: field dimension does not match the shape") == 0);
  CHECK(config_error(small_with("\"suite\": \"compare\"", "\"suite\": \"bogus\"")).find(
            "suites[0].suite: unknown suite 'bogus'") == 0);
  CHECK(config_error("{not json").find("config: invalid JSON") == 0);
  CHECK(config_error("[1, 2]") == "config: top level must be an object");
  CHECK_THROWS_AS(load_config("/nonexistent/shapecalc.json"), ConfigError);
}

TEST_CASE("format lists") {
  CHECK(parse_formats("json") == std::vector<std::string>{"json"});
  CHECK(parse_formats("json,csv") == std::vector<std::string>{"json", "csv"});
  CHECK_THROWS_AS(parse_formats("json,xml"), ConfigError);
  CHECK_THROWS_AS(parse_formats(""), ConfigError);
}

TEST_CASE("number formatting round-trips") {
  CHECK(report::format_double(0.1) == "0.10000000000000001");
  CHECK(std::stod(report::format_double(M_PI)) == M_PI);
  CHECK(report::format_double(std::nan("")) == "null");
  CHECK(report::format_double(INFINITY) == "null");
}

TEST_CASE("comparison reports round-trip through JSON") {
  DerivativeReport r;
  r.functional = "length";
  r.manifold = "circle{r=1}";
  r.field = "radial, \"quoted\"";
  r.fd_value = 6.283185307179586;
  r.fd_error_estimate = 1.5e-11;
  r.analytic_value = 6.283185307179586;
  r.verdict = true;
  r.series = {{0.01, 6.3, std::nullopt}, {0.005, 6.29, 6.28}};
  DerivativeReport none = r;
  none.analytic_value.reset();
  none.abs_diff = std::nan("");
  none.verdict = false;

  const std::string text = report::comparisons_json({r, none});
  const auto back = report::parse_comparisons(text);
  REQUIRE(back.size() == 2);
  CHECK(back[0].field == r.field);
  CHECK(back[0].fd_value == r.fd_value);
  CHECK(back[0].analytic_value == r.analytic_value);
  REQUIRE(back[0].series.size() == 2);
  CHECK_FALSE(back[0].series[0].extrapolant.has_value());
  CHECK(back[0].series[1].extrapolant == 6.28);
  CHECK_FALSE(back[1].analytic_value.has_value());
  CHECK(std::isnan(back[1].abs_diff));
  CHECK(report::comparisons_json(back) == text);

  // The key order is fixed.
  CHECK(text.find("\"functional\"") < text.find("\"manifold\""));
  CHECK(text.find("\"fd_value\"") < text.find("\"analytic_value\""));

  // CSV quotes fields with commas and quotes.
  const std::string csv = report::comparisons_csv({r});
  CHECK(csv.find("\"radial, \"\"quoted\"\"\"") != std::string::npos);
  const std::string series = report::series_csv({r});
  CHECK(series.rfind("report,functional,manifold,field,t,quotient,extrapolant", 0) == 0);
  CHECK(std::count(series.begin(), series.end(), '\n') == 3);

  CHECK_THROWS_AS(report::parse_comparisons("{\"functional\": 3}"), report::ReportError);
  CHECK_THROWS_AS(report::parse_comparisons("not json"), report::ReportError);
}

TEST_CASE("suite records and verdicts") {
  report::SuiteRecord rec;
  rec.kind = "nullity";
  rec.result.cases.push_back({"x", 2.0, 1.0, false});
  CHECK_FALSE(rec.verdict());
  rec.expect_fail = true;
  CHECK(rec.verdict());
  rec.error = "boom";
  CHECK_FALSE(rec.verdict());
  const auto j = nlohmann::json::parse(report::suites_json({rec}));
  CHECK(j.at(0).at("verdict") == false);
  CHECK(j.at(0).at("error") == "boom");
  CHECK(j.at(0).at("cases").size() == 1);
}

TEST_CASE("atomic writes replace the target") {
  const fs::path d = temp_dir("atomic");
  const fs::path p = d / "out.txt";
  report::write_atomic(p, "first");
  report::write_atomic(p, "second");
  CHECK(slurp(p) == "second");
  CHECK_FALSE(fs::exists(d / "out.txt.tmp"));
  CHECK_THROWS_AS(report::write_atomic(d / "missing" / "x.txt", "x"), report::ReportError);
}

TEST_CASE("small run writes stable reports") {
  const ExperimentConfig cfg = parse_config(kSmall);
  const fs::path d1 = temp_dir("run1"), d2 = temp_dir("run2");
  RunOptions opts;
  opts.out_dir = d1;
  opts.formats = std::vector<std::string>{"json", "csv"};
  const RunResult r1 = run(cfg, opts);
  CHECK(r1.exit_code == kExitPass);
  REQUIRE(r1.comparisons.size() == 2);
  CHECK(r1.comparisons[0].verdict);
  CHECK(r1.comparisons[1].verdict);
  REQUIRE(r1.suites.size() == 1);
  CHECK(r1.suites[0].verdict());
  for (const char* f : {"comparisons.json", "suites.json", "summary.json", "comparisons.csv",
                        "suites.csv", "series.csv"}) {
    CAPTURE(f);
    CHECK(fs::exists(d1 / f));
  }
  const auto summary = nlohmann::json::parse(slurp(d1 / "summary.json"));
  CHECK(summary.at("pass") == true);
  CHECK(summary.at("comparisons").at("total") == 2);

  opts.out_dir = d2;
  opts.jobs = 3;
  run(cfg, opts);
  CHECK(slurp(d1 / "comparisons.json") == slurp(d2 / "comparisons.json"));
  CHECK(slurp(d1 / "suites.json") == slurp(d2 / "suites.json"));

  // Plot data from the written report; corrupted reports are rejected.
  emit_plotdata(d1 / "comparisons.json", d1 / "plot.csv");
  CHECK(slurp(d1 / "plot.csv") == slurp(d1 / "series.csv"));
  std::ofstream(d1 / "bad.json") << "{\"functional\": [";
  CHECK_THROWS_AS(emit_plotdata(d1 / "bad.json", d1 / "plot2.csv"), report::ReportError);
  CHECK_THROWS_AS(emit_plotdata(d1 / "absent.json", d1 / "plot3.csv"), report::ReportError);
}

TEST_CASE("a failing comparison sets the failure exit code") {
  // Negative control declared as expected to pass: the suite verdict fails.
  const ExperimentConfig cfg =
      parse_config(small_with("\"expect_fail\": true", "\"expect_fail\": false"));
  RunOptions opts;
  opts.out_dir = temp_dir("fail");
  opts.formats = std::vector<std::string>{"json"};
  const RunResult r = run(cfg, opts);
  CHECK(r.exit_code == kExitFailure);
  CHECK_FALSE(fs::exists(*opts.out_dir / "comparisons.csv"));
}
