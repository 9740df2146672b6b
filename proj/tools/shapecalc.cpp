// shapecalc: run derivative experiments from a JSON config, or turn a
// comparisons report into plot data.

#include "shapecalc/cli.hpp"

#include "CLI11.hpp"

#include <iostream>

namespace cli = shapecalc::cli;

int main(int argc, char** argv) {
  CLI::App app{"Shape derivative experiment runner"};
  app.require_subcommand(1);

  std::string config_path, out_dir, formats;
  int jobs = 1;
  bool verbose = false;
  CLI::App* run = app.add_subcommand("run", "Run the suites of a JSON config");
  run->add_option("config", config_path, "Experiment config (JSON)")->required();
  run->add_option("--out", out_dir, "Output directory (overrides output.path)");
  run->add_option("--format", formats, "Comma-separated report formats: json,csv");
  run->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  run->add_flag("-v,--verbose", verbose, "Log each suite entry to stderr");

  std::string report_path, series_path;
  CLI::App* plot = app.add_subcommand("plot", "Write FD series CSV from a comparisons report");
  plot->add_option("report", report_path, "comparisons.json")->required();
  plot->add_option("--out", series_path, "Series CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kExitConfig;
  }

  try {
    if (*plot) {
      cli::emit_plotdata(report_path, series_path);
      return cli::kExitPass;
    }
    cli::RunOptions options;
    options.jobs = jobs;
    options.verbose = verbose;
    if (!out_dir.empty()) options.out_dir = out_dir;
    if (!formats.empty()) options.formats = cli::parse_formats(formats);
    const cli::ExperimentConfig config = cli::load_config(config_path);
    const cli::RunResult result = cli::run(config, options);
    for (const auto& e : result.errors) std::cerr << "error: " << e << '\n';
    std::cout << cli::summary_json(result);
    return result.exit_code;
  } catch (const shapecalc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return cli::kExitConfig;
  } catch (const shapecalc::report::ReportError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return cli::kExitConfig;
  }
}
