#pragma once

#include "shapecalc/report_io.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace shapecalc::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;

/// Where a suite entry takes its fields from: explicit catalog ids and/or
/// one generator (modulated_rotation, chart_tangential, random_catalog).
struct FieldSource {
  std::vector<std::string> ids;
  std::string generator;
  int count = 0;
  std::uint64_t seed = 0;
  std::optional<Vec> axis;
};

struct SuiteEntry {
  std::string suite;  // compare | nullity | locality | normal_dependence | crack
  std::string label;
  std::string functional;
  std::string shape;
  std::string field;       // compare, locality
  FieldSource fields;      // nullity, normal_dependence
  std::string pairs = "standard";  // locality: standard | on_manifold
  bool expect_fail = false;
  FDConfig fd;
  // crack
  Ball domain{Vec::Zero(), 0.0};
  CrackProbeOptions probe;
  bool halving = true;
  std::optional<std::pair<double, double>> expect_alpha;
};

struct OutputConfig {
  std::filesystem::path path = "shapecalc-out";
  bool json = true;
  bool csv = false;
};

/// Parsed and resolved experiment. Catalog objects are built at parse time so
/// every reference and parameter is checked before anything runs.
struct ExperimentConfig {
  std::map<std::string, Manifold> shapes;
  std::map<std::string, AmbientField> fields;
  std::map<std::string, ShapeFunctional> functionals;
  std::vector<SuiteEntry> suites;
  FDConfig fd;
  Tolerances tolerances;
  OutputConfig output;
};

/// Throws ConfigError whose message starts with the offending JSON path,
/// e.g. "shapes[0].type: unknown shape 'torus'".
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

struct RunOptions {
  std::optional<std::filesystem::path> out_dir;
  std::optional<std::vector<std::string>> formats;  // subset of {json, csv}
  int jobs = 1;
  bool verbose = false;
};

struct RunResult {
  std::vector<DerivativeReport> comparisons;
  std::vector<report::SuiteRecord> suites;
  std::vector<std::string> errors;  // comparisons that threw
  double wall_seconds = 0.0;
  int exit_code = kExitPass;
};

/// Executes every suite entry (on `jobs` workers, results kept in entry
/// order) and writes comparisons, suites and summary reports.
RunResult run(const ExperimentConfig& config, const RunOptions& options);

/// Summary record: counts, largest residuals and wall time.
std::string summary_json(const RunResult& result);

/// Converts a comparisons report into the FD series CSV.
void emit_plotdata(const std::filesystem::path& report,
                   const std::filesystem::path& out);

/// Parses formats such as "json,csv"; throws ConfigError on unknown names.
std::vector<std::string> parse_formats(const std::string& list);

}  // namespace shapecalc::cli
