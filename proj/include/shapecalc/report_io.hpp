#pragma once

#include "shapecalc/derivative.hpp"
#include "shapecalc/validation.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace shapecalc::report {

/// Malformed or unreadable report input.
class ReportError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// One executed structure suite together with what it was run on.
struct SuiteRecord {
  std::string kind;        // nullity, locality, normal_dependence, crack
  std::string label;       // config-level case id
  std::string functional;
  std::string manifold;
  bool expect_fail = false;  // negative control: passes when the suite fails
  StructureSuiteResult result;
  std::string error;  // non-empty when the suite threw

  bool verdict() const;
};

/// %.17g; NaN and infinities become null.
std::string format_double(double v);

std::string comparisons_json(const std::vector<DerivativeReport>& reports);
std::string comparisons_csv(const std::vector<DerivativeReport>& reports);
std::string suites_json(const std::vector<SuiteRecord>& suites);
std::string suites_csv(const std::vector<SuiteRecord>& suites);

/// Difference quotient series of every report: index, labels, t, q, extrapolant.
std::string series_csv(const std::vector<DerivativeReport>& reports);

/// Reads what comparisons_json writes (a single report object is accepted too).
std::vector<DerivativeReport> parse_comparisons(const std::string& text);
std::vector<DerivativeReport> read_comparisons(const std::filesystem::path& path);

/// Writes to a sibling temporary file, then renames over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace shapecalc::report
