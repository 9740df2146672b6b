#include "shapecalc/report_io.hpp"

#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <system_error>

namespace shapecalc::report {

namespace {

using nlohmann::json;

std::string quoted(const std::string& s) { return json(s).dump(); }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

// Minimal pretty printer with fixed key order; numbers go through
// format_double so output is byte-stable.
class Writer {
public:
  void open(char bracket) {
    out_ << bracket;
    first_.push_back(true);
  }
  void close(char bracket) {
    const bool empty = first_.back();
    first_.pop_back();
    if (!empty) newline();
    out_ << bracket;
  }
  void key(const std::string& k) {
    item();
    out_ << quoted(k) << ": ";
  }
  void item() {
    if (!first_.back()) out_ << ',';
    first_.back() = false;
    newline();
  }
  Writer& raw(const std::string& s) {
    out_ << s;
    return *this;
  }
  void field(const std::string& k, const std::string& v) {
    key(k);
    raw(quoted(v));
  }
  void field(const std::string& k, double v) {
    key(k);
    raw(format_double(v));
  }
  void field(const std::string& k, bool v) {
    key(k);
    raw(v ? "true" : "false");
  }
  std::string str() { return out_.str() + "\n"; }

private:
  void newline() { out_ << '\n' << std::string(2 * first_.size(), ' '); }
  std::ostringstream out_;
  std::vector<bool> first_;
};

void write_report(Writer& w, const DerivativeReport& r) {
  w.open('{');
  w.field("functional", r.functional);
  w.field("manifold", r.manifold);
  w.field("field", r.field);
  w.field("fd_value", r.fd_value);
  w.field("fd_error_estimate", r.fd_error_estimate);
  w.key("analytic_value");
  w.raw(r.analytic_value ? format_double(*r.analytic_value) : "null");
  w.field("abs_diff", r.abs_diff);
  w.field("rel_diff", r.rel_diff);
  w.field("verdict", r.verdict);
  w.key("series");
  w.open('[');
  for (const FDSeriesPoint& p : r.series) {
    w.item();
    w.raw("{\"t\": " + format_double(p.t) + ", \"quotient\": " + format_double(p.quotient) +
          ", \"extrapolant\": " +
          (p.extrapolant ? format_double(*p.extrapolant) : std::string("null")) + "}");
  }
  w.close(']');
  w.close('}');
}

double number_or_nan(const json& j, const char* key) {
  const json& v = j.at(key);
  if (v.is_null()) return std::numeric_limits<double>::quiet_NaN();
  return v.get<double>();
}

DerivativeReport report_from_json(const json& j) {
  DerivativeReport r;
  r.functional = j.at("functional").get<std::string>();
  r.manifold = j.at("manifold").get<std::string>();
  r.field = j.at("field").get<std::string>();
  r.fd_value = number_or_nan(j, "fd_value");
  r.fd_error_estimate = number_or_nan(j, "fd_error_estimate");
  if (!j.at("analytic_value").is_null()) r.analytic_value = j["analytic_value"].get<double>();
  r.abs_diff = number_or_nan(j, "abs_diff");
  r.rel_diff = number_or_nan(j, "rel_diff");
  r.verdict = j.at("verdict").get<bool>();
  for (const json& p : j.at("series")) {
    FDSeriesPoint s;
    s.t = p.at("t").get<double>();
    s.quotient = p.at("quotient").get<double>();
    if (p.contains("extrapolant") && !p["extrapolant"].is_null()) {
      s.extrapolant = p["extrapolant"].get<double>();
    }
    r.series.push_back(s);
  }
  return r;
}

}  // namespace

bool SuiteRecord::verdict() const {
  if (!error.empty()) return false;
  return expect_fail ? !result.pass() : result.pass();
}

std::string format_double(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string comparisons_json(const std::vector<DerivativeReport>& reports) {
  Writer w;
  w.open('[');
  for (const DerivativeReport& r : reports) {
    w.item();
    write_report(w, r);
  }
  w.close(']');
  return w.str();
}

std::string comparisons_csv(const std::vector<DerivativeReport>& reports) {
  std::ostringstream os;
  os << "functional,manifold,field,fd_value,fd_error_estimate,analytic_value,abs_diff,"
        "rel_diff,verdict\n";
  for (const DerivativeReport& r : reports) {
    os << csv_field(r.functional) << ',' << csv_field(r.manifold) << ','
       << csv_field(r.field) << ',' << format_double(r.fd_value) << ','
       << format_double(r.fd_error_estimate) << ','
       << (r.analytic_value ? format_double(*r.analytic_value) : "null") << ','
       << format_double(r.abs_diff) << ',' << format_double(r.rel_diff) << ','
       << (r.verdict ? "true" : "false") << '\n';
  }
  return os.str();
}

std::string suites_json(const std::vector<SuiteRecord>& suites) {
  Writer w;
  w.open('[');
  for (const SuiteRecord& s : suites) {
    w.item();
    w.open('{');
    w.field("suite", s.kind);
    w.field("label", s.label);
    w.field("functional", s.functional);
    w.field("manifold", s.manifold);
    w.field("expect_fail", s.expect_fail);
    w.field("suite_pass", s.error.empty() && s.result.pass());
    w.field("verdict", s.verdict());
    w.field("worst_ratio", s.result.worst_ratio());
    if (!s.error.empty()) w.field("error", s.error);
    w.key("cases");
    w.open('[');
    for (const SuiteCase& c : s.result.cases) {
      w.item();
      w.raw("{\"description\": " + quoted(c.description) +
            ", \"measured\": " + format_double(c.measured) +
            ", \"bound\": " + format_double(c.bound) +
            ", \"pass\": " + (c.pass ? "true" : "false") + "}");
    }
    w.close(']');
    w.close('}');
  }
  w.close(']');
  return w.str();
}

std::string suites_csv(const std::vector<SuiteRecord>& suites) {
  std::ostringstream os;
  os << "suite,label,functional,manifold,expect_fail,description,measured,bound,pass\n";
  for (const SuiteRecord& s : suites) {
    const std::string head = csv_field(s.kind) + ',' + csv_field(s.label) + ',' +
                             csv_field(s.functional) + ',' + csv_field(s.manifold) + ',' +
                             (s.expect_fail ? "true" : "false") + ',';
    if (!s.error.empty()) os << head << csv_field("error: " + s.error) << ",null,null,false\n";
    for (const SuiteCase& c : s.result.cases) {
      os << head << csv_field(c.description) << ',' << format_double(c.measured) << ','
         << format_double(c.bound) << ',' << (c.pass ? "true" : "false") << '\n';
    }
  }
  return os.str();
}

std::string series_csv(const std::vector<DerivativeReport>& reports) {
  std::ostringstream os;
  os << "report,functional,manifold,field,t,quotient,extrapolant\n";
  for (size_t i = 0; i < reports.size(); ++i) {
    const DerivativeReport& r = reports[i];
    for (const FDSeriesPoint& p : r.series) {
      os << i << ',' << csv_field(r.functional) << ',' << csv_field(r.manifold) << ','
         << csv_field(r.field) << ',' << format_double(p.t) << ','
         << format_double(p.quotient) << ','
         << (p.extrapolant ? format_double(*p.extrapolant) : "") << '\n';
    }
  }
  return os.str();
}

std::vector<DerivativeReport> parse_comparisons(const std::string& text) {
  try {
    const json j = json::parse(text);
    std::vector<DerivativeReport> out;
    if (j.is_object()) {
      out.push_back(report_from_json(j));
    } else if (j.is_array()) {
      for (const json& e : j) out.push_back(report_from_json(e));
    } else {
      throw ReportError("report must be an object or an array of objects");
    }
    return out;
  } catch (const json::exception& e) {
    throw ReportError(std::string("malformed report: ") + e.what());
  }
}

std::vector<DerivativeReport> read_comparisons(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ReportError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_comparisons(ss.str());
  } catch (const ReportError& e) {
    throw ReportError(path.string() + ": " + e.what());
  }
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ReportError("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw ReportError("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw ReportError("cannot rename onto " + path.string());
  }
}

}  // namespace shapecalc::report
