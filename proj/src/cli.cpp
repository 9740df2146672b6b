#include "shapecalc/cli.hpp"

#include "shapecalc/shapes.hpp"

#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace shapecalc::cli {

namespace {

using nlohmann::json;

// JSON node plus its path, for diagnostics that name the offending field.
class Node {
public:
  Node(const json& j, std::string path) : j_(j), path_(std::move(path)) {}

  const json& raw() const { return j_; }
  const std::string& path() const { return path_; }

  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError(path_ + ": " + what);
  }

  Node at(const std::string& key) const {
    if (!j_.is_object() || !j_.contains(key)) {
      throw ConfigError(child_path(key) + ": missing required field");
    }
    return Node(j_.at(key), child_path(key));
  }
  std::optional<Node> find(const std::string& key) const {
    if (!j_.is_object() || !j_.contains(key)) return std::nullopt;
    return Node(j_.at(key), child_path(key));
  }
  Node operator[](size_t i) const {
    return Node(j_.at(i), path_ + "[" + std::to_string(i) + "]");
  }
  size_t size() const { return j_.size(); }

  void require_object(const std::set<std::string>& allowed) const {
    if (!j_.is_object()) fail("expected an object");
    for (const auto& [k, v] : j_.items()) {
      if (!allowed.count(k)) throw ConfigError(child_path(k) + ": unknown field");
    }
  }
  void require_array() const {
    if (!j_.is_array()) fail("expected an array");
  }

  double number() const {
    if (!j_.is_number()) fail("expected a number");
    const double v = j_.get<double>();
    if (!std::isfinite(v)) fail("expected a finite number");
    return v;
  }
  double positive() const {
    const double v = number();
    if (!(v > 0.0)) fail("must be positive, got " + j_.dump());
    return v;
  }
  int integer(int lo) const {
    if (!j_.is_number_integer()) fail("expected an integer");
    const auto v = j_.get<long long>();
    if (v < lo || v > 1000000) fail("must be an integer >= " + std::to_string(lo));
    return static_cast<int>(v);
  }
  std::uint64_t seed() const {
    if (!j_.is_number_unsigned()) fail("expected a non-negative integer");
    return j_.get<std::uint64_t>();
  }
  bool boolean() const {
    if (!j_.is_boolean()) fail("expected true or false");
    return j_.get<bool>();
  }
  std::string string() const {
    if (!j_.is_string()) fail("expected a string");
    return j_.get<std::string>();
  }
  /// 2- or 3-vector; the length is returned through `dim`.
  Vec vec(int* dim = nullptr) const {
    if (!j_.is_array() || (j_.size() != 2 && j_.size() != 3)) {
      fail("expected an array of 2 or 3 numbers");
    }
    Vec v = Vec::Zero();
    for (size_t i = 0; i < j_.size(); ++i) v(static_cast<int>(i)) = (*this)[i].number();
    if (dim) *dim = static_cast<int>(j_.size());
    return v;
  }

private:
  std::string child_path(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }
  const json& j_;
  std::string path_;
};

double num_or(const Node& n, const std::string& key, double fallback) {
  const auto f = n.find(key);
  return f ? f->number() : fallback;
}

Vec vec_or_zero(const Node& n, const std::string& key, int dim) {
  const auto f = n.find(key);
  if (!f) return Vec::Zero();
  int d = 0;
  const Vec v = f->vec(&d);
  if (d != dim) f->fail("expected " + std::to_string(dim) + " components");
  return v;
}

int dim_of(const Node& n) {
  const Node d = n.at("dim");
  const int v = d.integer(2);
  if (v != 2 && v != 3) d.fail("dim must be 2 or 3");
  return v;
}

// Catalog ---------------------------------------------------------------------

template <class Fn>
auto guarded(const Node& n, Fn&& build) {
  try {
    return build();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    n.fail(e.what());
  }
}

Manifold build_shape(const Node& n) {
  const std::string type = n.at("type").string();
  const std::set<std::string> common = {"id", "type"};
  auto allow = [&](std::set<std::string> extra) {
    extra.insert(common.begin(), common.end());
    n.require_object(extra);
  };
  return guarded(n, [&]() -> Manifold {
    if (type == "circle") {
      allow({"r", "center"});
      return shapes::circle(n.at("r").positive(), vec_or_zero(n, "center", 2));
    }
    if (type == "arc") {
      allow({"r", "angle0", "angle1", "center"});
      return shapes::arc(n.at("r").positive(), n.at("angle0").number(),
                         n.at("angle1").number(), vec_or_zero(n, "center", 2));
    }
    if (type == "segment") {
      allow({"p0", "p1"});
      int d0 = 0, d1 = 0;
      const Vec p0 = n.at("p0").vec(&d0), p1 = n.at("p1").vec(&d1);
      if (d0 != d1) n.at("p1").fail("p0 and p1 must have the same dimension");
      return shapes::segment(p0, p1, d0);
    }
    if (type == "ellipse") {
      allow({"a", "b"});
      return shapes::ellipse(n.at("a").positive(), n.at("b").positive());
    }
    if (type == "helix") {
      allow({"r", "pitch", "turns"});
      return shapes::helix(n.at("r").positive(), n.at("pitch").number(),
                           n.at("turns").positive());
    }
    if (type == "cylinder") {
      allow({"r", "h"});
      return shapes::cylinder(n.at("r").positive(), n.at("h").positive());
    }
    if (type == "sphere_band") {
      allow({"r", "theta0", "theta1"});
      return shapes::sphere_band(n.at("r").positive(), n.at("theta0").number(),
                                 n.at("theta1").number());
    }
    if (type == "plane") {
      allow({"w", "h"});
      return shapes::plane(n.at("w").positive(), n.at("h").positive());
    }
    n.at("type").fail("unknown shape '" + type + "'");
  });
}

AmbientField build_field(const Node& n, const std::map<std::string, AmbientField>& known) {
  const std::string type = n.at("type").string();
  auto allow = [&](std::set<std::string> extra) {
    extra.insert({"id", "type"});
    n.require_object(extra);
  };
  return guarded(n, [&]() -> AmbientField {
    if (type == "zero") {
      allow({"dim"});
      return zero_field(dim_of(n));
    }
    if (type == "constant") {
      allow({"value"});
      int d = 0;
      const Vec v = n.at("value").vec(&d);
      return constant_field(v, d);
    }
    if (type == "radial") {
      allow({"dim", "axis"});
      const int d = dim_of(n);
      std::optional<Vec> axis;
      if (const auto a = n.find("axis")) {
        if (d != 3) a->fail("axis is only meaningful for dim 3");
        axis = vec_or_zero(n, "axis", 3);
      }
      return radial_field(d, axis);
    }
    if (type == "rotation") {
      allow({"dim", "axis"});
      const int d = dim_of(n);
      if (const auto a = n.find("axis"); a && d != 3) a->fail("axis is only meaningful for dim 3");
      const Vec axis = n.find("axis") ? vec_or_zero(n, "axis", 3) : Vec(Vec::UnitZ());
      return rotation_field(d, axis);
    }
    if (type == "linear") {
      allow({"matrix"});
      const Node m = n.at("matrix");
      m.require_array();
      const int d = static_cast<int>(m.size());
      if (d != 2 && d != 3) m.fail("expected a 2x2 or 3x3 matrix");
      Mat a = Mat::Zero();
      for (int i = 0; i < d; ++i) {
        int rd = 0;
        const Vec row = m[static_cast<size_t>(i)].vec(&rd);
        if (rd != d) m[static_cast<size_t>(i)].fail("row length must match the row count");
        a.row(i) = row.transpose();
      }
      return linear_field(a, d);
    }
    if (type == "bump") {
      allow({"center", "radius", "direction"});
      int dc = 0, dd = 0;
      const Vec c = n.at("center").vec(&dc), dir = n.at("direction").vec(&dd);
      if (dc != dd) n.at("direction").fail("must match the dimension of center");
      return bump_field(c, n.at("radius").positive(), dir, dc);
    }
    if (type == "sum") {
      allow({"terms"});
      const Node terms = n.at("terms");
      terms.require_array();
      if (terms.size() == 0) terms.fail("needs at least one term");
      std::optional<AmbientField> total;
      for (size_t i = 0; i < terms.size(); ++i) {
        const Node t = terms[i];
        t.require_object({"field", "weight"});
        const Node ref = t.at("field");
        const auto it = known.find(ref.string());
        if (it == known.end()) {
          ref.fail("unknown field '" + ref.string() + "' (define it earlier in fields)");
        }
        const AmbientField term = num_or(t, "weight", 1.0) * it->second;
        if (total && total->dim() != term.dim()) ref.fail("dimension mismatch in sum");
        total = total ? *total + term : term;
      }
      return *total;
    }
    n.at("type").fail("unknown field '" + type + "'");
  });
}

ShapeFunctional build_functional(const Node& n) {
  const std::string type = n.at("type").string();
  if (type == "length" || type == "elastic") {
    n.require_object({"id", "type", "panels"});
    const int panels = n.find("panels") ? n.at("panels").integer(1) : kDefaultCurvePanels;
    return type == "length" ? length_functional(panels) : elastic_functional(panels);
  }
  if (type == "area") {
    n.require_object({"id", "type", "panels_u", "panels_v"});
    const int pu = n.find("panels_u") ? n.at("panels_u").integer(1) : kAreaPanelsU;
    const int pv = n.find("panels_v") ? n.at("panels_v").integer(1) : kAreaPanelsV;
    return area_functional(pu, pv);
  }
  n.at("type").fail("unknown functional '" + type + "'");
}

template <class T>
void collect(const json& root, const std::string& key, std::map<std::string, T>& out,
             const std::function<T(const Node&)>& build) {
  const Node top(root, "");
  const Node list = top.at(key);
  list.require_array();
  for (size_t i = 0; i < list.size(); ++i) {
    const Node n = list[i];
    if (!n.raw().is_object()) n.fail("expected an object");
    const std::string id = n.at("id").string();
    if (id.empty()) n.at("id").fail("must not be empty");
    if (out.count(id)) n.at("id").fail("duplicate id '" + id + "'");
    out.emplace(id, build(n));
  }
}

// Settings --------------------------------------------------------------------

void apply_fd(const Node& n, FDConfig& fd) {
  n.require_object({"t0", "levels", "richardson"});
  if (const auto f = n.find("t0")) fd.t0 = f->positive();
  if (const auto f = n.find("levels")) fd.levels = f->integer(2);
  if (const auto f = n.find("richardson")) fd.richardson = f->boolean();
}

void apply_flow(const Node& n, FDConfig& fd) {
  n.require_object({"n_steps", "max_step"});
  if (const auto f = n.find("n_steps")) fd.flow.n_steps = f->integer(1);
  if (const auto f = n.find("max_step")) fd.flow.max_step = f->number();
}

Tolerances parse_tolerances(const Node& n) {
  n.require_object({"rel", "abs", "nullity", "locality", "decomposition", "crack"});
  Tolerances t;
  const std::pair<const char*, double*> all[] = {
      {"rel", &t.rel},           {"abs", &t.abs},
      {"nullity", &t.nullity},   {"locality", &t.locality},
      {"decomposition", &t.decomposition}, {"crack", &t.crack}};
  for (const auto& [key, slot] : all) {
    if (const auto f = n.find(key)) *slot = f->positive();
  }
  return t;
}

std::vector<std::string> formats_from(const Node& n) {
  n.require_array();
  std::vector<std::string> out;
  for (size_t i = 0; i < n.size(); ++i) {
    const std::string f = n[i].string();
    if (f != "json" && f != "csv") n[i].fail("unknown format '" + f + "' (json, csv)");
    out.push_back(f);
  }
  return out;
}

void set_formats(OutputConfig& out, const std::vector<std::string>& formats) {
  out.json = std::count(formats.begin(), formats.end(), "json") > 0;
  out.csv = std::count(formats.begin(), formats.end(), "csv") > 0;
}

template <class T>
const T& lookup(const std::map<std::string, T>& m, const Node& ref, const char* what) {
  const std::string id = ref.string();
  const auto it = m.find(id);
  if (it == m.end()) ref.fail(std::string("unknown ") + what + " '" + id + "'");
  return it->second;
}

FieldSource parse_field_source(const Node& n, const ExperimentConfig& cfg, int dim) {
  FieldSource src;
  if (n.raw().is_array()) {
    for (size_t i = 0; i < n.size(); ++i) {
      const AmbientField& f = lookup(cfg.fields, n[i], "field");
      if (f.dim() != dim) n[i].fail("field dimension does not match the shape");
      src.ids.push_back(n[i].string());
    }
    if (src.ids.empty()) n.fail("needs at least one field");
    return src;
  }
  n.require_object({"generator", "count", "seed", "axis"});
  src.generator = n.at("generator").string();
  static const std::set<std::string> generators = {"modulated_rotation", "chart_tangential",
                                                   "random_catalog"};
  if (!generators.count(src.generator)) {
    n.at("generator").fail("unknown generator '" + src.generator + "'");
  }
  src.count = n.at("count").integer(1);
  src.seed = n.find("seed") ? n.at("seed").seed() : 0;
  if (const auto a = n.find("axis")) {
    if (src.generator != "modulated_rotation") a->fail("only used by modulated_rotation");
    src.axis = vec_or_zero(n, "axis", 3);
  }
  return src;
}

SuiteEntry parse_entry(const Node& n, size_t index, const ExperimentConfig& cfg) {
  if (!n.raw().is_object()) n.fail("expected an object");
  SuiteEntry e;
  e.suite = n.at("suite").string();
  e.label = n.find("id") ? n.at("id").string() : "suites[" + std::to_string(index) + "]";
  e.fd = cfg.fd;
  std::set<std::string> allowed = {"suite", "id", "functional", "fd", "flow", "expect_fail"};
  if (e.suite == "compare") {
    allowed.insert({"shape", "field"});
  } else if (e.suite == "nullity" || e.suite == "normal_dependence") {
    allowed.insert({"shape", "fields"});
  } else if (e.suite == "locality") {
    allowed.insert({"shape", "field", "pairs"});
  } else if (e.suite == "crack") {
    allowed.insert({"crack", "domain", "probe_radius", "stations", "fd_scale", "halving",
                    "expect_alpha"});
  } else {
    n.at("suite").fail("unknown suite '" + e.suite +
                       "' (compare, nullity, locality, normal_dependence, crack)");
  }
  n.require_object(allowed);
  if (const auto f = n.find("fd")) apply_fd(*f, e.fd);
  if (const auto f = n.find("flow")) apply_flow(*f, e.fd);
  guarded(n, [&] { e.fd.validate(); return 0; });
  if (const auto f = n.find("expect_fail")) e.expect_fail = f->boolean();

  const Node fn = n.at("functional");
  const ShapeFunctional& functional = lookup(cfg.functionals, fn, "functional");
  e.functional = fn.string();

  if (e.suite == "crack") {
    const Node cr = n.at("crack");
    const Manifold& m = lookup(cfg.shapes, cr, "shape");
    if (!std::holds_alternative<ParamCurve>(m)) cr.fail("crack must be a curve");
    e.shape = cr.string();
    const Node dom = n.at("domain");
    dom.require_object({"center", "radius"});
    e.domain.radius = dom.at("radius").positive();
    e.domain.center = vec_or_zero(dom, "center", ambient_dim(m));
    if (const auto f = n.find("probe_radius")) e.probe.probe_radius = f->positive();
    if (const auto f = n.find("stations")) e.probe.stations = f->integer(0);
    if (const auto f = n.find("fd_scale")) e.probe.fd_scale = f->positive();
    if (const auto f = n.find("halving")) e.halving = f->boolean();
    if (const auto f = n.find("expect_alpha")) {
      f->require_array();
      if (f->size() != 2) f->fail("expected [alpha1, alpha2]");
      e.expect_alpha = std::make_pair((*f)[0].number(), (*f)[1].number());
    }
    guarded(n, [&] {
      return crack_functional(e.domain, std::get<ParamCurve>(m), functional).clearance;
    });
    return e;
  }

  const Node sh = n.at("shape");
  const Manifold& m = lookup(cfg.shapes, sh, "shape");
  e.shape = sh.string();
  const int dim = ambient_dim(m);
  // Catches wrong manifold kinds and unmet preconditions (e.g. arc length).
  try {
    functional.evaluate(m);
  } catch (const std::exception& ex) {
    sh.fail("functional '" + e.functional + "' cannot be evaluated on this shape: " +
            ex.what());
  }

  if (e.suite == "compare" || e.suite == "locality") {
    const Node fl = n.at("field");
    const AmbientField& f = lookup(cfg.fields, fl, "field");
    if (f.dim() != dim) fl.fail("field dimension does not match the shape");
    e.field = fl.string();
    if (e.suite == "compare" && !functional.analytic_derivative) {
      fn.fail("functional has no analytic derivative to compare against");
    }
    if (const auto p = n.find("pairs")) {
      e.pairs = p->string();
      if (e.pairs != "standard" && e.pairs != "on_manifold") {
        p->fail("unknown pairs '" + e.pairs + "' (standard, on_manifold)");
      }
    }
  } else {
    e.fields = parse_field_source(n.at("fields"), cfg, dim);
  }
  return e;
}

ExperimentConfig build_config(const json& root) {
  const Node top(root, "");
  top.require_object({"shapes", "fields", "functionals", "suites", "fd", "flow",
                      "tolerances", "output"});
  ExperimentConfig cfg;
  collect<Manifold>(root, "shapes", cfg.shapes, build_shape);
  collect<AmbientField>(root, "fields", cfg.fields, [&](const Node& n) {
    return build_field(n, cfg.fields);
  });
  collect<ShapeFunctional>(root, "functionals", cfg.functionals, build_functional);
  if (const auto f = top.find("fd")) apply_fd(*f, cfg.fd);
  if (const auto f = top.find("flow")) apply_flow(*f, cfg.fd);
  guarded(top, [&] { cfg.fd.validate(); return 0; });
  if (const auto t = top.find("tolerances")) cfg.tolerances = parse_tolerances(*t);
  if (const auto o = top.find("output")) {
    o->require_object({"path", "formats"});
    if (const auto p = o->find("path")) {
      cfg.output.path = p->string();
      if (cfg.output.path.empty()) p->fail("must not be empty");
    }
    if (const auto f = o->find("formats")) set_formats(cfg.output, formats_from(*f));
  }
  const Node suites = top.at("suites");
  suites.require_array();
  for (size_t i = 0; i < suites.size(); ++i) {
    cfg.suites.push_back(parse_entry(suites[i], i, cfg));
  }
  return cfg;
}

// Execution -------------------------------------------------------------------

std::vector<AmbientField> resolve_fields(const FieldSource& src, const Manifold& m,
                                         const ExperimentConfig& cfg) {
  std::vector<AmbientField> out;
  for (const std::string& id : src.ids) out.push_back(cfg.fields.at(id));
  if (src.generator == "modulated_rotation") {
    const auto g = modulated_rotation_fields(ambient_dim(m), src.count, src.seed,
                                             src.axis.value_or(Vec::UnitZ()));
    out.insert(out.end(), g.begin(), g.end());
  } else if (src.generator == "chart_tangential") {
    const auto g = chart_tangential_fields(m, src.count, src.seed);
    out.insert(out.end(), g.begin(), g.end());
  } else if (src.generator == "random_catalog") {
    const auto g = random_catalog_fields(m, src.count, src.seed);
    out.insert(out.end(), g.begin(), g.end());
  }
  return out;
}

std::string fmt(double v) { return report::format_double(v); }

StructureSuiteResult crack_suite(const SuiteEntry& e, const ExperimentConfig& cfg) {
  const CrackFunctional crack = crack_functional(
      e.domain, std::get<ParamCurve>(cfg.shapes.at(e.shape)), cfg.functionals.at(e.functional));
  const double tol = cfg.tolerances.crack;
  StructureSuiteResult out;
  out.suite = "crack";
  const CrackCoefficients c = extract_crack_coefficients(crack, e.probe, e.fd);
  auto add = [&](std::string what, double measured, double bound) {
    out.cases.push_back({std::move(what), measured, bound, measured <= bound});
  };
  if (e.expect_alpha) {
    add("alpha1 = " + fmt(c.alpha1) + " vs expected " + fmt(e.expect_alpha->first),
        std::abs(c.alpha1 - e.expect_alpha->first), tol);
    add("alpha2 = " + fmt(c.alpha2) + " vs expected " + fmt(e.expect_alpha->second),
        std::abs(c.alpha2 - e.expect_alpha->second), tol);
  }
  if (e.halving) {
    CrackProbeOptions half = e.probe;
    half.probe_radius = 0.5 * c.probe_radius;
    const CrackCoefficients h = extract_crack_coefficients(crack, half, e.fd);
    add("alpha1 halving: " + fmt(c.alpha1) + " at rho=" + fmt(c.probe_radius) + ", " +
            fmt(h.alpha1) + " at rho=" + fmt(h.probe_radius),
        std::abs(c.alpha1 - h.alpha1), tol);
    add("alpha2 halving: " + fmt(c.alpha2) + " at rho=" + fmt(c.probe_radius) + ", " +
            fmt(h.alpha2) + " at rho=" + fmt(h.probe_radius),
        std::abs(c.alpha2 - h.alpha2), tol);
  }
  for (size_t s = 0; s < c.stations.size(); ++s) {
    const CrackStation& st = c.stations[s];
    for (size_t k = 0; k < st.probe.size(); ++k) {
      if (!std::isfinite(st.density[k])) continue;
      add("station " + std::to_string(s) + " (t=" + fmt(st.param) + ") frame " +
              std::to_string(k) + ": probe " + fmt(st.probe[k]) + " vs density " +
              fmt(st.density[k]),
          std::abs(st.probe[k] - st.density[k]), tol);
    }
  }
  return out;
}

report::SuiteRecord run_suite(const SuiteEntry& e, const ExperimentConfig& cfg) {
  report::SuiteRecord rec;
  rec.kind = e.suite;
  rec.label = e.label;
  rec.expect_fail = e.expect_fail;
  const ShapeFunctional& j = cfg.functionals.at(e.functional);
  rec.functional = j.name;
  const Manifold& m = cfg.shapes.at(e.shape);
  rec.manifold = manifold_name(m);
  rec.result.suite = e.suite;
  try {
    const Tolerances& tol = cfg.tolerances;
    if (e.suite == "nullity") {
      rec.result = tangential_nullity_suite(j, m, resolve_fields(e.fields, m, cfg), e.fd,
                                            tol.nullity);
    } else if (e.suite == "locality") {
      const AmbientField& x = cfg.fields.at(e.field);
      const std::vector<LocalityPair> pairs = e.pairs == "standard"
                                                  ? standard_locality_pairs(m, x)
                                                  : std::vector{on_manifold_pair(m, x)};
      rec.result = locality_suite(j, m, pairs, e.fd, tol.locality);
    } else if (e.suite == "normal_dependence") {
      rec.result = normal_dependence_suite(j, m, resolve_fields(e.fields, m, cfg), e.fd,
                                           tol.decomposition);
    } else if (e.suite == "crack") {
      rec.functional = "crack{" + j.name + "}";
      rec.result = crack_suite(e, cfg);
    }
  } catch (const std::exception& ex) {
    rec.error = ex.what();
  }
  return rec;
}

struct Outcome {
  std::optional<DerivativeReport> report;
  std::optional<report::SuiteRecord> suite;
  std::string error;
};

Outcome run_entry(const SuiteEntry& e, const ExperimentConfig& cfg) {
  Outcome o;
  if (e.suite != "compare") {
    o.suite = run_suite(e, cfg);
    return o;
  }
  try {
    o.report = compare(cfg.functionals.at(e.functional), cfg.shapes.at(e.shape),
                       cfg.fields.at(e.field), e.fd, cfg.tolerances);
  } catch (const std::exception& ex) {
    o.error = e.label + ": " + ex.what();
  }
  return o;
}

std::string describe(const SuiteEntry& e) {
  return e.label + " [" + e.suite + "] " + e.functional + " on " + e.shape;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config: top level must be an object");
  return build_config(root);
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string() + ": cannot read config");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::vector<std::string> parse_formats(const std::string& list) {
  std::vector<std::string> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item != "json" && item != "csv") {
      throw ConfigError("--format: unknown format '" + item + "' (json, csv)");
    }
    out.push_back(item);
  }
  if (out.empty()) throw ConfigError("--format: empty list");
  return out;
}

RunResult run(const ExperimentConfig& config, const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  OutputConfig output = config.output;
  if (options.out_dir) output.path = *options.out_dir;
  if (options.formats) set_formats(output, *options.formats);

  const size_t n = config.suites.size();
  std::vector<Outcome> outcomes(n);
  std::atomic<size_t> next{0};
  std::mutex log_mutex;
  auto worker = [&] {
    for (size_t i = next++; i < n; i = next++) {
      const auto t0 = std::chrono::steady_clock::now();
      outcomes[i] = run_entry(config.suites[i], config);
      if (options.verbose) {
        const double dt =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const Outcome& o = outcomes[i];
        const bool ok = o.report ? o.report->verdict : o.suite ? o.suite->verdict() : false;
        std::lock_guard lock(log_mutex);
        std::cerr << (ok ? "pass " : "FAIL ") << describe(config.suites[i]) << " ("
                  << dt << " s)\n";
      }
    }
  };
  const int jobs = std::max(1, std::min<int>(options.jobs, static_cast<int>(n)));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < jobs; ++k) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  RunResult result;
  for (Outcome& o : outcomes) {
    if (o.report) result.comparisons.push_back(std::move(*o.report));
    if (o.suite) result.suites.push_back(std::move(*o.suite));
    if (!o.error.empty()) result.errors.push_back(std::move(o.error));
  }
  bool pass = result.errors.empty();
  for (const auto& r : result.comparisons) pass = pass && r.verdict;
  for (const auto& s : result.suites) pass = pass && s.verdict();
  result.exit_code = pass ? kExitPass : kExitFailure;
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  try {
    std::filesystem::create_directories(output.path);
    const auto& dir = output.path;
    if (output.json) {
      report::write_atomic(dir / "comparisons.json", report::comparisons_json(result.comparisons));
      report::write_atomic(dir / "suites.json", report::suites_json(result.suites));
    }
    if (output.csv) {
      report::write_atomic(dir / "comparisons.csv", report::comparisons_csv(result.comparisons));
      report::write_atomic(dir / "suites.csv", report::suites_csv(result.suites));
      report::write_atomic(dir / "series.csv", report::series_csv(result.comparisons));
    }
    report::write_atomic(dir / "summary.json", summary_json(result));
  } catch (const std::filesystem::filesystem_error& e) {
    throw report::ReportError(e.what());
  }
  return result;
}

std::string summary_json(const RunResult& r) {
  size_t cmp_pass = 0, suite_pass = 0, cases = 0, cases_pass = 0;
  double max_rel = 0.0, max_ratio = 0.0;
  for (const auto& c : r.comparisons) {
    cmp_pass += c.verdict;
    if (std::isfinite(c.rel_diff)) max_rel = std::max(max_rel, c.rel_diff);
  }
  for (const auto& s : r.suites) {
    suite_pass += s.verdict();
    for (const auto& c : s.result.cases) {
      ++cases;
      cases_pass += c.pass;
    }
    if (!s.expect_fail) max_ratio = std::max(max_ratio, s.result.worst_ratio());
  }
  // Written by hand so key order and number formatting stay fixed.
  std::ostringstream os;
  os << "{\n"
     << "  \"pass\": " << (r.exit_code == kExitPass ? "true" : "false") << ",\n"
     << "  \"comparisons\": {\"total\": " << r.comparisons.size()
     << ", \"passed\": " << cmp_pass << "},\n"
     << "  \"suites\": {\"total\": " << r.suites.size() << ", \"passed\": " << suite_pass
     << "},\n"
     << "  \"suite_cases\": {\"total\": " << cases << ", \"passed\": " << cases_pass << "},\n"
     << "  \"errors\": " << json(r.errors).dump() << ",\n"
     << "  \"max_comparison_rel_diff\": " << report::format_double(max_rel) << ",\n"
     << "  \"max_suite_worst_ratio\": " << report::format_double(max_ratio) << ",\n"
     << "  \"wall_time_seconds\": " << report::format_double(r.wall_seconds) << "\n"
     << "}\n";
  return os.str();
}

void emit_plotdata(const std::filesystem::path& report_path,
                   const std::filesystem::path& out) {
  const auto reports = report::read_comparisons(report_path);
  report::write_atomic(out, report::series_csv(reports));
}

}  // namespace shapecalc::cli
