// Acceptance runner: one PASS/FAIL line per criterion, exit 1 if any fails.
#include "oracles.hpp"
#include "shapecalc/derivative.hpp"
#include "shapecalc/flow.hpp"
#include "shapecalc/shapes.hpp"
#include "shapecalc/validation.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#ifndef SHAPECALC_TOOL
#error "SHAPECALC_TOOL must name the CLI executable"
#endif
#ifndef SHAPECALC_SOURCE_DIR
#error "SHAPECALC_SOURCE_DIR must name the source tree"
#endif

using namespace shapecalc;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

// Collects the individual checks of one criterion.
struct Criterion {
  int id = 0;
  std::string title;
  bool pass = true;
  std::vector<std::string> notes;

  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    notes.push_back((ok ? "ok   " : "FAIL ") + what);
  }
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

double rel_err(double v, double exact) { return std::abs(v - exact) / std::abs(exact); }

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const Manifold kUnitCircle = shapes::circle(1.0);
const Manifold kCircle2 = shapes::circle(2.0);
const Manifold kSegment = shapes::segment(Vec(0, 0, 0), Vec(1, 0, 0), 2);
const Manifold kCylinder = shapes::cylinder(1.0, 2.0);

FDConfig fine_fd() {
  FDConfig cfg;
  cfg.t0 = 1e-3;
  return cfg;
}

Mat diag(double a, double b, double c) {
  Mat m = Mat::Zero();
  m.diagonal() << a, b, c;
  return m;
}

void length_hadamard(Criterion& c) {
  const auto t0 = Clock::now();
  const ShapeFunctional j = length_functional();
  const double analytic = j.analytic_derivative(kUnitCircle, radial_field(2));
  const FDResult fd = eulerian_fd(j, kUnitCircle, radial_field(2));
  const double wall = seconds_since(t0);
  const double exact = oracles::circle_dlength_radial();
  c.check(rel_err(analytic, exact) <= 1e-6, "analytic " + num(analytic) + ", rel err " +
                                                num(rel_err(analytic, exact)) + " <= 1e-6");
  c.check(rel_err(fd.value, exact) <= 1e-6,
          "FD " + num(fd.value) + ", rel err " + num(rel_err(fd.value, exact)) + " <= 1e-6");
  c.check(wall < 1.0, "runtime " + num(wall) + " s < 1 s");
}

void segment_boundary(Criterion& c) {
  const ShapeFunctional j = length_functional();
  const AmbientField e1 = constant_field(Vec(1, 0, 0), 2);
  const double a0 = j.analytic_derivative(kSegment, e1);
  const double f0 = eulerian_fd(j, kSegment, e1).value;
  c.check(std::abs(a0) <= 1e-9, "e1 analytic |" + num(a0) + "| <= 1e-9");
  c.check(std::abs(f0) <= 1e-9, "e1 FD |" + num(f0) + "| <= 1e-9");
  const AmbientField id = linear_field(Mat::Identity(), 2);
  const double exact = oracles::segment_dlength_identity(1.0);
  const double a1 = j.analytic_derivative(kSegment, id);
  const double f1 = eulerian_fd(j, kSegment, id, fine_fd()).value;
  c.check(std::abs(a1 - exact) <= 1e-8, "x analytic " + num(a1) + ", err " +
                                            num(std::abs(a1 - exact)) + " <= 1e-8");
  c.check(std::abs(f1 - exact) <= 1e-8,
          "x FD (t0=1e-3) " + num(f1) + ", err " + num(std::abs(f1 - exact)) + " <= 1e-8");
}

void surface_identity(Criterion& c) {
  const ShapeFunctional j = area_functional();
  struct Case {
    std::string name;
    AmbientField x;
    double exact;
  };
  const std::vector<Case> cases = {
      {"radial", radial_field(3, Vec::UnitZ()), oracles::cylinder_darea_radial(2.0)},
      {"axial translation", constant_field(Vec(0, 0, 1), 3), 0.0},
      {"axial stretch", linear_field(diag(0, 0, 1), 3), oracles::cylinder_darea_stretch(1.0, 2.0)}};
  for (const Case& k : cases) {
    const double a = j.analytic_derivative(kCylinder, k.x);
    const double f = eulerian_fd(j, kCylinder, k.x).value;
    if (k.exact == 0.0) {
      // Relative error is undefined at zero: both must vanish at the absolute tolerance.
      c.check(std::abs(a) <= 1e-8 && std::abs(f) <= 1e-8,
              k.name + ": analytic " + num(a) + ", FD " + num(f) + " (|.| <= 1e-8)");
    } else {
      c.check(rel_err(a, k.exact) <= 1e-5 && rel_err(f, k.exact) <= 1e-5 &&
                  rel_err(a, f) <= 1e-5,
              k.name + ": analytic " + num(a) + ", FD " + num(f) + ", exact " + num(k.exact) +
                  ", rel errs " + num(rel_err(a, k.exact)) + " / " + num(rel_err(f, k.exact)));
    }
  }
}

void elastic_variation(Criterion& c) {
  const ShapeFunctional j = elastic_functional();
  const double exact = std::abs(oracles::circle_delastic_radial(2.0));
  const double a = j.analytic_derivative(kCircle2, radial_field(2));
  const double f = eulerian_fd(j, kCircle2, radial_field(2)).value;
  c.check(rel_err(std::abs(a), exact) <= 1e-5 && rel_err(std::abs(f), exact) <= 1e-5,
          "radial: analytic " + num(a) + ", FD " + num(f) + ", |exact| " + num(exact));
  c.check(std::signbit(a) == std::signbit(f), "radial: signs agree");
  const double ar = j.analytic_derivative(kCircle2, rotation_field(2));
  const double fr = eulerian_fd(j, kCircle2, rotation_field(2)).value;
  c.check(std::abs(ar) <= 1e-8 && std::abs(fr) <= 1e-8,
          "rotation: analytic " + num(ar) + ", FD " + num(fr) + " (|.| <= 1e-8)");
}

void nagumo(Criterion& c) {
  struct Case {
    std::string name;
    ShapeFunctional j;
    Manifold m;
    std::vector<AmbientField> fields;
  };
  const std::vector<Case> cases = {
      {"length/circle", length_functional(), kUnitCircle, modulated_rotation_fields(2, 3, 11)},
      {"length/segment", length_functional(256), kSegment, chart_tangential_fields(kSegment, 2, 12)},
      {"area/cylinder", area_functional(), kCylinder,
       modulated_rotation_fields(3, 2, 13, Vec::UnitZ())},
      {"elastic/circle r=2", elastic_functional(), kCircle2, modulated_rotation_fields(2, 2, 14)}};
  const FlowConfig flow{0.5, 1, 0.01};
  for (const Case& k : cases) {
    double worst_tangency = 0.0, worst_invariance = 0.0;
    for (const AmbientField& x : k.fields) {
      const TangencyReport t = check_tangency(k.m, x, 64);
      worst_tangency = std::max({worst_tangency, t.max_normal_residual, t.max_boundary_residual});
      worst_invariance = std::max(worst_invariance, invariance_residual(x, k.m, flow, 32));
    }
    const StructureSuiteResult r = tangential_nullity_suite(k.j, k.m, k.fields, FDConfig{}, 1e-7);
    c.check(worst_tangency <= 1e-12, k.name + ": tangency residual " + num(worst_tangency));
    c.check(worst_invariance <= 1e-7, k.name + ": invariance residual at t=0.5 " +
                                          num(worst_invariance) + " <= 1e-7");
    c.check(r.pass(), k.name + ": |FD| within 1e-7 (1 + |J|), worst ratio " +
                          num(r.worst_ratio()) + " over " + std::to_string(r.cases.size()) +
                          " fields");
  }
}

void locality(Criterion& c) {
  const ShapeFunctional j = length_functional();
  Mat a;
  a << 0.3, 0.5, 0, -0.2, 0.1, 0, 0, 0, 0;
  const AmbientField x = linear_field(a, 2);
  const auto pairs = standard_locality_pairs(kUnitCircle, x);
  const StructureSuiteResult r = locality_suite(j, kUnitCircle, pairs, FDConfig{}, 1e-6);
  c.check(pairs.size() == 5 && r.pass(), std::to_string(pairs.size()) +
                                             " pairs agreeing on M, worst ratio " +
                                             num(r.worst_ratio()));
  const StructureSuiteResult neg =
      locality_suite(j, kUnitCircle, {on_manifold_pair(kUnitCircle, x)}, FDConfig{}, 1e-6);
  c.check(!neg.pass(), "negative control differing on M fails (ratio " +
                           num(neg.worst_ratio()) + ")");
}

void structure(Criterion& c) {
  struct Case {
    std::string name;
    ShapeFunctional j;
    Manifold m;
    int count;
    std::uint64_t seed;
  };
  const std::vector<Case> cases = {{"circle", length_functional(256), kUnitCircle, 4, 21},
                                   {"segment", length_functional(256), kSegment, 4, 22},
                                   {"cylinder", area_functional(128, 16), kCylinder, 2, 13}};
  int total = 0;
  for (const Case& k : cases) {
    const auto fields = random_catalog_fields(k.m, k.count, k.seed);
    total += static_cast<int>(fields.size());
    const StructureSuiteResult r = normal_dependence_suite(k.j, k.m, fields, fine_fd(), 1e-6);
    c.check(r.pass(), k.name + ": " + std::to_string(fields.size()) +
                          " fields, additivity and tangential part within 1e-6 scale, worst "
                          "ratio " + num(r.worst_ratio()));
  }
  c.check(total == 10, std::to_string(total) + " random catalog cases");
}

void crack(Criterion& c) {
  const ShapeFunctional j = length_functional(256);
  const Ball domain{Vec::Zero(), 3.0};
  const CrackFunctional straight = crack_functional(domain, std::get<ParamCurve>(kSegment), j);
  CrackProbeOptions opts;
  opts.probe_radius = 0.1;
  const CrackCoefficients full = extract_crack_coefficients(straight, opts, FDConfig{});
  opts.probe_radius = 0.05;
  const CrackCoefficients half = extract_crack_coefficients(straight, opts, FDConfig{});
  c.check(std::abs(full.alpha1 - 1) <= 1e-5 && std::abs(full.alpha2 - 1) <= 1e-5,
          "straight: alpha1 " + num(full.alpha1) + ", alpha2 " + num(full.alpha2));
  c.check(std::abs(full.alpha1 - half.alpha1) <= 1e-5 &&
              std::abs(full.alpha2 - half.alpha2) <= 1e-5,
          "halving rho 0.1 -> 0.05: changes " + num(std::abs(full.alpha1 - half.alpha1)) + ", " +
              num(std::abs(full.alpha2 - half.alpha2)));

  // Circular arc r = 1 from 0.5 to 2.0 rad: probes against an independent density quadrature.
  const double radius = 1.0;
  const CrackFunctional arc =
      crack_functional(domain, shapes::arc(radius, 0.5, 2.0), j);
  const CrackCoefficients ca = extract_crack_coefficients(arc, CrackProbeOptions{}, FDConfig{});
  double worst = 0.0;
  int samples = 0;
  for (const CrackStation& st : ca.stations) {
    const double theta = std::atan2(st.point.y(), st.point.x());
    for (size_t k = 0; k < st.probe.size(); ++k) {
      const double oracle = oracles::arc_bump_density(radius, theta, ca.probe_radius,
                                                      st.frame[k].x(), st.frame[k].y());
      worst = std::max(worst, std::abs(st.probe[k] - oracle));
      ++samples;
    }
  }
  c.check(samples >= 3 && worst <= 1e-5, "arc: " + std::to_string(samples) +
                                             " h-samples vs density quadrature, worst diff " +
                                             num(worst) + " <= 1e-5");
}

double rotation_error(int steps) {
  const Vec p = flow_point(rotation_field(2), Vec(1.0, 0.5, 0.0), FlowConfig{1.0, steps, 0.0});
  double ex = 0, ey = 0;
  oracles::rotate(1.0, 0.5, 1.0, ex, ey);
  return (p - Vec(ex, ey, 0.0)).norm();
}

void numerics(Criterion& c) {
  for (int n : {8, 16, 32}) {
    const double ratio = rotation_error(n) / rotation_error(2 * n);
    c.check(std::abs(ratio - 16.0) <= 2.0,
            "RK4 error ratio n=" + std::to_string(n) + "->" + std::to_string(2 * n) + ": " +
                num(ratio));
  }
  struct Case {
    std::string name;
    ShapeFunctional j;
    Manifold m;
    AmbientField x;
    double exact;
    FDConfig cfg;
  };
  const std::vector<Case> cases = {
      {"circle radial", length_functional(), kUnitCircle, radial_field(2),
       oracles::circle_dlength_radial(), FDConfig{}},
      {"segment x", length_functional(), kSegment, linear_field(Mat::Identity(), 2),
       oracles::segment_dlength_identity(1.0), FDConfig{}},
      {"segment x t0=1e-3", length_functional(), kSegment, linear_field(Mat::Identity(), 2),
       oracles::segment_dlength_identity(1.0), fine_fd()},
      {"cylinder radial", area_functional(), kCylinder, radial_field(3, Vec::UnitZ()),
       oracles::cylinder_darea_radial(2.0), FDConfig{}},
      {"cylinder stretch", area_functional(), kCylinder, linear_field(diag(0, 0, 1), 3),
       oracles::cylinder_darea_stretch(1.0, 2.0), FDConfig{}},
      {"elastic circle r=2", elastic_functional(), kCircle2, radial_field(2),
       oracles::circle_delastic_radial(2.0), FDConfig{}}};
  for (const Case& k : cases) {
    const FDResult fd = eulerian_fd(k.j, k.m, k.x, k.cfg);
    const double err = std::abs(fd.value - k.exact);
    c.check(err <= 10.0 * fd.error_estimate, k.name + ": true error " + num(err) +
                                                 " <= 10 x estimate " + num(fd.error_estimate));
  }
}

void bundled_suite(Criterion& c) {
  const fs::path config = fs::path(SHAPECALC_SOURCE_DIR) / "configs" / "full_suite.json";
  const fs::path base = fs::temp_directory_path() / "shapecalc_acceptance";
  fs::remove_all(base);
  std::vector<fs::path> outs;
  for (int run = 0; run < 2; ++run) {
    const fs::path out = base / ("run" + std::to_string(run));
    const std::string cmd = std::string("\"") + SHAPECALC_TOOL + "\" run \"" + config.string() +
                            "\" --out \"" + out.string() + "\" --jobs 1 > \"" +
                            (base.string() + "/stdout" + std::to_string(run) + ".txt") + "\"";
    fs::create_directories(base);
    const auto t0 = Clock::now();
    const int status = std::system(cmd.c_str());
    const double wall = seconds_since(t0);
    const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    c.check(code == 0, "run " + std::to_string(run + 1) + ": exit code " + std::to_string(code));
    c.check(wall < 60.0, "run " + std::to_string(run + 1) + ": single-threaded wall time " +
                             num(wall) + " s < 60 s");
    outs.push_back(out);
  }
  for (const char* name : {"comparisons.json", "suites.json"}) {
    const std::string a = slurp(outs[0] / name), b = slurp(outs[1] / name);
    c.check(!a.empty() && a == b, std::string(name) + " byte-identical across runs (" +
                                      std::to_string(a.size()) + " bytes)");
  }
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Criterion&)>>> criteria = {
      {"length derivative on the unit circle", length_hadamard},
      {"segment boundary terms", segment_boundary},
      {"area derivative on the cylinder", surface_identity},
      {"elastic energy derivative on the circle r=2", elastic_variation},
      {"tangential invariance and nullity", nagumo},
      {"locality", locality},
      {"normal-dependence decomposition", structure},
      {"crack coefficients", crack},
      {"numerics sanity", numerics},
      {"bundled suite", bundled_suite}};
  bool all = true;
  for (size_t i = 0; i < criteria.size(); ++i) {
    Criterion c;
    c.id = static_cast<int>(i + 1);
    c.title = criteria[i].first;
    try {
      criteria[i].second(c);
    } catch (const std::exception& e) {
      c.check(false, std::string("threw: ") + e.what());
    }
    all = all && c.pass;
    std::printf("%s criterion %2d: %s\n", c.pass ? "PASS" : "FAIL", c.id, c.title.c_str());
    for (const auto& n : c.notes) std::printf("       %s\n", n.c_str());
    std::fflush(stdout);
  }
  std::printf("%s\n", all ? "ALL CRITERIA PASS" : "SOME CRITERIA FAIL");
  return all ? 0 : 1;
}
