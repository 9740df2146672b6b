#include "shapecalc/validation.hpp"

#include "shapecalc/projection.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace shapecalc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

// Unit normal at a parameter: R T for planar curves, the first normal-frame
// vector for space curves, N for surfaces.
Vec normal_at(const Manifold& m, const Param& w) {
  if (const auto* c = std::get_if<ParamCurve>(&m)) return curve_normal_frame(*c, w(0)).front();
  return surface_normal(std::get<ParamSurface>(m), w(0), w(1));
}

std::vector<ManifoldSample> interior_samples(const Manifold& m, int n) {
  std::vector<ManifoldSample> out;
  for (auto& s : sample_manifold(m, n)) {
    if (!s.on_boundary) out.push_back(s);
  }
  return out;
}

double max_difference(const AmbientField& x, const AmbientField& y,
                      const std::vector<Vec>& points) {
  double worst = 0.0;
  for (const Vec& p : points) worst = std::max(worst, (x(p) - y(p)).norm());
  return worst;
}

SuiteCase failed_case(std::string description, const ShapeError& e, double bound) {
  return SuiteCase{std::move(description) + " [error: " + e.what() + "]", kInf, bound,
                   false};
}

Vec random_unit(std::mt19937_64& rng, int dim) {
  std::normal_distribution<double> g;
  Vec v;
  do {
    v = Vec(g(rng), g(rng), dim == 3 ? g(rng) : 0.0);
  } while (v.norm() < 1e-3);
  return v.normalized();
}

// Scalar Gaussian a exp(-|x - c|^2 / r^2) with its gradient. Analytic
// modulation keeps flowed parametrizations analytic, which the Gauss-Legendre
// rules integrate to near machine precision.
ScalarJet scalar_gaussian(const Vec& x, const Vec& c, double r, double a) {
  const Vec d = x - c;
  const double g = a * std::exp(-d.squaredNorm() / (r * r));
  return ScalarJet{g, -2.0 * g / (r * r) * d};
}

}  // namespace

bool StructureSuiteResult::pass() const {
  return std::all_of(cases.begin(), cases.end(), [](const SuiteCase& c) { return c.pass; });
}

double StructureSuiteResult::worst_ratio() const {
  double worst = 0.0;
  for (const auto& c : cases) {
    worst = std::max(worst, c.bound > 0 ? c.measured / c.bound : kInf);
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Tangential nullity

StructureSuiteResult tangential_nullity_suite(const ShapeFunctional& j,
                                              const Manifold& m,
                                              const std::vector<AmbientField>& fields,
                                              const FDConfig& cfg, double rel_bound) {
  StructureSuiteResult out;
  out.suite = "nullity";
  const double bound = rel_bound * (1.0 + std::abs(j.evaluate(m)));
  for (const auto& x : fields) {
    const TangencyReport t = check_tangency(m, x, 64);
    const bool tangential = t.tangential(kTangencyTol);
    std::string desc = j.name + " on " + manifold_name(m) + " under " + x.name() +
                       " (tangency " + fmt(std::max(t.max_normal_residual,
                                                    t.max_boundary_residual)) +
                       ")";
    try {
      const double fd = eulerian_fd(j, m, x, cfg).value;
      const double measured = std::abs(fd);
      if (!tangential) desc += " not tangential";
      out.cases.push_back({desc, measured, bound, tangential && measured <= bound});
    } catch (const ShapeError& e) {
      out.cases.push_back(failed_case(desc, e, bound));
    }
  }
  return out;
}

std::vector<AmbientField> modulated_rotation_fields(int dim, int count,
                                                    std::uint64_t seed,
                                                    const Vec& axis) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> amp(-0.5, 0.5), rad(0.5, 1.5), off(0.0, 2.0);
  const AmbientField rot = rotation_field(dim, axis);
  std::vector<AmbientField> out;
  for (int i = 0; i < count; ++i) {
    struct Bump {
      Vec c;
      double r, a;
    };
    std::vector<Bump> bumps;
    for (int k = 0; k < 3; ++k) {
      const Vec c = off(rng) * random_unit(rng, dim);
      const double r = rad(rng);
      bumps.push_back({c, r, amp(rng)});
    }
    auto g = [bumps](const Vec& x) {
      ScalarJet s;
      s.value = 1.0;
      for (const auto& b : bumps) {
        const ScalarJet t = scalar_gaussian(x, b.c, b.r, b.a);
        s.value += t.value;
        s.gradient += t.gradient;
      }
      return s;
    };
    out.push_back(modulate(g, rot,
                           "modrot{seed=" + std::to_string(seed) + ",k=" +
                               std::to_string(i) + "}"));
  }
  return out;
}

std::vector<AmbientField> chart_tangential_fields(const Manifold& m, int count,
                                                  std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  const int idim = intrinsic_dim(m);
  double lo[2] = {0, 0}, len[2] = {1, 1};
  bool open[2] = {false, false};
  if (const auto* c = std::get_if<ParamCurve>(&m)) {
    lo[0] = c->a();
    len[0] = c->b() - c->a();
    open[0] = !c->closed();
  } else {
    const auto& s = std::get<ParamSurface>(m);
    lo[0] = s.a();
    len[0] = s.b() - s.a();
    lo[1] = s.c();
    len[1] = s.d() - s.c();
    open[0] = true;
    open[1] = !s.periodic_v();
  }
  std::vector<AmbientField> out;
  for (int i = 0; i < count; ++i) {
    // c_k(w) = prod_j (a + b cos + c sin)(w_j) times sin^2 in w_k if open.
    std::array<std::array<double, 3>, 4> trig{};
    for (auto& t : trig) t = {coef(rng), coef(rng), coef(rng)};
    auto values = [m, idim, lo, len, open, trig](const Param& w) {
      Vec v = Vec::Zero();
      std::vector<Vec> basis;
      if (const auto* c = std::get_if<ParamCurve>(&m)) {
        basis.push_back(c->velocity(w(0)));
      } else {
        const SurfaceJet j = std::get<ParamSurface>(m).jet(w(0), w(1));
        basis = {j.pu, j.pv};
      }
      for (int k = 0; k < idim; ++k) {
        double c = 1.0;
        for (int jdir = 0; jdir < idim; ++jdir) {
          const double th = 2.0 * std::numbers::pi * (w(jdir) - lo[jdir]) / len[jdir];
          const auto& t = trig[2 * k + jdir];
          c *= t[0] + t[1] * std::cos(th) + t[2] * std::sin(th);
        }
        if (open[k]) {
          const double s = std::sin(std::numbers::pi * (w(k) - lo[k]) / len[k]);
          c *= s * s;
        }
        v += c * basis[k] / basis[k].norm();
      }
      return v;
    };
    out.push_back(realize_along(m, values,
                                "chart_tangent{seed=" + std::to_string(seed) + ",k=" +
                                    std::to_string(i) + "}"));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Locality

std::vector<LocalityPair> standard_locality_pairs(const Manifold& m,
                                                  const AmbientField& x) {
  const int dim = ambient_dim(m);
  const double diam = manifold_diameter(m);
  const auto stations = interior_samples(m, 8);
  const auto& s1 = stations[stations.size() / 4];
  const auto& s2 = stations[(3 * stations.size()) / 4];
  const Vec n1 = normal_at(m, s1.param), n2 = normal_at(m, s2.param);

  // A bump whose ball stays clear of M.
  auto off_bump = [&](const Vec& p, const Vec& n, double sign, const Vec& dir) {
    double d0 = std::min(0.5, 0.3 * diam);
    for (int it = 0; it < 8; ++it, d0 *= 0.7) {
      const Vec c = p + sign * d0 * n;
      const double r = 0.5 * d0;
      if (distance_to_manifold(m, c) > 1.2 * r) return std::pair{bump_field(c, r, dir, dim), c};
    }
    throw std::runtime_error("locality: no room for an off-manifold bump");
  };

  std::vector<LocalityPair> out;
  {
    const Vec dir = dim == 3 ? Vec(1, 1, 1).normalized() : Vec(Vec(1, 1, 0).normalized());
    auto [b, c] = off_bump(s1.point, n1, 1.0, dir);
    out.push_back({"x + bump off M", x, (x + b).renamed(x.name() + "+offbump1"), {c}});
  }
  {
    auto [b, c] = off_bump(s2.point, n2, -1.0, Vec::UnitY());
    out.push_back(
        {"x + second bump off M", x, (x + b).renamed(x.name() + "+offbump2"), {c}});
  }
  {
    const AmbientField y = tube_cutoff(m, x, 0.1 * diam, 0.2 * diam);
    std::vector<Vec> w;
    for (const auto& s : stations) {
      w.push_back(s.point + 0.5 * diam * normal_at(m, s.param));
      w.push_back(s.point - 0.5 * diam * normal_at(m, s.param));
    }
    out.push_back({"x cut off in a tube around M", x, y, w});
  }
  const AmbientField offset = normal_offset_field(m, 1.0, 0.2 * diam);
  out.push_back({"x + normal offset field", x,
                 (x + offset).renamed(x.name() + "+" + offset.name()),
                 {s1.point + 0.05 * diam * n1}});
  {
    const Vec e = dim == 3 ? Vec(Vec(1, -1, 1).normalized()) : Vec(Vec(1, -1, 0).normalized());
    const double scale = 1.0 / diam;
    auto g = [offset, scale](const Vec& p) {
      const FieldJet j = offset.jet(p);
      return ScalarJet{scale * j.value.squaredNorm(),
                       2.0 * scale * j.jacobian.transpose() * j.value};
    };
    const AmbientField y =
        x + modulate(g, constant_field(e, dim), "dist2_offset");
    out.push_back({"x + field vanishing to second order on M", x,
                   y.renamed(x.name() + "+dist2_offset"),
                   {s2.point + 0.05 * diam * n2}});
  }
  return out;
}

LocalityPair on_manifold_pair(const Manifold& m, const AmbientField& x) {
  const int dim = ambient_dim(m);
  const double diam = manifold_diameter(m);
  const double r = 0.15 * diam;
  Vec center, dir;
  if (const auto* c = std::get_if<ParamCurve>(&m); c && !c->closed()) {
    center = c->point(c->b());
    dir = boundary_outward_normal(*c, CurveEnd::b);
  } else {
    const auto stations = interior_samples(m, 8);
    const auto& s = stations[stations.size() / 2];
    center = s.point;
    dir = normal_at(m, s.param);
  }
  const AmbientField b = bump_field(center, r, dir, dim);
  return {"x + bump centred on M (control)", x, (x + b).renamed(x.name() + "+onbump"),
          {center}};
}

StructureSuiteResult locality_suite(const ShapeFunctional& j, const Manifold& m,
                                    const std::vector<LocalityPair>& pairs,
                                    const FDConfig& cfg, double rel_bound) {
  StructureSuiteResult out;
  out.suite = "locality";
  std::vector<Vec> on_m;
  for (const auto& s : sample_manifold(m, 32)) on_m.push_back(s.point);
  const double diam = manifold_diameter(m);
  std::vector<Vec> probes;
  for (const auto& s : interior_samples(m, 4)) {
    const Vec n = normal_at(m, s.param);
    for (const double d : {0.05, -0.05, 0.15, -0.15}) probes.push_back(s.point + d * diam * n);
    if (probes.size() >= 16) break;
  }
  probes.resize(std::min<size_t>(probes.size(), 16));

  std::string cached_name;
  double cached_fd = 0.0;
  for (const auto& pair : pairs) {
    std::string desc = j.name + " on " + manifold_name(m) + ": " + pair.description;
    const double on_diff = max_difference(pair.x, pair.y, on_m);
    std::vector<Vec> off = probes;
    off.insert(off.end(), pair.witnesses.begin(), pair.witnesses.end());
    const double off_diff = max_difference(pair.x, pair.y, off);
    const bool agree = on_diff <= 1e-12, differ = off_diff > 1e-9;
    if (!agree) desc += " (differs on M by " + fmt(on_diff) + ")";
    if (!differ) desc += " (no off-manifold difference found)";
    try {
      if (cached_name.empty() || cached_name != pair.x.name()) {
        cached_fd = eulerian_fd(j, m, pair.x, cfg).value;
        cached_name = pair.x.name();
      }
      const double fy = eulerian_fd(j, m, pair.y, cfg).value;
      const double bound = rel_bound * (1.0 + std::abs(cached_fd));
      const double measured = std::abs(cached_fd - fy);
      out.cases.push_back({desc, measured, bound, agree && differ && measured <= bound});
    } catch (const ShapeError& e) {
      out.cases.push_back(failed_case(desc, e, rel_bound));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Normal dependence

DecompositionCase decompose_derivative(const ShapeFunctional& j, const Manifold& m,
                                       const AmbientField& x, const FDConfig& cfg) {
  const SplitFields parts = realize_split(m, x);
  DecompositionCase c;
  c.field = x.name();
  c.fd_total = eulerian_fd(j, m, x, cfg).value;
  c.fd_perp = eulerian_fd(j, m, parts.perp, cfg).value;
  c.fd_nu = has_boundary(m) ? eulerian_fd(j, m, parts.nu_part, cfg).value : 0.0;
  c.fd_tangential = eulerian_fd(j, m, parts.tangential, cfg).value;
  c.residual = std::abs(c.fd_total - c.fd_perp - c.fd_nu);
  c.scale = std::max({1.0, std::abs(c.fd_total), std::abs(c.fd_perp), std::abs(c.fd_nu)});
  return c;
}

StructureSuiteResult normal_dependence_suite(const ShapeFunctional& j,
                                             const Manifold& m,
                                             const std::vector<AmbientField>& fields,
                                             const FDConfig& cfg, double rel_bound) {
  StructureSuiteResult out;
  out.suite = "normal_dependence";
  for (const auto& x : fields) {
    const std::string base = j.name + " on " + manifold_name(m) + " under " + x.name();
    try {
      const DecompositionCase c = decompose_derivative(j, m, x, cfg);
      const double bound = rel_bound * c.scale;
      out.cases.push_back({base + ": fd(X) - fd(X^perp) - fd(X^nu)", c.residual, bound,
                           c.residual <= bound});
      out.cases.push_back({base + ": fd(X^t)", std::abs(c.fd_tangential), bound,
                           std::abs(c.fd_tangential) <= bound});
    } catch (const ShapeError& e) {
      out.cases.push_back(failed_case(base, e, rel_bound));
    }
  }
  return out;
}

std::vector<AmbientField> random_catalog_fields(const Manifold& m, int count,
                                                std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0), unit(0.0, 1.0);
  const int dim = ambient_dim(m);
  const double diam = manifold_diameter(m);
  const auto samples = sample_manifold(m, 16);
  auto random_matrix = [&] {
    Mat a = Mat::Zero();
    for (int i = 0; i < dim; ++i) {
      for (int k = 0; k < dim; ++k) a(i, k) = u(rng);
    }
    return a;
  };
  auto random_bump = [&] {
    const auto& s = samples[static_cast<size_t>(unit(rng) * samples.size()) % samples.size()];
    const Vec c = s.point + 0.2 * diam * unit(rng) * random_unit(rng, dim);
    const double r = (0.3 + 0.4 * unit(rng)) * diam;
    return bump_field(c, r, random_unit(rng, dim), dim);
  };
  std::vector<AmbientField> out;
  for (int i = 0; i < count; ++i) {
    switch (i % 5) {
      case 0:
        out.push_back(linear_field(random_matrix(), dim));
        break;
      case 1:
        out.push_back(constant_field(random_unit(rng, dim), dim));
        break;
      case 2:
        out.push_back(random_bump());
        break;
      case 3:
        out.push_back(dim == 2 ? (0.5 * rotation_field(2) + random_bump())
                               : rotation_field(3, random_unit(rng, 3)));
        break;
      default:
        out.push_back(linear_field(random_matrix(), dim) +
                      constant_field(random_unit(rng, dim), dim));
        break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Cracks

CrackCoefficients extract_crack_coefficients(const CrackFunctional& crack,
                                             const CrackProbeOptions& opts,
                                             const FDConfig& cfg) {
  const ParamCurve& curve = crack.crack;
  const int dim = curve.dim();
  CrackCoefficients out;
  out.probe_radius = opts.probe_radius > 0 ? opts.probe_radius : crack.default_probe_radius;
  const double rho = out.probe_radius;
  if (crack.clearance <= rho) {
    throw CrackNotInterior("probe radius " + fmt(rho) + " reaches the domain frontier (clearance " +
                           fmt(crack.clearance) + ")");
  }
  if (curve.closed()) throw NoBoundary("crack " + curve.name() + " has no endpoints");
  const Vec a = curve.point(curve.a()), b = curve.point(curve.b());
  if ((a - b).norm() <= 2.0 * rho) {
    throw ProbeOverlap("endpoint probes of radius " + fmt(rho) + " overlap");
  }
  FDConfig fd = cfg;
  fd.t0 = opts.fd_scale * rho;
  const Manifold m = curve;

  auto probe = [&](const Vec& center, const Vec& dir) {
    const AmbientField x = bump_field(center, rho, dir, dim, crack.domain);
    crack.check_probe(x);
    const double trace = x(center).dot(dir);
    const double density = crack.functional.interior_pairing
                               ? crack.functional.interior_pairing(m, x) / trace
                               : std::numeric_limits<double>::quiet_NaN();
    return std::pair{eulerian_fd(crack.functional, m, x, fd).value / trace, density};
  };
  out.alpha1 = probe(a, boundary_outward_normal(curve, CurveEnd::a)).first;
  out.alpha2 = probe(b, boundary_outward_normal(curve, CurveEnd::b)).first;

  for (int i = 0; i < opts.stations; ++i) {
    CrackStation st;
    st.param = curve.a() + (curve.b() - curve.a()) * (i + 1) / (opts.stations + 1);
    st.point = curve.point(st.param);
    if ((st.point - a).norm() <= rho || (st.point - b).norm() <= rho) {
      throw ProbeOverlap("interior station at t=" + fmt(st.param) +
                         " is within the probe radius of an endpoint");
    }
    st.frame = curve_normal_frame(curve, st.param);
    for (const Vec& e : st.frame) {
      const auto [value, density] = probe(st.point, e);
      st.probe.push_back(value);
      st.density.push_back(density);
    }
    out.stations.push_back(std::move(st));
  }
  return out;
}

}  // namespace shapecalc
