#include "shapecalc/functionals.hpp"

#include "shapecalc/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace shapecalc {

namespace {

const ParamCurve& as_curve(const Manifold& m, const std::string& who) {
  if (const auto* c = std::get_if<ParamCurve>(&m)) return *c;
  throw std::invalid_argument(who + ": needs a curve, got surface " + manifold_name(m));
}

const ParamSurface& as_surface(const Manifold& m, const std::string& who) {
  if (const auto* s = std::get_if<ParamSurface>(&m)) return *s;
  throw std::invalid_argument(who + ": needs a surface, got curve " + manifold_name(m));
}

// [f]_a^b for open curves, 0 for closed ones.
double end_bracket(const ParamCurve& c, const std::function<double(double)>& f) {
  if (c.closed()) return 0.0;
  return f(c.b()) - f(c.a());
}

std::string with_panels(const std::string& base, int pu, int pv = 0) {
  std::ostringstream os;
  os << base << "{panels=" << pu;
  if (pv > 0) os << 'x' << pv;
  os << '}';
  return os.str();
}

}  // namespace

double length(const ParamCurve& curve, int panels) {
  return integrate_curve(curve, [&](double t) { return curve.speed(t); }, panels);
}

double dlength_jacobian_form(const ParamCurve& curve, const AmbientField& x,
                             int panels) {
  return integrate_curve(
      curve,
      [&](double t) {
        const Vec d1 = curve.velocity(t);
        return d1.dot(x.jacobian(curve.point(t)) * d1) / d1.norm();
      },
      panels);
}

double dlength_hadamard_form(const ParamCurve& curve, const AmbientField& x,
                             int panels) {
  const double interior = -integrate_curve(
      curve,
      [&](double t) {
        const FrenetFrame f = curve_frame(curve, t);
        return f.kappa * x(curve.point(t)).dot(f.N) * f.speed;
      },
      panels);
  return interior + end_bracket(curve, [&](double t) {
           return x(curve.point(t)).dot(curve.velocity(t).normalized());
         });
}

double dlength_interior(const ParamCurve& curve, const AmbientField& x, int panels) {
  return -integrate_curve(
      curve,
      [&](double t) {
        const Vec d1 = curve.velocity(t), d2 = curve.acceleration(t);
        const double v2 = d1.squaredNorm();
        // Curvature vector (gamma'' - (gamma''.T) T) / v^2.
        const Vec k = (d2 - d2.dot(d1) / v2 * d1) / v2;
        return k.dot(x(curve.point(t))) * std::sqrt(v2);
      },
      panels);
}

double analytic_dlength(const ParamCurve& curve, const AmbientField& x, int panels) {
  try {
    return dlength_hadamard_form(curve, x, panels);
  } catch (const DegenerateFrame&) {
    return dlength_jacobian_form(curve, x, panels);
  }
}

double surface_area(const ParamSurface& surf, int panels_u, int panels_v) {
  return integrate_surface(
      surf,
      [&](double u, double v) {
        const SurfaceJet j = surf.jet(u, v);
        return j.pu.cross(j.pv).norm();
      },
      panels_u, panels_v);
}

double darea_interior(const ParamSurface& surf, const AmbientField& x, int panels_u,
                      int panels_v) {
  return integrate_surface(
      surf,
      [&](double u, double v) {
        const SurfaceJet j = surf.jet(u, v);
        const Vec n = j.pu.cross(j.pv);
        const double area = n.norm();
        return surface_mean_curvature(surf, u, v) * x(j.p).dot(n / area) * area;
      },
      panels_u, panels_v);
}

double analytic_darea(const ParamSurface& surf, const AmbientField& x, int panels_u,
                      int panels_v) {
  double total = darea_interior(surf, x, panels_u, panels_v);
  // Flux through the u-sides, line element |phi_v| dv.
  for (const auto side : {SurfaceSide::u_a, SurfaceSide::u_b}) {
    const double u = side == SurfaceSide::u_a ? surf.a() : surf.b();
    total += quadrature::gauss_legendre(
        [&](double v) {
          return x(surf.point(u, v)).dot(boundary_outward_normal(surf, side, v)) *
                 surf.dv(u, v).norm();
        },
        surf.c(), surf.d(), panels_v);
  }
  if (!surf.periodic_v()) {
    for (const auto side : {SurfaceSide::v_c, SurfaceSide::v_d}) {
      const double v = side == SurfaceSide::v_c ? surf.c() : surf.d();
      total += quadrature::gauss_legendre(
          [&](double u) {
            return x(surf.point(u, v)).dot(boundary_outward_normal(surf, side, u)) *
                   surf.du(u, v).norm();
          },
          surf.a(), surf.b(), panels_u);
    }
  }
  return total;
}

void require_arc_length(const ParamCurve& curve) {
  constexpr int grid = 512;
  for (int i = 0; i <= grid; ++i) {
    const double t = curve.a() + (curve.b() - curve.a()) * i / grid;
    const double dev = std::abs(curve.speed(t) - 1.0);
    if (dev > kArcLengthTol) {
      std::ostringstream os;
      os << "curve " << curve.name() << " is not arc-length: ||gamma'| - 1| = " << dev
         << " at t=" << t;
      throw NotArcLength(os.str());
    }
  }
}

double elastic_energy(const ParamCurve& curve, int panels) {
  require_arc_length(curve);
  return integrate_curve(
      curve,
      [&](double s) {
        const double k = curve_frame(curve, s).kappa;
        return k * k;
      },
      panels);
}

double bending_energy(const ParamCurve& curve, int panels) {
  return integrate_curve(
      curve,
      [&](double t) {
        const Vec d1 = curve.velocity(t), d2 = curve.acceleration(t);
        const double v = d1.norm();
        return d1.cross(d2).squaredNorm() / std::pow(v, 5);
      },
      panels);
}

double delastic_interior(const ParamCurve& curve, const AmbientField& x, int panels) {
  if (curve.dim() != 2) {
    throw std::invalid_argument("elastic derivative: planar curves only");
  }
  return integrate_curve(
      curve,
      [&](double t) {
        const FrenetFrame f = curve_frame(curve, t);
        const CurvatureJet k = curve_curvature_derivs(curve, t);
        const double xn = x(curve.point(t)).dot(f.N);
        return (2.0 * k.ddkappa + k.kappa * k.kappa * k.kappa) * xn * f.speed;
      },
      panels);
}

double delastic_general(const ParamCurve& curve, const AmbientField& x, int panels) {
  const double interior = delastic_interior(curve, x, panels);
  // [2 kappa d/ds(X.N) - 2 kappa_s (X.N) + kappa^2 (X.T)], with
  // d/ds(X.N) = (DX gamma').N / v - kappa (X.T) since N_s = -kappa T.
  return interior + end_bracket(curve, [&](double t) {
           const FrenetFrame f = curve_frame(curve, t);
           const CurvatureJet k = curve_curvature_derivs(curve, t);
           const FieldJet j = x.jet(curve.point(t));
           const double xn = j.value.dot(f.N), xt = j.value.dot(f.T);
           const double dxn =
               (j.jacobian * curve.velocity(t)).dot(f.N) / f.speed - k.kappa * xt;
           return 2.0 * k.kappa * dxn - 2.0 * k.dkappa * xn + k.kappa * k.kappa * xt;
         });
}

double analytic_delastic(const ParamCurve& curve, const AmbientField& x, int panels) {
  require_arc_length(curve);
  return delastic_general(curve, x, panels);
}

ShapeFunctional length_functional(int panels) {
  ShapeFunctional f;
  f.name = panels == kDefaultCurvePanels ? "length" : with_panels("length", panels);
  f.evaluate = [panels](const Manifold& m) { return length(as_curve(m, "length"), panels); };
  f.analytic_derivative = [panels](const Manifold& m, const AmbientField& x) {
    return analytic_dlength(as_curve(m, "length"), x, panels);
  };
  f.interior_pairing = [panels](const Manifold& m, const AmbientField& x) {
    return dlength_interior(as_curve(m, "length"), x, panels);
  };
  return f;
}

ShapeFunctional area_functional(int panels_u, int panels_v) {
  ShapeFunctional f;
  f.name = panels_u == kAreaPanelsU && panels_v == kAreaPanelsV
               ? "area"
               : with_panels("area", panels_u, panels_v);
  f.evaluate = [panels_u, panels_v](const Manifold& m) {
    return surface_area(as_surface(m, "area"), panels_u, panels_v);
  };
  f.analytic_derivative = [panels_u, panels_v](const Manifold& m, const AmbientField& x) {
    return analytic_darea(as_surface(m, "area"), x, panels_u, panels_v);
  };
  f.interior_pairing = [panels_u, panels_v](const Manifold& m, const AmbientField& x) {
    return darea_interior(as_surface(m, "area"), x, panels_u, panels_v);
  };
  return f;
}

ShapeFunctional elastic_functional(int panels) {
  ShapeFunctional f;
  f.name = panels == kDefaultCurvePanels ? "elastic" : with_panels("elastic", panels);
  f.evaluate = [panels](const Manifold& m) {
    return bending_energy(as_curve(m, "elastic"), panels);
  };
  f.analytic_derivative = [panels](const Manifold& m, const AmbientField& x) {
    return analytic_delastic(as_curve(m, "elastic"), x, panels);
  };
  f.interior_pairing = [panels](const Manifold& m, const AmbientField& x) {
    return delastic_interior(as_curve(m, "elastic"), x, panels);
  };
  return f;
}

void CrackFunctional::check_probe(const AmbientField& x) const {
  if (!domain.contains(x.support())) {
    throw SupportViolation("probe field " + x.name() +
                           " is not supported inside the uncracked domain");
  }
}

CrackFunctional crack_functional(const Ball& domain, const ParamCurve& crack,
                                 const ShapeFunctional& inner) {
  constexpr int samples = 1024;
  double far = 0.0;
  for (int i = 0; i <= samples; ++i) {
    const double t = crack.a() + (crack.b() - crack.a()) * i / samples;
    far = std::max(far, (crack.point(t) - domain.center).norm());
  }
  const double clearance = domain.radius - far;
  if (!(clearance > 0.0)) {
    std::ostringstream os;
    os << "crack " << crack.name() << " is not interior to the domain (clearance "
       << clearance << ")";
    throw CrackNotInterior(os.str());
  }
  CrackFunctional out{ShapeFunctional{}, domain, crack, clearance, 0.0};
  out.default_probe_radius = std::min(0.1 * length(crack), 0.5 * clearance);
  ShapeFunctional& f = out.functional;
  f.name = "crack{" + inner.name + "}";
  f.evaluate = [inner](const Manifold& m) {
    as_curve(m, "crack");
    return inner.evaluate(m);
  };
  if (inner.analytic_derivative) {
    const auto d = inner.analytic_derivative;
    f.analytic_derivative = [d, domain](const Manifold& m, const AmbientField& x) {
      if (!domain.contains(x.support())) {
        throw SupportViolation("field " + x.name() +
                               " is not supported inside the uncracked domain");
      }
      return d(m, x);
    };
  }
  f.interior_pairing = inner.interior_pairing;
  return out;
}

}  // namespace shapecalc
