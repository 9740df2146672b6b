#include "shapecalc/geometry.hpp"

#include "finite_diff.hpp"
#include "shapecalc/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace shapecalc {

namespace {

constexpr int kRegularityGrid = 512;
constexpr int kEmbeddingSamples = 512;
constexpr int kConsistencySamples = 32;
constexpr double kClosureTol = 1e-12;
constexpr double kConsistencyTol = 1e-6;
constexpr double kDegenerate = 1e-12;

std::string describe(const std::string& name) {
  return name.empty() ? std::string("<unnamed>") : name;
}

double rel_err(const Vec& got, const Vec& want) {
  return (got - want).norm() / std::max(1.0, want.norm());
}

bool finite(const Vec& v) { return v.allFinite(); }

}  // namespace

// ---------------------------------------------------------------------------
// ParamCurve

ParamCurve::ParamCurve(int dim, double a, double b, Fn gamma, Fn dgamma,
                       Fn ddgamma, bool closed, std::string name,
                       Validate validate)
    : dim_(dim),
      a_(a),
      b_(b),
      gamma_(std::move(gamma)),
      dgamma_(std::move(dgamma)),
      ddgamma_(std::move(ddgamma)),
      closed_(closed),
      name_(std::move(name)) {
  if (dim_ != 2 && dim_ != 3) {
    throw InvalidManifold("curve " + describe(name_) + ": dimension must be 2 or 3");
  }
  if (!(std::isfinite(a_) && std::isfinite(b_) && a_ < b_)) {
    throw InvalidManifold("curve " + describe(name_) + ": need finite a < b");
  }
  if (!gamma_ || !dgamma_ || !ddgamma_) {
    throw InvalidManifold("curve " + describe(name_) + ": missing callable");
  }
  if (validate == Validate::full) check_invariants();
}

double ParamCurve::wrap(double t) const {
  if (!closed_ || (t >= a_ && t <= b_)) return t;
  const double period = b_ - a_;
  double s = std::fmod(t - a_, period);
  if (s < 0) s += period;
  return a_ + s;
}

void ParamCurve::check_invariants() const {
  const std::string who = "curve " + describe(name_);
  const double len = b_ - a_;

  double scale = 0.0;
  for (int i = 0; i < kRegularityGrid; ++i) {
    const double t = a_ + len * i / (kRegularityGrid - 1);
    const Vec p = gamma_(t), dp = dgamma_(t), ddp = ddgamma_(t);
    if (!finite(p) || !finite(dp) || !finite(ddp)) {
      throw InvalidManifold(who + ": non-finite value at t=" + std::to_string(t));
    }
    if (dp.norm() <= kDegenerate) {
      throw InvalidManifold(who + ": not regular at t=" + std::to_string(t));
    }
    if (dim_ == 2 && (p.z() != 0.0 || dp.z() != 0.0 || ddp.z() != 0.0)) {
      throw InvalidManifold(who + ": planar curve with nonzero z component");
    }
    scale = std::max(scale, p.norm());
  }

  if (closed_) {
    const double tol = kClosureTol * (1.0 + scale);
    const double tol_d = kClosureTol * (1.0 + dgamma_(a_).norm());
    const double tol_dd = kClosureTol * (1.0 + ddgamma_(a_).norm());
    if ((gamma_(a_) - gamma_(b_)).norm() > tol ||
        (dgamma_(a_) - dgamma_(b_)).norm() > tol_d ||
        (ddgamma_(a_) - ddgamma_(b_)).norm() > tol_dd) {
      throw InvalidManifold(who + ": closed curve does not close up to C^2");
    }
  }

  // Embedding desk check: no two non-adjacent samples coincide.
  const int n = kEmbeddingSamples;
  std::vector<Vec> pts(n);
  for (int i = 0; i < n; ++i) {
    const double t = closed_ ? a_ + len * i / n : a_ + len * i / (n - 1);
    pts[i] = gamma_(t);
  }
  const double min_sep = kDegenerate * (1.0 + scale);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 2; j < n; ++j) {
      if (closed_ && i == 0 && j == n - 1) continue;
      if ((pts[i] - pts[j]).squaredNorm() <= min_sep * min_sep) {
        std::ostringstream os;
        os << who << ": self-intersection between samples " << i << " and " << j;
        throw InvalidManifold(os.str());
      }
    }
  }

  // Analytic derivatives against central differences of the lower order.
  std::mt19937_64 rng(0x5eed);
  const double h = 1e-6 * len;
  std::uniform_real_distribution<double> dist(a_ + 2 * h, b_ - 2 * h);
  for (int k = 0; k < kConsistencySamples; ++k) {
    const double t = dist(rng);
    const Vec fd1 = (gamma_(t + h) - gamma_(t - h)) / (2 * h);
    const Vec fd2 = (dgamma_(t + h) - dgamma_(t - h)) / (2 * h);
    const double e1 = (fd1 - dgamma_(t)).norm() / std::max(1.0, dgamma_(t).norm());
    const double e2 = (fd2 - ddgamma_(t)).norm() / std::max(1.0, ddgamma_(t).norm());
    if (e1 > kConsistencyTol || e2 > kConsistencyTol) {
      throw InvalidManifold(who + ": derivative callables inconsistent at t=" +
                            std::to_string(t));
    }
  }
}

ParamCurve ParamCurve::reversed() const {
  const double s = a_ + b_;
  auto g = gamma_;
  auto dg = dgamma_;
  auto ddg = ddgamma_;
  return ParamCurve(dim_, a_, b_, [g, s](double t) { return g(s - t); },
                    [dg, s](double t) { return Vec(-dg(s - t)); },
                    [ddg, s](double t) { return ddg(s - t); }, closed_,
                    name_ + "~reversed", Validate::trusted);
}

ParamCurve ParamCurve::with_callables(Fn gamma, Fn dgamma, Fn ddgamma,
                                      std::string name) const {
  return ParamCurve(dim_, a_, b_, std::move(gamma), std::move(dgamma),
                    std::move(ddgamma), closed_, std::move(name),
                    Validate::trusted);
}

// ---------------------------------------------------------------------------
// ParamSurface

ParamSurface::ParamSurface(double a, double b, double c, double d, Fn phi,
                           Fn phi_u, Fn phi_v, Fn phi_vv, bool periodic_v,
                           std::string name, Validate validate, JetFn jet)
    : a_(a),
      b_(b),
      c_(c),
      d_(d),
      phi_(std::move(phi)),
      phi_u_(std::move(phi_u)),
      phi_v_(std::move(phi_v)),
      phi_vv_(std::move(phi_vv)),
      jet_(std::move(jet)),
      periodic_v_(periodic_v),
      name_(std::move(name)) {
  if (!(std::isfinite(a_) && std::isfinite(b_) && std::isfinite(c_) &&
        std::isfinite(d_) && a_ < b_ && c_ < d_)) {
    throw InvalidManifold("surface " + describe(name_) + ": need a < b, c < d");
  }
  if (!phi_ || !phi_u_ || !phi_v_ || !phi_vv_) {
    throw InvalidManifold("surface " + describe(name_) + ": missing callable");
  }
  if (validate == Validate::full) check_invariants();
}

double ParamSurface::diameter() const {
  return std::hypot(b_ - a_, d_ - c_);
}

double ParamSurface::wrap_v(double v) const {
  if (!periodic_v_ || (v >= c_ && v <= d_)) return v;
  const double period = d_ - c_;
  double s = std::fmod(v - c_, period);
  if (s < 0) s += period;
  return c_ + s;
}

SurfaceJet ParamSurface::jet(double u, double v) const {
  v = wrap_v(v);
  if (jet_) return jet_(u, v);
  return SurfaceJet{phi_(u, v), phi_u_(u, v), phi_v_(u, v)};
}

void ParamSurface::check_invariants() const {
  const std::string who = "surface " + describe(name_);
  constexpr int grid = 64;
  double scale = 0.0;
  for (int i = 0; i < grid; ++i) {
    const double u = a_ + (b_ - a_) * i / (grid - 1);
    for (int j = 0; j < grid; ++j) {
      const double v = c_ + (d_ - c_) * j / (grid - 1);
      const Vec p = phi_(u, v);
      const Vec n = phi_u_(u, v).cross(phi_v_(u, v));
      if (!finite(p) || !finite(n)) {
        throw InvalidManifold(who + ": non-finite value");
      }
      if (n.norm() <= kDegenerate) {
        throw InvalidManifold(who + ": not immersed at (" + std::to_string(u) +
                              ", " + std::to_string(v) + ")");
      }
      scale = std::max(scale, p.norm());
    }
    if (periodic_v_) {
      const double tol = kClosureTol * (1.0 + scale);
      if ((phi_(u, c_) - phi_(u, d_)).norm() > tol ||
          (phi_v_(u, c_) - phi_v_(u, d_)).norm() >
              kClosureTol * (1.0 + phi_v_(u, c_).norm()) ||
          (phi_vv_(u, c_) - phi_vv_(u, d_)).norm() >
              kClosureTol * (1.0 + phi_vv_(u, c_).norm())) {
        throw InvalidManifold(who + ": not periodic in v at u=" + std::to_string(u));
      }
    }
  }

  std::mt19937_64 rng(0x5eed);
  const double hu = 1e-6 * (b_ - a_), hv = 1e-6 * (d_ - c_);
  std::uniform_real_distribution<double> du(a_ + 2 * hu, b_ - 2 * hu);
  std::uniform_real_distribution<double> dv(c_ + 2 * hv, d_ - 2 * hv);
  for (int k = 0; k < kConsistencySamples; ++k) {
    const double u = du(rng), v = dv(rng);
    const Vec fu = (phi_(u + hu, v) - phi_(u - hu, v)) / (2 * hu);
    const Vec fv = (phi_(u, v + hv) - phi_(u, v - hv)) / (2 * hv);
    const Vec fvv = (phi_v_(u, v + hv) - phi_v_(u, v - hv)) / (2 * hv);
    if (rel_err(fu, phi_u_(u, v)) > kConsistencyTol ||
        rel_err(fv, phi_v_(u, v)) > kConsistencyTol ||
        rel_err(fvv, phi_vv_(u, v)) > kConsistencyTol) {
      throw InvalidManifold(who + ": derivative callables inconsistent");
    }
  }
}

ParamSurface ParamSurface::with_callables(Fn phi, Fn phi_u, Fn phi_v,
                                          Fn phi_vv, JetFn jet,
                                          std::string name) const {
  return ParamSurface(a_, b_, c_, d_, std::move(phi), std::move(phi_u),
                      std::move(phi_v), std::move(phi_vv), periodic_v_,
                      std::move(name), Validate::trusted, std::move(jet));
}

// ---------------------------------------------------------------------------
// Curve differential geometry

FrenetFrame curve_frame(const ParamCurve& curve, double t) {
  const Vec d1 = curve.velocity(t);
  const Vec d2 = curve.acceleration(t);
  FrenetFrame f;
  f.dim = curve.dim();
  f.speed = d1.norm();
  if (f.speed <= kDegenerate) {
    throw DegenerateFrame("zero speed at t=" + std::to_string(t));
  }
  f.T = d1 / f.speed;
  if (curve.dim() == 2) {
    f.N = Vec(-f.T.y(), f.T.x(), 0.0);
    f.kappa = d2.dot(f.N) / (f.speed * f.speed);
    return f;
  }
  // T' = (gamma'' - (gamma''.T) T) / v = v kappa N
  const Vec dT = (d2 - d2.dot(f.T) * f.T) / f.speed;
  const double norm = dT.norm();
  if (norm < kDegenerate) {
    throw DegenerateFrame("Frenet normal undefined (straight point) at t=" +
                          std::to_string(t));
  }
  f.N = dT / norm;
  f.B = f.T.cross(f.N);
  f.kappa = norm / f.speed;
  return f;
}

CurvatureJet curve_curvature_derivs(const ParamCurve& curve, double t,
                                    std::optional<double> h) {
  const double step = h.value_or(1e-4 * (curve.b() - curve.a()));
  auto kappa = [&](double s) { return curve_frame(curve, s).kappa; };
  const double lo = curve.a(), hi = curve.b();
  const bool periodic = curve.closed();
  const double k_t = detail::diff1(kappa, t, step, lo, hi, periodic);
  const double k_tt = detail::diff2(kappa, t, step, lo, hi, periodic);

  const Vec d1 = curve.velocity(t);
  const Vec d2 = curve.acceleration(t);
  const double v = d1.norm();
  const double v_t = d1.dot(d2) / v;
  CurvatureJet out;
  out.kappa = kappa(t);
  out.dkappa = k_t / v;
  out.ddkappa = k_tt / (v * v) - k_t * v_t / (v * v * v);
  return out;
}

std::vector<Vec> curve_normal_frame(const ParamCurve& curve, double t) {
  const Vec T = curve.velocity(t).normalized();
  if (curve.dim() == 2) return {Vec(-T.y(), T.x(), 0.0)};
  try {
    const FrenetFrame f = curve_frame(curve, t);
    return {f.N, f.B};
  } catch (const DegenerateFrame&) {
    // Complete T with the coordinate axis least aligned with it.
    Eigen::Index axis = 0;
    T.cwiseAbs().minCoeff(&axis);
    Vec e = Vec::Unit(axis);
    Vec n1 = (e - e.dot(T) * T).normalized();
    return {n1, T.cross(n1)};
  }
}

// ---------------------------------------------------------------------------
// Surface differential geometry

Vec surface_normal(const ParamSurface& surf, double u, double v) {
  const Vec n = surf.du(u, v).cross(surf.dv(u, v));
  const double norm = n.norm();
  if (norm < kDegenerate) {
    throw DegenerateImmersion("|phi_u x phi_v| vanishes at (" +
                              std::to_string(u) + ", " + std::to_string(v) + ")");
  }
  return n / norm;
}

double surface_mean_curvature(const ParamSurface& surf, double u, double v,
                              std::optional<double> h) {
  const double step = h.value_or(1e-5 * surf.diameter());
  const Vec pu = surf.du(u, v), pv = surf.dv(u, v);
  Eigen::Matrix2d gram;
  gram << pu.dot(pu), pu.dot(pv), pv.dot(pu), pv.dot(pv);
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(gram);
  const double lmin = eig.eigenvalues()(0), lmax = eig.eigenvalues()(1);
  if (lmin <= 0.0) {
    throw DegenerateImmersion("singular first fundamental form");
  }
  if (lmax / lmin > 1e10) {
    throw IllConditioned("Gram matrix of (phi_u, phi_v) has condition number " +
                         std::to_string(lmax / lmin));
  }

  const Vec n_u = detail::diff1_o2(
      [&](double s) { return surface_normal(surf, s, v); }, u, step, surf.a(),
      surf.b(), false);
  const Vec n_v = detail::diff1_o2(
      [&](double s) { return surface_normal(surf, u, s); }, v, step, surf.c(),
      surf.d(), surf.periodic_v());

  // N_u = a1 phi_u + a2 phi_v, N_v = a3 phi_u + a4 phi_v; H = a1 + a4.
  const Eigen::LDLT<Eigen::Matrix2d> solver(gram);
  const Eigen::Vector2d first = solver.solve(Eigen::Vector2d(n_u.dot(pu), n_u.dot(pv)));
  const Eigen::Vector2d second = solver.solve(Eigen::Vector2d(n_v.dot(pu), n_v.dot(pv)));
  return first(0) + second(1);
}

// ---------------------------------------------------------------------------
// Quadrature

double integrate_curve(const ParamCurve& curve,
                       const std::function<double(double)>& density,
                       int panels) {
  if (panels < 1) throw std::invalid_argument("integrate_curve: panels < 1");
  return quadrature::gauss_legendre(density, curve.a(), curve.b(), panels);
}

double integrate_surface(const ParamSurface& surf,
                         const std::function<double(double, double)>& density,
                         int panels_u, int panels_v) {
  if (panels_u < 1 || panels_v < 1) {
    throw std::invalid_argument("integrate_surface: panels < 1");
  }
  return quadrature::gauss_legendre_2d(density, surf.a(), surf.b(), panels_u,
                                       surf.c(), surf.d(), panels_v);
}

// ---------------------------------------------------------------------------
// Boundary conormals

Vec boundary_outward_normal(const ParamCurve& curve, CurveEnd end) {
  if (curve.closed()) {
    throw NoBoundary("closed curve " + describe(curve.name()) + " has no boundary");
  }
  if (end == CurveEnd::b) return curve.velocity(curve.b()).normalized();
  return -curve.velocity(curve.a()).normalized();
}

Vec boundary_outward_normal(const ParamSurface& surf, SurfaceSide side,
                            double s) {
  switch (side) {
    case SurfaceSide::u_a:
    case SurfaceSide::u_b: {
      const double u = side == SurfaceSide::u_a ? surf.a() : surf.b();
      const Vec n = surface_normal(surf, u, s);
      // phi_v x N has a positive phi_u component, so it points out at u = b.
      const Vec nu = surf.dv(u, s).cross(n).normalized();
      return side == SurfaceSide::u_b ? nu : Vec(-nu);
    }
    case SurfaceSide::v_c:
    case SurfaceSide::v_d: {
      if (surf.periodic_v()) {
        throw NoBoundary("surface " + describe(surf.name()) +
                         ": v = c, d is a periodic seam");
      }
      const double v = side == SurfaceSide::v_c ? surf.c() : surf.d();
      const Vec n = surface_normal(surf, s, v);
      const Vec nu = n.cross(surf.du(s, v)).normalized();
      return side == SurfaceSide::v_d ? nu : Vec(-nu);
    }
  }
  return Vec::Zero();
}

// ---------------------------------------------------------------------------
// Manifold helpers

int ambient_dim(const Manifold& m) {
  return std::visit(
      [](const auto& x) {
        if constexpr (std::is_same_v<std::decay_t<decltype(x)>, ParamCurve>) {
          return x.dim();
        } else {
          return 3;
        }
      },
      m);
}

int intrinsic_dim(const Manifold& m) {
  return std::holds_alternative<ParamCurve>(m) ? 1 : 2;
}

const std::string& manifold_name(const Manifold& m) {
  return std::visit([](const auto& x) -> const std::string& { return x.name(); }, m);
}

bool has_boundary(const Manifold& m) {
  if (const auto* c = std::get_if<ParamCurve>(&m)) return !c->closed();
  return true;  // surfaces always have at least the u-sides
}

Vec manifold_point(const Manifold& m, const Param& w) {
  if (const auto* c = std::get_if<ParamCurve>(&m)) return c->point(w(0));
  return std::get<ParamSurface>(m).point(w(0), w(1));
}

std::vector<Vec> tangent_basis(const Manifold& m, const Param& w) {
  if (const auto* c = std::get_if<ParamCurve>(&m)) {
    const Vec d = c->velocity(w(0));
    if (d.norm() <= kDegenerate) throw DegenerateImmersion("zero speed");
    return {d.normalized()};
  }
  const auto& s = std::get<ParamSurface>(m);
  const Vec pu = s.du(w(0), w(1)), pv = s.dv(w(0), w(1));
  const double nu = pu.norm();
  if (nu <= kDegenerate) throw DegenerateImmersion("phi_u vanishes");
  const Vec e1 = pu / nu;
  const Vec r = pv - pv.dot(e1) * e1;
  if (r.norm() <= kDegenerate * std::max(1.0, pv.norm())) {
    throw DegenerateImmersion("phi_u, phi_v parallel");
  }
  return {e1, r.normalized()};
}

double manifold_diameter(const Manifold& m) {
  constexpr int n = 48;
  std::vector<Vec> pts;
  if (const auto* c = std::get_if<ParamCurve>(&m)) {
    for (int i = 0; i <= n; ++i) pts.push_back(c->point(c->a() + (c->b() - c->a()) * i / n));
  } else {
    const auto& s = std::get<ParamSurface>(m);
    for (int i = 0; i <= 8; ++i) {
      for (int j = 0; j <= 8; ++j) {
        pts.push_back(s.point(s.a() + (s.b() - s.a()) * i / 8, s.c() + (s.d() - s.c()) * j / 8));
      }
    }
  }
  double diam = 0.0;
  for (size_t i = 0; i < pts.size(); ++i) {
    for (size_t j = i + 1; j < pts.size(); ++j) {
      diam = std::max(diam, (pts[i] - pts[j]).norm());
    }
  }
  return diam;
}

std::vector<ManifoldSample> sample_manifold(const Manifold& m, int n) {
  if (n < 2) throw std::invalid_argument("sample_manifold: n < 2");
  std::vector<ManifoldSample> out;
  if (const auto* c = std::get_if<ParamCurve>(&m)) {
    const double len = c->b() - c->a();
    for (int i = 0; i < n; ++i) {
      ManifoldSample s;
      const double t = c->closed() ? c->a() + len * i / n : c->a() + len * i / (n - 1);
      s.param = Param(t, 0.0);
      s.point = c->point(t);
      if (!c->closed() && (i == 0 || i == n - 1)) {
        s.on_boundary = true;
        s.nu = boundary_outward_normal(*c, i == 0 ? CurveEnd::a : CurveEnd::b);
      }
      out.push_back(s);
    }
    return out;
  }
  const auto& surf = std::get<ParamSurface>(m);
  const double lu = surf.b() - surf.a(), lv = surf.d() - surf.c();
  for (int i = 0; i < n; ++i) {
    const double u = surf.a() + lu * i / (n - 1);
    for (int j = 0; j < n; ++j) {
      // Periodic: [c, d) uniformly; otherwise cell midpoints, then the v-sides.
      const double v = surf.periodic_v() ? surf.c() + lv * j / n
                                         : surf.c() + lv * (j + 0.5) / n;
      ManifoldSample s;
      s.param = Param(u, v);
      s.point = surf.point(u, v);
      if (i == 0 || i == n - 1) {
        s.on_boundary = true;
        s.nu = boundary_outward_normal(surf, i == 0 ? SurfaceSide::u_a : SurfaceSide::u_b, v);
      }
      out.push_back(s);
    }
  }
  if (!surf.periodic_v()) {
    for (int i = 1; i < n - 1; ++i) {
      const double u = surf.a() + lu * i / (n - 1);
      for (SurfaceSide side : {SurfaceSide::v_c, SurfaceSide::v_d}) {
        const double v = side == SurfaceSide::v_c ? surf.c() : surf.d();
        ManifoldSample s;
        s.param = Param(u, v);
        s.point = surf.point(u, v);
        s.on_boundary = true;
        s.nu = boundary_outward_normal(surf, side, u);
        out.push_back(s);
      }
    }
  }
  return out;
}

}  // namespace shapecalc
