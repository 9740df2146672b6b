#include "shapecalc/fields.hpp"

#include "finite_diff.hpp"
#include "shapecalc/projection.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <sstream>

namespace shapecalc {

namespace {

Ball enclosing(const Ball& x, const Ball& y) {
  const double d = (y.center - x.center).norm();
  if (d + y.radius <= x.radius) return x;
  if (d + x.radius <= y.radius) return y;
  const double r = 0.5 * (d + x.radius + y.radius);
  const Vec c = d > 0 ? Vec(x.center + (r - x.radius) / d * (y.center - x.center))
                      : x.center;
  return Ball{c, r};
}

void check_dim(int dim) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("field dimension must be 2 or 3");
}

// Restrict a Jacobian to the plane z = 0 for planar fields.
Mat planar(Mat m, int dim) {
  if (dim == 2) {
    m.row(2).setZero();
    m.col(2).setZero();
  }
  return m;
}

Vec planar(Vec v, int dim) {
  if (dim == 2) v.z() = 0.0;
  return v;
}

std::string vec_str(const Vec& v, int dim) {
  std::ostringstream os;
  os.precision(6);
  os << '(' << v.x() << ',' << v.y();
  if (dim == 3) os << ',' << v.z();
  os << ')';
  return os.str();
}

// Catalog field F(x) multiplied by the plateau in |x|.
AmbientField globally_cut(int dim, std::function<FieldJet(const Vec&)> raw,
                          std::string name) {
  auto jet = [dim, raw](const Vec& x0) {
    const Vec x = planar(x0, dim);
    const double r = x.norm();
    const auto [chi, dchi] = plateau(r, kFieldPlateauInner, kFieldPlateauOuter);
    FieldJet out;
    if (chi == 0.0) return out;
    const FieldJet f = raw(x);
    out.value = chi * f.value;
    out.jacobian = chi * f.jacobian;
    if (dchi != 0.0 && r > 0) out.jacobian += f.value * (dchi / r * x).transpose();
    out.value = planar(out.value, dim);
    out.jacobian = planar(out.jacobian, dim);
    return out;
  };
  auto value = [jet](const Vec& x) { return jet(x).value; };
  return AmbientField(dim, value, jet, Ball{Vec::Zero(), kFieldPlateauOuter},
                      std::move(name));
}

Mat skew(const Vec& a) {
  Mat s;
  s << 0, -a.z(), a.y(), a.z(), 0, -a.x(), -a.y(), a.x(), 0;
  return s;
}

std::pair<double, double> param_range(const Manifold& m, int k) {
  if (const auto* c = std::get_if<ParamCurve>(&m)) return {c->a(), c->b()};
  const auto& s = std::get<ParamSurface>(m);
  return k == 0 ? std::pair{s.a(), s.b()} : std::pair{s.c(), s.d()};
}

bool periodic_dir(const Manifold& m, int k) {
  if (const auto* c = std::get_if<ParamCurve>(&m)) return c->closed();
  return k == 1 && std::get<ParamSurface>(m).periodic_v();
}

// Distance of w(k) outside [lo, hi], with its derivative in w(k).
std::pair<double, double> outside(double w, double lo, double hi) {
  if (w < lo) return {lo - w, -1.0};
  if (w > hi) return {w - hi, 1.0};
  return {0.0, 0.0};
}

// Foot point of x on M with the gradient of the foot parameter in x.
struct Foot {
  Param w = Param::Zero();
  Vec p = Vec::Zero();
  double distance = 0.0;
  Eigen::Matrix<double, 2, 3> grad = Eigen::Matrix<double, 2, 3>::Zero();
  Mat dp = Mat::Zero();  // Jacobian of x -> p(x)
};

Foot foot_point(const ManifoldProjector& proj, const Vec& x, bool with_grad) {
  const auto res = proj.project(x);
  Foot f;
  f.w = res.param;
  f.p = res.point;
  f.distance = res.distance;
  if (!with_grad) return f;
  const Manifold& m = proj.manifold();
  if (const auto* c = std::get_if<ParamCurve>(&m)) {
    const double t = f.w(0);
    const Vec d1 = c->velocity(t), d2 = c->acceleration(t);
    const double fs = d1.squaredNorm() + d2.dot(f.p - x);
    f.grad.row(0) = (d1 / fs).transpose();
    f.dp = d1 * f.grad.row(0);
    return f;
  }
  const auto& s = std::get<ParamSurface>(m);
  const double u = f.w(0), v = f.w(1);
  const SurfaceJet j = s.jet(u, v);
  const double hu = 1e-5 * (s.b() - s.a()), hv = 1e-5 * (s.d() - s.c());
  const Vec puu = (s.du(u + hu, v) - s.du(u - hu, v)) / (2 * hu);
  const Vec puv = (s.du(u, v + hv) - s.du(u, v - hv)) / (2 * hv);
  const Vec pvv = s.dvv(u, v);
  const Vec r = j.p - x;
  Eigen::Matrix2d h;
  h << j.pu.dot(j.pu) + r.dot(puu), j.pu.dot(j.pv) + r.dot(puv),
      j.pv.dot(j.pu) + r.dot(puv), j.pv.dot(j.pv) + r.dot(pvv);
  Eigen::Matrix<double, 2, 3> jt;
  jt.row(0) = j.pu.transpose();
  jt.row(1) = j.pv.transpose();
  f.grad = h.inverse() * jt;
  Eigen::Matrix<double, 3, 2> jac;
  jac.col(0) = j.pu;
  jac.col(1) = j.pv;
  f.dp = jac * f.grad;
  return f;
}

// Smooth weight of the foot point and its gradient in x: a tube plateau on the
// distance times a plateau on how far the foot parameter lies beyond dM.
struct TubeWindow {
  double inner, outer;
  double margin_inner[2] = {0, 0}, margin_outer[2] = {0, 0};
  double lo[2] = {0, 0}, hi[2] = {0, 0};
  bool open[2] = {false, false};
  int dims = 1;

  TubeWindow(const Manifold& m, double tube_inner, double tube_outer, double margin)
      : inner(tube_inner), outer(tube_outer) {
    dims = intrinsic_dim(m);
    for (int k = 0; k < dims; ++k) {
      const auto [a, b] = param_range(m, k);
      lo[k] = a;
      hi[k] = b;
      open[k] = !periodic_dir(m, k);
      margin_inner[k] = 0.5 * margin * (b - a);
      margin_outer[k] = 0.9 * margin * (b - a);
    }
  }

  ScalarJet weight(const Foot& f, const Vec& x, bool with_grad) const {
    ScalarJet out;
    const auto [ct, dct] = plateau(f.distance, inner, outer);
    if (ct == 0.0) return out;
    double cw[2] = {1.0, 1.0}, dcw[2] = {0.0, 0.0}, sgn[2] = {0.0, 0.0};
    for (int k = 0; k < dims; ++k) {
      if (!open[k]) continue;
      const auto [o, s] = outside(f.w(k), lo[k], hi[k]);
      const auto [c, dc] = plateau(o, margin_inner[k], margin_outer[k]);
      cw[k] = c;
      dcw[k] = dc;
      sgn[k] = s;
    }
    out.value = ct * cw[0] * cw[1];
    if (!with_grad || out.value == 0.0) return out;
    if (dct != 0.0 && f.distance > 0) {
      out.gradient += dct * cw[0] * cw[1] * (x - f.p) / f.distance;
    }
    for (int k = 0; k < dims; ++k) {
      if (dcw[k] == 0.0) continue;
      out.gradient += ct * cw[1 - k] * dcw[k] * sgn[k] * f.grad.row(k).transpose();
    }
    return out;
  }
};

Ball tube_support(const Manifold& m, double outer, double margin) {
  // Sample the extended chart, then enclose it with the tube radius.
  std::vector<Vec> pts;
  const int n = 64;
  if (const auto* c = std::get_if<ParamCurve>(&m)) {
    const double len = c->b() - c->a();
    const double ext = c->closed() ? 0.0 : margin * len;
    for (int i = 0; i <= n; ++i) pts.push_back(c->point(c->a() - ext + (len + 2 * ext) * i / n));
  } else {
    const auto& s = std::get<ParamSurface>(m);
    const double lu = s.b() - s.a(), lv = s.d() - s.c();
    const double eu = margin * lu, ev = s.periodic_v() ? 0.0 : margin * lv;
    for (int i = 0; i <= 32; ++i) {
      for (int j = 0; j <= 32; ++j) {
        pts.push_back(s.point(s.a() - eu + (lu + 2 * eu) * i / 32,
                              s.c() - ev + (lv + 2 * ev) * j / 32));
      }
    }
  }
  Vec c = Vec::Zero();
  for (const auto& p : pts) c += p;
  c /= static_cast<double>(pts.size());
  double r = 0.0;
  for (const auto& p : pts) r = std::max(r, (p - c).norm());
  // Coarse sampling may miss the extreme point slightly.
  return Ball{c, 1.05 * r + outer};
}

constexpr double kPartMargin = 0.25;

ManifoldProjector extended_projector(const Manifold& m) {
  ManifoldProjector::Options opts;
  opts.mode = ManifoldProjector::Mode::extended;
  opts.seeds = std::holds_alternative<ParamCurve>(m) ? 256 : 576;
  opts.max_iterations = 30;
  opts.tolerance = 1e-13;
  opts.margin = kPartMargin;
  return ManifoldProjector(m, opts);
}

}  // namespace

AmbientField::AmbientField(int dim, ValueFn value, JetFn jet, Ball support,
                           std::string name)
    : dim_(dim),
      value_(std::move(value)),
      jet_(std::move(jet)),
      support_(support),
      name_(std::move(name)) {
  check_dim(dim);
  if (!value_ || !jet_) throw std::invalid_argument("AmbientField: empty callable");
}

AmbientField AmbientField::renamed(std::string name) const {
  AmbientField out = *this;
  out.name_ = std::move(name);
  return out;
}

AmbientField operator+(const AmbientField& x, const AmbientField& y) {
  if (x.dim_ != y.dim_) throw std::invalid_argument("field sum: dimension mismatch");
  auto xv = x.value_, yv = y.value_;
  auto xj = x.jet_, yj = y.jet_;
  return AmbientField(
      x.dim_, [xv, yv](const Vec& p) { return Vec(xv(p) + yv(p)); },
      [xj, yj](const Vec& p) {
        FieldJet a = xj(p);
        const FieldJet b = yj(p);
        a.value += b.value;
        a.jacobian += b.jacobian;
        return a;
      },
      enclosing(x.support_, y.support_), x.name_ + "+" + y.name_);
}

AmbientField operator*(double s, const AmbientField& x) {
  auto xv = x.value_;
  auto xj = x.jet_;
  std::ostringstream os;
  os.precision(6);
  os << s << '*' << x.name_;
  return AmbientField(
      x.dim_, [s, xv](const Vec& p) { return Vec(s * xv(p)); },
      [s, xj](const Vec& p) {
        FieldJet a = xj(p);
        a.value *= s;
        a.jacobian *= s;
        return a;
      },
      x.support_, os.str());
}

AmbientField operator-(const AmbientField& x, const AmbientField& y) {
  return (x + (-1.0) * y).renamed(x.name() + "-" + y.name());
}

AmbientField modulate(const ScalarField& g, const AmbientField& x,
                      std::string name) {
  return AmbientField(
      x.dim(), [g, x](const Vec& p) { return Vec(g(p).value * x(p)); },
      [g, x](const Vec& p) {
        const ScalarJet s = g(p);
        FieldJet f = x.jet(p);
        f.jacobian = s.value * f.jacobian + f.value * s.gradient.transpose();
        f.value *= s.value;
        return f;
      },
      x.support(), std::move(name));
}

std::pair<double, double> smooth_step(double s) {
  if (s <= 0.0) return {0.0, 0.0};
  if (s >= 1.0) return {1.0, 0.0};
  const double f0 = std::exp(-1.0 / s), f1 = std::exp(-1.0 / (1.0 - s));
  const double df0 = f0 / (s * s), df1 = f1 / ((1.0 - s) * (1.0 - s));
  const double den = f0 + f1;
  // d/ds f0/(f0+f1) with f1 depending on 1 - s.
  return {f0 / den, (df0 * f1 + f0 * df1) / (den * den)};
}

std::pair<double, double> plateau(double r, double inner, double outer) {
  if (!(outer > inner)) throw std::invalid_argument("plateau: need outer > inner");
  const double w = outer - inner;
  const auto [s, ds] = smooth_step((r - inner) / w);
  return {1.0 - s, -ds / w};
}

std::pair<double, double> bump_profile(double s) {
  if (std::abs(s) >= 1.0) return {0.0, 0.0};
  const double q = 1.0 - s * s;
  const double b = std::exp(1.0 - 1.0 / q);
  return {b, b * (-2.0 * s / (q * q))};
}

AmbientField zero_field(int dim) {
  check_dim(dim);
  return AmbientField(
      dim, [](const Vec&) { return Vec(Vec::Zero()); },
      [](const Vec&) { return FieldJet{}; }, Ball{Vec::Zero(), 0.0}, "zero");
}

AmbientField constant_field(const Vec& v, int dim) {
  check_dim(dim);
  const Vec c = planar(v, dim);
  return globally_cut(
      dim, [c](const Vec&) { return FieldJet{c, Mat::Zero()}; },
      "constant{" + vec_str(c, dim) + "}");
}

AmbientField radial_field(int dim, std::optional<Vec> axis) {
  check_dim(dim);
  Vec a = Vec::Zero();
  Mat proj = Mat::Identity();
  std::string name = "radial{}";
  if (dim == 2) {
    proj(2, 2) = 0.0;
  } else if (axis) {
    if (axis->norm() == 0.0) throw std::invalid_argument("radial_field: zero axis");
    a = axis->normalized();
    proj -= a * a.transpose();
    name = "radial{axis=" + vec_str(a, 3) + "}";
  }
  // Switched off near the origin/axis, where x/|x| is singular.
  constexpr double kOff = 0.05, kOn = 0.25;
  return globally_cut(
      dim,
      [proj](const Vec& x) {
        FieldJet f;
        const Vec xp = proj * x;
        const double rho = xp.norm();
        if (rho <= kOff) return f;
        const auto [s, ds] = smooth_step((rho - kOff) / (kOn - kOff));
        const Vec n = xp / rho;
        f.value = s * n;
        f.jacobian = (ds / (kOn - kOff)) * n * n.transpose() +
                     s * (proj - n * n.transpose()) / rho;
        return f;
      },
      name);
}

AmbientField rotation_field(int dim, const Vec& axis) {
  check_dim(dim);
  const Vec a = dim == 2 ? Vec(Vec::UnitZ()) : axis.normalized();
  if (dim == 3 && axis.norm() == 0.0) throw std::invalid_argument("rotation_field: zero axis");
  const Mat s = skew(a);
  return globally_cut(
      dim, [s](const Vec& x) { return FieldJet{s * x, s}; },
      dim == 2 ? "rotation{}" : "rotation{axis=" + vec_str(a, 3) + "}");
}

AmbientField linear_field(const Mat& a, int dim) {
  check_dim(dim);
  const Mat m = planar(a, dim);
  std::ostringstream os;
  os.precision(6);
  os << "linear{";
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) os << (i || j ? "," : "") << m(i, j);
  }
  os << '}';
  return globally_cut(
      dim, [m](const Vec& x) { return FieldJet{m * x, m}; }, os.str());
}

AmbientField bump_field(const Vec& center, double radius, const Vec& direction,
                        int dim, const Ball& hold_all) {
  check_dim(dim);
  const Vec c = planar(center, dim);
  const Vec d = planar(direction, dim);
  const AmbientField dir = AmbientField(
      dim, [d](const Vec&) { return d; },
      [d](const Vec&) { return FieldJet{d, Mat::Zero()}; }, hold_all,
      vec_str(d, dim));
  return bump_field(c, radius, dir, hold_all);
}

AmbientField bump_field(const Vec& center, double radius,
                        const AmbientField& direction, const Ball& hold_all) {
  if (!(radius > 0)) throw std::invalid_argument("bump_field: radius must be positive");
  const int dim = direction.dim();
  const Vec c = planar(center, dim);
  const Ball ball{c, radius};
  if (!hold_all.contains(ball)) {
    std::ostringstream os;
    os << "bump_field: ball " << vec_str(c, dim) << " radius " << radius
       << " leaves the hold-all domain";
    throw SupportViolation(os.str());
  }
  std::ostringstream name;
  name.precision(6);
  name << "bump{center=" << vec_str(c, dim) << ",radius=" << radius
       << ",dir=" << direction.name() << '}';
  return AmbientField(
      dim,
      [c, radius, direction, dim](const Vec& p) {
        const double s = (planar(p, dim) - c).norm() / radius;
        const double b = bump_profile(s).first;
        return b == 0.0 ? Vec(Vec::Zero()) : Vec(b * direction(p));
      },
      [c, radius, direction, dim](const Vec& p) {
        FieldJet out;
        const Vec r = planar(p, dim) - c;
        const double dist = r.norm();
        const auto [b, db] = bump_profile(dist / radius);
        if (b == 0.0) return out;
        const FieldJet d = direction.jet(p);
        out.value = b * d.value;
        out.jacobian = b * d.jacobian;
        if (dist > 0) out.jacobian += d.value * (db / (radius * dist) * r).transpose();
        return out;
      },
      ball, name.str());
}

FieldConsistency check_field(const AmbientField& x, int exterior_points,
                             int interior_points) {
  FieldConsistency out;
  std::mt19937_64 rng(0xf1e1d);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const int dim = x.dim();
  auto random_dir = [&] {
    Vec v;
    do {
      v = Vec(gauss(rng), gauss(rng), dim == 3 ? gauss(rng) : 0.0);
    } while (v.norm() < 1e-3);
    return Vec(v.normalized());
  };
  const Ball& sup = x.support();
  for (int i = 0; i < exterior_points; ++i) {
    const double r = sup.radius * (1.0 + 1e-9) + (0.5 * sup.radius + 1.0) * unif(rng);
    const Vec p = sup.center + r * random_dir();
    const FieldJet j = x.jet(p);
    out.max_exterior = std::max({out.max_exterior, j.value.norm(), j.jacobian.norm()});
  }
  const double h = 1e-4 * std::max(sup.radius, 1e-3);
  for (int i = 0; i < interior_points; ++i) {
    const double r = sup.radius * std::pow(unif(rng), 1.0 / dim);
    const Vec p = sup.center + r * random_dir();
    const Mat jac = x.jacobian(p);
    Mat fd = Mat::Zero();
    for (int k = 0; k < dim; ++k) {
      const Vec e = Vec::Unit(k);
      fd.col(k) = detail::diff1([&](double s) { return Vec(x(p + s * e)); }, 0.0, h,
                                -1.0, 1.0, true);
    }
    const double err = (fd - jac).norm() / std::max(1.0, jac.norm());
    out.max_jacobian_error = std::max(out.max_jacobian_error, err);
  }
  return out;
}

Vec project_normal(const Manifold& m, const Param& w, const Vec& xp) {
  Vec out = xp;
  for (const Vec& e : tangent_basis(m, w)) out -= xp.dot(e) * e;
  return out;
}

Vec extended_conormal(const Manifold& m, const Param& w, double cutoff) {
  if (const auto* c = std::get_if<ParamCurve>(&m)) {
    if (c->closed()) return Vec::Zero();
    const double rho = cutoff * (c->b() - c->a());
    const double t = w(0);
    const double weight = plateau(std::abs(c->b() - t), 0.0, rho).first -
                          plateau(std::abs(t - c->a()), 0.0, rho).first;
    if (weight == 0.0) return Vec::Zero();
    return weight * c->velocity(t).normalized();
  }
  const auto& s = std::get<ParamSurface>(m);
  const double u = w(0), v = w(1);
  Vec out = Vec::Zero();
  const double ru = cutoff * (s.b() - s.a());
  const double wu = plateau(std::abs(s.b() - u), 0.0, ru).first -
                    plateau(std::abs(u - s.a()), 0.0, ru).first;
  double wv = 0.0;
  if (!s.periodic_v()) {
    const double rv = cutoff * (s.d() - s.c());
    wv = plateau(std::abs(s.d() - v), 0.0, rv).first -
         plateau(std::abs(v - s.c()), 0.0, rv).first;
  }
  if (wu == 0.0 && wv == 0.0) return out;
  const SurfaceJet j = s.jet(u, v);
  const Vec n = j.pu.cross(j.pv).normalized();
  if (wu != 0.0) out += wu * j.pv.cross(n) / j.pv.norm();
  if (wv != 0.0) out += wv * n.cross(j.pu) / j.pu.norm();
  return out;
}

PartValues split_at(const Manifold& m, const Param& w, const Vec& xp,
                    double cutoff) {
  PartValues out;
  out.perp = project_normal(m, w, xp);
  const Vec nu = extended_conormal(m, w, cutoff);
  out.nu_part = xp.dot(nu) * nu;
  out.tangential = xp - out.perp - out.nu_part;
  return out;
}

FieldSplit split_field(const Manifold& m, const AmbientField& x, int n_samples) {
  if (n_samples < 2) throw std::invalid_argument("split_field: need n_samples >= 2");
  FieldSplit out;
  for (const ManifoldSample& ms : sample_manifold(m, n_samples)) {
    SplitSample s;
    s.param = ms.param;
    s.point = ms.point;
    s.on_boundary = ms.on_boundary;
    s.nu = ms.nu;
    s.x = x(ms.point);
    const PartValues pv = split_at(m, ms.param, s.x);
    s.perp = pv.perp;
    s.tangential = pv.tangential;
    s.nu_part = pv.nu_part;
    out.samples.push_back(s);
  }
  return out;
}

TangencyReport check_tangency(const Manifold& m, const AmbientField& x,
                              int n_samples) {
  TangencyReport out;
  for (const ManifoldSample& ms : sample_manifold(m, n_samples)) {
    const Vec xp = x(ms.point);
    out.max_normal_residual =
        std::max(out.max_normal_residual, project_normal(m, ms.param, xp).norm());
    if (ms.on_boundary) {
      out.max_boundary_residual =
          std::max(out.max_boundary_residual, std::abs(xp.dot(ms.nu)));
    }
  }
  return out;
}

AmbientField realize_along(const Manifold& m, AlongManifold values,
                           std::string name) {
  const int dim = ambient_dim(m);
  const int idim = intrinsic_dim(m);
  const double diam = manifold_diameter(m);
  const double inner = 0.1 * diam, outer = 0.2 * diam;
  auto proj = std::make_shared<const ManifoldProjector>(extended_projector(m));
  const TubeWindow window(m, inner, outer, kPartMargin);
  double steps[2] = {0, 0};
  for (int k = 0; k < idim; ++k) {
    const auto [lo, hi] = param_range(m, k);
    steps[k] = 1e-3 * (hi - lo);
  }
  auto value = [proj, window, values](const Vec& x) {
    const Foot f = foot_point(*proj, x, false);
    const double c = window.weight(f, x, false).value;
    return c == 0.0 ? Vec(Vec::Zero()) : Vec(c * values(f.w));
  };
  auto jet = [proj, window, values, idim, steps, dim](const Vec& x) {
    FieldJet out;
    const Foot f = foot_point(*proj, x, true);
    const ScalarJet c = window.weight(f, x, true);
    if (c.value == 0.0) return out;
    const Vec v0 = values(f.w);
    out.value = c.value * v0;
    out.jacobian = v0 * c.gradient.transpose();
    for (int k = 0; k < idim; ++k) {
      const Vec vk = detail::diff1(
          [&](double s) {
            Param w = f.w;
            w(k) += s;
            return Vec(values(w));
          },
          0.0, steps[k], -1.0, 1.0, true);
      out.jacobian += c.value * vk * f.grad.row(k);
    }
    out.value = planar(out.value, dim);
    out.jacobian = planar(out.jacobian, dim);
    return out;
  };
  return AmbientField(dim, value, jet, tube_support(m, outer, kPartMargin),
                      std::move(name));
}

SplitFields realize_split(const Manifold& m, const AmbientField& x) {
  auto part = [m, x](int which) {
    return [m, x, which](const Param& w) {
      const PartValues pv = split_at(m, w, x(manifold_point(m, w)));
      return which == 0 ? pv.perp : which == 1 ? pv.tangential : pv.nu_part;
    };
  };
  return SplitFields{realize_along(m, part(0), x.name() + "^perp"),
                     realize_along(m, part(1), x.name() + "^t"),
                     realize_along(m, part(2), x.name() + "^nu")};
}

AmbientField tube_cutoff(const Manifold& m, const AmbientField& x, double inner,
                         double outer) {
  ManifoldProjector::Options opts;
  opts.seeds = std::holds_alternative<ParamCurve>(m) ? 256 : 576;
  auto proj = std::make_shared<const ManifoldProjector>(m, opts);
  std::ostringstream name;
  name.precision(6);
  name << x.name() << "*tube{" << inner << ',' << outer << '}';
  return AmbientField(
      x.dim(),
      [proj, x, inner, outer](const Vec& p) {
        const double c = plateau(proj->project(p).distance, inner, outer).first;
        return c == 0.0 ? Vec(Vec::Zero()) : Vec(c * x(p));
      },
      [proj, x, inner, outer](const Vec& p) {
        FieldJet out;
        const auto res = proj->project(p);
        const auto [c, dc] = plateau(res.distance, inner, outer);
        if (c == 0.0) return out;
        out = x.jet(p);
        out.jacobian *= c;
        if (dc != 0.0 && res.distance > 0) {
          out.jacobian += out.value * (dc / res.distance * (p - res.point)).transpose();
        }
        out.value *= c;
        return out;
      },
      x.support(), name.str());
}

AmbientField normal_offset_field(const Manifold& m, double scale, double outer) {
  const int dim = ambient_dim(m);
  auto proj = std::make_shared<const ManifoldProjector>(extended_projector(m));
  const TubeWindow window(m, 0.5 * outer, outer, kPartMargin);
  std::ostringstream name;
  name.precision(6);
  name << "normal_offset{" << scale << ',' << outer << '}';
  return AmbientField(
      dim,
      [proj, window, scale](const Vec& x) {
        const Foot f = foot_point(*proj, x, false);
        const double c = window.weight(f, x, false).value;
        return c == 0.0 ? Vec(Vec::Zero()) : Vec(scale * c * (x - f.p));
      },
      [proj, window, scale, dim](const Vec& x) {
        FieldJet out;
        const Foot f = foot_point(*proj, x, true);
        const ScalarJet c = window.weight(f, x, true);
        if (c.value == 0.0) return out;
        const Vec off = x - f.p;
        out.value = scale * c.value * off;
        out.jacobian = scale * (c.value * (Mat::Identity() - f.dp) +
                                off * c.gradient.transpose());
        out.value = planar(out.value, dim);
        out.jacobian = planar(out.jacobian, dim);
        return out;
      },
      tube_support(m, outer, kPartMargin), name.str());
}

}  // namespace shapecalc
