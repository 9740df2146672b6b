#include "shapecalc/projection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace shapecalc {

namespace {

double wrap_into(double x, double lo, double hi) {
  const double period = hi - lo;
  double s = std::fmod(x - lo, period);
  if (s < 0) s += period;
  return lo + s;
}

}  // namespace

ManifoldProjector::ManifoldProjector(Manifold m, Options opts)
    : m_(std::move(m)), opts_(opts) {
  const bool extended = opts_.mode == Mode::extended;
  if (const auto* c = std::get_if<ParamCurve>(&m_)) {
    const double len = c->b() - c->a();
    periodic_[0] = c->closed();
    lo_ = Param(c->a(), 0.0);
    hi_ = Param(c->b(), 0.0);
    if (extended && !c->closed()) {
      lo_(0) -= opts_.margin * len;
      hi_(0) += opts_.margin * len;
    }
    const int n = std::max(opts_.seeds, 2);
    for (int i = 0; i < n; ++i) {
      const double t = periodic_[0] ? lo_(0) + (hi_(0) - lo_(0)) * i / n
                                    : lo_(0) + (hi_(0) - lo_(0)) * i / (n - 1);
      seed_params_.emplace_back(t, 0.0);
      seed_points_.push_back(c->point(t));
    }
    return;
  }
  const auto& s = std::get<ParamSurface>(m_);
  periodic_[1] = s.periodic_v();
  lo_ = Param(s.a(), s.c());
  hi_ = Param(s.b(), s.d());
  if (extended) {
    const double lu = s.b() - s.a(), lv = s.d() - s.c();
    lo_(0) -= opts_.margin * lu;
    hi_(0) += opts_.margin * lu;
    if (!periodic_[1]) {
      lo_(1) -= opts_.margin * lv;
      hi_(1) += opts_.margin * lv;
    }
  }
  const int n = std::max(2, static_cast<int>(std::ceil(std::sqrt(opts_.seeds))));
  for (int i = 0; i < n; ++i) {
    const double u = lo_(0) + (hi_(0) - lo_(0)) * i / (n - 1);
    for (int j = 0; j < n; ++j) {
      const double v = periodic_[1] ? lo_(1) + (hi_(1) - lo_(1)) * j / n
                                    : lo_(1) + (hi_(1) - lo_(1)) * j / (n - 1);
      seed_params_.emplace_back(u, v);
      seed_points_.push_back(s.point(u, v));
    }
  }
}

Param ManifoldProjector::admissible(Param w) const {
  const int dims = std::holds_alternative<ParamCurve>(m_) ? 1 : 2;
  for (int k = 0; k < dims; ++k) {
    w(k) = periodic_[k] ? wrap_into(w(k), lo_(k), hi_(k))
                        : std::clamp(w(k), lo_(k), hi_(k));
  }
  return w;
}

ManifoldProjector::Result ManifoldProjector::project(const Vec& x) const {
  size_t best = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < seed_points_.size(); ++i) {
    const double d2 = (seed_points_[i] - x).squaredNorm();
    if (d2 < best_d2) {
      best_d2 = d2;
      best = i;
    }
  }
  Result refined = std::holds_alternative<ParamCurve>(m_)
                       ? refine_curve(x, seed_params_[best](0))
                       : refine_surface(x, seed_params_[best]);
  if (refined.distance > std::sqrt(best_d2)) {
    return Result{seed_params_[best], seed_points_[best], std::sqrt(best_d2)};
  }
  return refined;
}

ManifoldProjector::Result ManifoldProjector::refine_curve(const Vec& x,
                                                          double t) const {
  const auto& c = std::get<ParamCurve>(m_);
  const double range = hi_(0) - lo_(0);
  int settled = 0;
  for (int it = 0; it < opts_.max_iterations; ++it) {
    const Vec r = c.point(t) - x;
    const Vec d1 = c.velocity(t);
    const Vec d2 = c.acceleration(t);
    const double grad = d1.dot(r);
    double hess = d1.squaredNorm() + d2.dot(r);
    if (hess < 0.1 * d1.squaredNorm()) hess = d1.squaredNorm();
    double step = -grad / hess;
    step = std::clamp(step, -0.1 * range, 0.1 * range);
    const double next = admissible(Param(t + step, 0.0))(0);
    const bool small = std::abs(next - t) <= opts_.tolerance * range;
    t = next;
    // One extra update after convergence polishes to machine precision.
    if (small && ++settled >= 2) break;
  }
  Result out;
  out.param = Param(t, 0.0);
  out.point = c.point(t);
  out.distance = (out.point - x).norm();
  return out;
}

ManifoldProjector::Result ManifoldProjector::refine_surface(const Vec& x,
                                                            Param w) const {
  const auto& s = std::get<ParamSurface>(m_);
  const Param range = hi_ - lo_;
  const double hu = 1e-5 * range(0), hv = 1e-5 * range(1);
  int settled = 0;
  for (int it = 0; it < opts_.max_iterations; ++it) {
    const double u = w(0), v = w(1);
    const SurfaceJet j = s.jet(u, v);
    const Vec r = j.p - x;
    const Vec puu = (s.du(u + hu, v) - s.du(u - hu, v)) / (2 * hu);
    const Vec puv = (s.du(u, v + hv) - s.du(u, v - hv)) / (2 * hv);
    const Vec pvv = s.dvv(u, v);
    Eigen::Matrix2d gram;
    gram << j.pu.dot(j.pu), j.pu.dot(j.pv), j.pv.dot(j.pu), j.pv.dot(j.pv);
    Eigen::Matrix2d hess = gram;
    hess(0, 0) += r.dot(puu);
    hess(0, 1) += r.dot(puv);
    hess(1, 0) += r.dot(puv);
    hess(1, 1) += r.dot(pvv);
    const Eigen::Vector2d grad(j.pu.dot(r), j.pv.dot(r));
    if (hess.determinant() <= 0.1 * gram.determinant() || hess(0, 0) <= 0) {
      hess = gram;
    }
    Eigen::Vector2d step = -hess.ldlt().solve(grad);
    for (int k = 0; k < 2; ++k) step(k) = std::clamp(step(k), -0.1 * range(k), 0.1 * range(k));
    const Param next = admissible(w + step);
    const bool small = std::abs(next(0) - w(0)) <= opts_.tolerance * range(0) &&
                       std::abs(next(1) - w(1)) <= opts_.tolerance * range(1);
    w = next;
    if (small && ++settled >= 2) break;
  }
  Result out;
  out.param = w;
  out.point = s.point(w(0), w(1));
  out.distance = (out.point - x).norm();
  return out;
}

double distance_to_manifold(const Manifold& m, const Vec& x) {
  return ManifoldProjector(m, ManifoldProjector::Options{}).project(x).distance;
}

}  // namespace shapecalc
