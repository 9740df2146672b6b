#include "shapecalc/flow.hpp"

#include "finite_diff.hpp"
#include "shapecalc/projection.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace shapecalc {

namespace {

constexpr double kSecondDerivStep = 1e-3;

void check_finite(const Vec& p, const Mat* j) {
  if (!p.allFinite() || (j && !j->allFinite())) {
    throw NonFinite("flow trajectory left the finite range");
  }
}

std::string flowed_name(const std::string& base, const AmbientField& x,
                        const FlowConfig& cfg) {
  std::ostringstream os;
  os.precision(6);
  os << base << "@flow{" << x.name() << ",t=" << cfg.t_final << '}';
  return os.str();
}

}  // namespace

int FlowConfig::steps() const {
  int n = std::max(n_steps, 1);
  if (max_step > 0 && t_final != 0.0) {
    n = std::max(n, static_cast<int>(std::ceil(std::abs(t_final) / max_step - 1e-9)));
  }
  return n;
}

void FlowConfig::validate() const {
  if (n_steps < 1) throw std::invalid_argument("flow: n_steps must be >= 1");
  if (!std::isfinite(t_final)) throw std::invalid_argument("flow: t_final must be finite");
  if (!std::isfinite(max_step)) throw std::invalid_argument("flow: max_step must be finite");
}

Vec flow_point(const AmbientField& x, const Vec& x0, const FlowConfig& cfg) {
  cfg.validate();
  const int n = cfg.steps();
  const double h = cfg.t_final / n;
  Vec p = x0;
  if (h == 0.0) return p;
  for (int i = 0; i < n; ++i) {
    const Vec k1 = x(p);
    const Vec k2 = x(p + 0.5 * h * k1);
    const Vec k3 = x(p + 0.5 * h * k2);
    const Vec k4 = x(p + h * k3);
    p += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    check_finite(p, nullptr);
  }
  return p;
}

FlowJet flow_jet(const AmbientField& x, const Vec& x0, const FlowConfig& cfg) {
  cfg.validate();
  const int n = cfg.steps();
  const double h = cfg.t_final / n;
  FlowJet out;
  out.point = x0;
  if (h == 0.0) return out;
  Vec& p = out.point;
  Mat& m = out.jacobian;
  for (int i = 0; i < n; ++i) {
    const FieldJet j1 = x.jet(p);
    const Mat m1 = j1.jacobian * m;
    const Vec p2 = p + 0.5 * h * j1.value;
    const FieldJet j2 = x.jet(p2);
    const Mat m2 = j2.jacobian * (m + 0.5 * h * m1);
    const Vec p3 = p + 0.5 * h * j2.value;
    const FieldJet j3 = x.jet(p3);
    const Mat m3 = j3.jacobian * (m + 0.5 * h * m2);
    const Vec p4 = p + h * j3.value;
    const FieldJet j4 = x.jet(p4);
    const Mat m4 = j4.jacobian * (m + h * m3);
    p += (h / 6.0) * (j1.value + 2.0 * j2.value + 2.0 * j3.value + j4.value);
    m += (h / 6.0) * (m1 + 2.0 * m2 + 2.0 * m3 + m4);
    check_finite(p, &m);
  }
  return out;
}

ParamCurve flow_manifold(const AmbientField& x, const ParamCurve& m,
                         const FlowConfig& cfg) {
  cfg.validate();
  const ParamCurve base = m;
  auto gamma = [x, base, cfg](double t) { return flow_point(x, base.point(t), cfg); };
  auto dgamma = [x, base, cfg](double t) {
    const FlowJet j = flow_jet(x, base.point(t), cfg);
    return Vec(j.jacobian * base.velocity(t));
  };
  const double h = kSecondDerivStep * (m.b() - m.a());
  auto ddgamma = [dgamma, base, h](double t) {
    return detail::diff1(dgamma, t, h, base.a(), base.b(), base.closed());
  };
  return m.with_callables(gamma, dgamma, ddgamma, flowed_name(m.name(), x, cfg));
}

ParamSurface flow_manifold(const AmbientField& x, const ParamSurface& m,
                           const FlowConfig& cfg) {
  cfg.validate();
  const ParamSurface base = m;
  auto jet = [x, base, cfg](double u, double v) {
    const SurfaceJet b = base.jet(u, v);
    const FlowJet j = flow_jet(x, b.p, cfg);
    return SurfaceJet{j.point, j.jacobian * b.pu, j.jacobian * b.pv};
  };
  auto phi = [x, base, cfg](double u, double v) {
    return flow_point(x, base.point(u, v), cfg);
  };
  auto phi_u = [jet](double u, double v) { return jet(u, v).pu; };
  auto phi_v = [jet](double u, double v) { return jet(u, v).pv; };
  const double h = kSecondDerivStep * (m.d() - m.c());
  auto phi_vv = [phi_v, base, h](double u, double v) {
    return detail::diff1([&](double s) { return phi_v(u, s); }, v, h, base.c(),
                         base.d(), base.periodic_v());
  };
  return m.with_callables(phi, phi_u, phi_v, phi_vv, jet,
                          flowed_name(m.name(), x, cfg));
}

Manifold flow_manifold(const AmbientField& x, const Manifold& m,
                       const FlowConfig& cfg) {
  return std::visit([&](const auto& mm) -> Manifold { return flow_manifold(x, mm, cfg); },
                    m);
}

double invariance_residual(const AmbientField& x, const Manifold& m,
                           const FlowConfig& cfg, int n_samples) {
  ManifoldProjector::Options opts;
  opts.seeds = 1024;
  opts.max_iterations = 20;
  opts.tolerance = 1e-12;
  const ManifoldProjector proj(m, opts);
  double worst = 0.0;
  for (const ManifoldSample& s : sample_manifold(m, n_samples)) {
    const Vec q = flow_point(x, s.point, cfg);
    worst = std::max(worst, proj.project(q).distance);
  }
  return worst;
}

}  // namespace shapecalc
