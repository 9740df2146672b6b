#include "shapecalc/derivative.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace shapecalc {

void FDConfig::validate() const {
  if (!(t0 > 0.0) || !std::isfinite(t0)) throw std::invalid_argument("fd: t0 must be > 0");
  if (levels < 2) throw std::invalid_argument("fd: levels must be >= 2");
  flow.validate();
}

void Tolerances::validate() const {
  const std::pair<const char*, double> all[] = {
      {"rel", rel},           {"abs", abs},
      {"nullity", nullity},   {"locality", locality},
      {"decomposition", decomposition}, {"crack", crack}};
  for (const auto& [name, value] : all) {
    if (!(value > 0.0) || !std::isfinite(value)) {
      throw std::invalid_argument(std::string("tolerances.") + name + " must be positive");
    }
  }
}

FDResult eulerian_fd(const ShapeFunctional& j, const Manifold& m,
                     const AmbientField& x, const FDConfig& cfg) {
  cfg.validate();
  FlowConfig flow = cfg.flow;
  auto evaluate_at = [&](double t) {
    flow.t_final = t;
    const double v = j.evaluate(flow_manifold(x, m, flow));
    if (!std::isfinite(v)) {
      std::ostringstream os;
      os << j.name << " is not finite on the flowed shape at t=" << t;
      throw NonFinite(os.str());
    }
    return v;
  };

  FDResult out;
  // The base value goes through the same (t = 0) flowed representation as
  // the perturbed shapes, so finite-difference parts of it cancel.
  out.base_value = evaluate_at(0.0);
  std::vector<double> estimates;
  double t = cfg.t0;
  for (int k = 0; k < cfg.levels; ++k, t *= 0.5) {
    FDSeriesPoint p;
    p.t = t;
    p.quotient = (evaluate_at(t) - out.base_value) / t;
    if (k > 0) p.extrapolant = 2.0 * p.quotient - out.series.back().quotient;
    out.series.push_back(p);
    estimates.push_back(cfg.richardson && p.extrapolant ? *p.extrapolant : p.quotient);
  }
  if (cfg.richardson) estimates.erase(estimates.begin());

  const size_t n = estimates.size();
  out.value = estimates.back();
  out.error_estimate = n >= 2 ? std::abs(estimates[n - 1] - estimates[n - 2])
                              : std::abs(out.value - out.series.back().quotient);

  if (n >= 3) {
    const double eps = std::numeric_limits<double>::epsilon();
    const double noise = 1e3 * eps * (1.0 + std::abs(out.base_value)) / out.series.back().t;
    const double last = std::abs(estimates[n - 1] - estimates[n - 2]);
    const double prev = std::abs(estimates[n - 2] - estimates[n - 3]);
    if (last > noise && last > prev) {
      std::ostringstream os;
      os.precision(3);
      os << "difference quotients of " << j.name << " on " << manifold_name(m)
         << " under " << x.name() << " do not converge (last change " << last
         << " > previous " << prev << ")";
      throw NoConvergence(os.str());
    }
  }
  return out;
}

DerivativeReport make_report(std::string functional, std::string manifold,
                             std::string field, const FDResult& fd,
                             std::optional<double> analytic, const Tolerances& tol) {
  DerivativeReport r;
  r.functional = std::move(functional);
  r.manifold = std::move(manifold);
  r.field = std::move(field);
  r.fd_value = fd.value;
  r.fd_error_estimate = fd.error_estimate;
  r.analytic_value = analytic;
  r.series = fd.series;
  if (analytic) {
    r.abs_diff = std::abs(fd.value - *analytic);
    const double scale = std::max(std::abs(fd.value), std::abs(*analytic));
    r.rel_diff = scale > 0.0 ? r.abs_diff / scale : 0.0;
    r.verdict = r.rel_diff <= tol.rel || r.abs_diff <= tol.abs;
  } else {
    r.abs_diff = r.rel_diff = std::numeric_limits<double>::quiet_NaN();
  }
  return r;
}

DerivativeReport compare(const ShapeFunctional& j, const Manifold& m,
                         const AmbientField& x, const FDConfig& cfg,
                         const Tolerances& tol) {
  if (!j.analytic_derivative) {
    throw std::invalid_argument("compare: " + j.name + " has no analytic derivative");
  }
  const double analytic = j.analytic_derivative(m, x);
  const FDResult fd = eulerian_fd(j, m, x, cfg);
  return make_report(j.name, manifold_name(m), x.name(), fd, analytic, tol);
}

}  // namespace shapecalc
