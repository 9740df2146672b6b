#pragma once

#include "shapecalc/fields.hpp"

namespace shapecalc {

/// Fixed-step classical RK4 integration of dx/dt = X(x) up to t_final.
/// The number of steps actually taken is max(n_steps, ceil(|t_final| / max_step))
/// unless max_step <= 0, which disables the cap.
struct FlowConfig {
  double t_final = 0.0;
  int n_steps = 1;
  double max_step = 0.01;

  int steps() const;
  void validate() const;
};

struct FlowJet {
  Vec point = Vec::Zero();
  Mat jacobian = Mat::Identity();  // d Phi_t / dx
};

Vec flow_point(const AmbientField& x, const Vec& x0, const FlowConfig& cfg);

/// Phi_t(x0) together with its spatial Jacobian, obtained by integrating the
/// variational equation d/dt DPhi = DX(Phi) DPhi alongside the trajectory.
FlowJet flow_jet(const AmbientField& x, const Vec& x0, const FlowConfig& cfg);

/// Transported manifold Phi_t o gamma (resp. Phi_t o phi). First derivatives
/// are DPhi_t gamma'; second derivatives are finite differences of those.
ParamCurve flow_manifold(const AmbientField& x, const ParamCurve& m,
                         const FlowConfig& cfg);
ParamSurface flow_manifold(const AmbientField& x, const ParamSurface& m,
                           const FlowConfig& cfg);
Manifold flow_manifold(const AmbientField& x, const Manifold& m,
                       const FlowConfig& cfg);

/// max over samples p of M of dist(Phi_t(p), M); `n_samples` per parameter
/// direction as in sample_manifold.
double invariance_residual(const AmbientField& x, const Manifold& m,
                           const FlowConfig& cfg, int n_samples);

}  // namespace shapecalc
