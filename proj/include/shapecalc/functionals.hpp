#pragma once

#include "shapecalc/fields.hpp"

#include <functional>
#include <string>

namespace shapecalc {

/**
 * Real-valued shape function on curves or surfaces.
 *
 * `analytic_derivative` is the closed-form Eulerian derivative dJ(M)(X), when
 * one is known. `interior_pairing` is its part supported in the interior of M
 * (the curvature density paired with the normal component of X), used to
 * compare localized probe derivatives against quadrature of the density.
 */
struct ShapeFunctional {
  using Evaluate = std::function<double(const Manifold&)>;
  using Derivative = std::function<double(const Manifold&, const AmbientField&)>;

  std::string name;
  Evaluate evaluate;
  Derivative analytic_derivative;
  Derivative interior_pairing;

  double operator()(const Manifold& m) const { return evaluate(m); }
  bool has_analytic() const { return static_cast<bool>(analytic_derivative); }
};

// Length --------------------------------------------------------------------

double length(const ParamCurve& curve, int panels = kDefaultCurvePanels);

/// Hadamard form when every quadrature node has a Frenet frame, otherwise the
/// Jacobian form. Closed curves carry no endpoint terms.
double analytic_dlength(const ParamCurve& curve, const AmbientField& x,
                        int panels = kDefaultCurvePanels);
/// int gamma' . (DX gamma') / |gamma'| dt.
double dlength_jacobian_form(const ParamCurve& curve, const AmbientField& x,
                             int panels = kDefaultCurvePanels);
/// -int kappa (X . N) |gamma'| dt + (X . T)(b) - (X . T)(a); throws
/// DegenerateFrame at straight points of space curves.
double dlength_hadamard_form(const ParamCurve& curve, const AmbientField& x,
                             int panels = kDefaultCurvePanels);
/// The curvature term alone, -int (k . X) |gamma'| dt with k the curvature
/// vector; defined at straight points too.
double dlength_interior(const ParamCurve& curve, const AmbientField& x,
                        int panels = kDefaultCurvePanels);

// Area ----------------------------------------------------------------------

inline constexpr int kAreaPanelsU = 16;
inline constexpr int kAreaPanelsV = 32;

double surface_area(const ParamSurface& surf, int panels_u = kAreaPanelsU,
                    int panels_v = kAreaPanelsV);

/// int int H (X . N) |phi_u x phi_v| du dv plus the flux of X through each
/// boundary side along the outward conormal.
double analytic_darea(const ParamSurface& surf, const AmbientField& x,
                      int panels_u = kAreaPanelsU, int panels_v = kAreaPanelsV);
double darea_interior(const ParamSurface& surf, const AmbientField& x,
                      int panels_u = kAreaPanelsU, int panels_v = kAreaPanelsV);

// Elastic energy -------------------------------------------------------------

inline constexpr double kArcLengthTol = 1e-8;

/// Throws NotArcLength unless ||gamma'| - 1| <= kArcLengthTol on a 512-point grid.
void require_arc_length(const ParamCurve& curve);

/// int_0^L kappa^2 ds for arc-length curves.
double elastic_energy(const ParamCurve& curve, int panels = kDefaultCurvePanels);
/// int kappa^2 |gamma'| dt for any regular parametrization, with
/// kappa = |gamma' x gamma''| / |gamma'|^3.
double bending_energy(const ParamCurve& curve, int panels = kDefaultCurvePanels);

/// First variation of the bending energy of a planar curve: arc-length input
/// only (NotArcLength otherwise).
double analytic_delastic(const ParamCurve& curve, const AmbientField& x,
                         int panels = kDefaultCurvePanels);
/// The same formula evaluated through the chain rule for any parametrization.
double delastic_general(const ParamCurve& curve, const AmbientField& x,
                        int panels = kDefaultCurvePanels);
double delastic_interior(const ParamCurve& curve, const AmbientField& x,
                         int panels = kDefaultCurvePanels);

// Built-in functionals ----------------------------------------------------------

ShapeFunctional length_functional(int panels = kDefaultCurvePanels);
ShapeFunctional area_functional(int panels_u = kAreaPanelsU,
                                int panels_v = kAreaPanelsV);
/// Evaluates bending_energy (flowed curves are not arc-length); the analytic
/// derivative is analytic_delastic.
ShapeFunctional elastic_functional(int panels = kDefaultCurvePanels);

// Cracks ---------------------------------------------------------------------

/**
 * Functional of the cracked set Omega = Omega_tilde minus Sigma, written as a
 * functional of the crack curve Sigma. Omega_tilde is a ball (a disk for
 * planar cracks); probe fields must be supported inside it, so that
 * Omega_tilde itself does not move.
 */
struct CrackFunctional {
  ShapeFunctional functional;
  Ball domain;
  ParamCurve crack;
  double clearance = 0.0;            // dist(Sigma, frontier of Omega_tilde)
  double default_probe_radius = 0.0;  // min(0.1 L, 0.5 clearance)

  /// SupportViolation unless the support of x lies in the domain.
  void check_probe(const AmbientField& x) const;
};

/// CrackNotInterior if Sigma is not strictly inside the domain.
CrackFunctional crack_functional(const Ball& domain, const ParamCurve& crack,
                                 const ShapeFunctional& inner);

}  // namespace shapecalc
