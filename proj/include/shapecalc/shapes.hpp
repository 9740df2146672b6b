#pragma once

#include "shapecalc/geometry.hpp"

namespace shapecalc::shapes {

// Curves are arc-length parametrised wherever a closed form exists
// (circle, arc, segment); ellipse and helix use their angle parameter.

ParamCurve circle(double r, const Vec& center = Vec::Zero());
ParamCurve arc(double r, double angle0, double angle1,
               const Vec& center = Vec::Zero());
/// p0, p1 in R^2 (z = 0) or R^3; `dim` selects the ambient dimension.
ParamCurve segment(const Vec& p0, const Vec& p1, int dim = 2);
ParamCurve ellipse(double a, double b);
/// gamma(t) = (r cos t, r sin t, pitch t), t in [0, 2 pi turns].
ParamCurve helix(double r, double pitch, double turns);

/// phi(u, v) = (r cos v, r sin v, u) on [0, h] x [0, 2 pi].
ParamSurface cylinder(double r, double h);
/// phi(u, v) = r (sin u cos v, sin u sin v, cos u) on [theta0, theta1] x [0, 2 pi].
ParamSurface sphere_band(double r, double theta0, double theta1);
/// phi(u, v) = (u, v, 0) on [0, w] x [0, h]; not periodic.
ParamSurface plane(double w, double h);

}  // namespace shapecalc::shapes
