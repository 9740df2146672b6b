#pragma once

// Independent reference values for the test suites. Every expected number is
// derived here from closed-form flows or plain quadrature written without the
// library, so the tests never compare the library against itself.

#include <cmath>
#include <functional>
#include <numbers>

namespace oracles {

inline constexpr double pi = std::numbers::pi;

// Closed-form flows ------------------------------------------------------------

// Unit radial field moves every point of a circle of radius r outwards at unit
// speed: L(t) = 2 pi (r + t).
inline double circle_length_radial(double r, double t) { return 2.0 * pi * (r + t); }
inline double circle_dlength_radial() { return 2.0 * pi; }

// X(x) = x integrates to x e^t, so a segment of length l has length l e^t.
inline double segment_length_identity(double l, double t) { return l * std::exp(t); }
inline double segment_dlength_identity(double l) { return l; }

// Cylinder of radius r and height h.
// Cylindrical radial field: radius r + t, area 2 pi (r + t) h.
inline double cylinder_area_radial(double r, double h, double t) {
  return 2.0 * pi * (r + t) * h;
}
inline double cylinder_darea_radial(double h) { return 2.0 * pi * h; }
// Axial stretch z e3 (z from 0 to h): height h e^t, area 2 pi r h e^t.
inline double cylinder_area_stretch(double r, double h, double t) {
  return 2.0 * pi * r * h * std::exp(t);
}
inline double cylinder_darea_stretch(double r, double h) { return 2.0 * pi * r * h; }

// Elastic energy of a circle of radius r: kappa = 1/r over length 2 pi r.
inline double circle_elastic(double r) { return 2.0 * pi / r; }
// Under the unit radial field r(t) = r + t.
inline double circle_delastic_radial(double r) { return -2.0 * pi / (r * r); }

// Exact planar rotation by angle t about the origin.
inline void rotate(double x, double y, double t, double& ox, double& oy) {
  ox = std::cos(t) * x - std::sin(t) * y;
  oy = std::sin(t) * x + std::cos(t) * y;
}

// Plain quadrature ---------------------------------------------------------------

// Composite Simpson rule with n (even) intervals.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

// Standard bump exp(1 - 1/(1 - s^2)) on |s| < 1.
inline double bump(double s) {
  return std::abs(s) < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - s * s)) : 0.0;
}

// Length derivative density on a circular arc of radius R centred at the
// origin and traversed counter-clockwise, against a field that is a bump of
// radius rho around the arc point at angle theta0 times a unit vector
// (nx, ny): dL = -int kappa (X . N) ds with kappa = 1/R and N the inward
// normal. Integrated over the bump support in the angle.
inline double arc_bump_density(double R, double theta0, double rho, double nx, double ny) {
  const double cx = R * std::cos(theta0), cy = R * std::sin(theta0);
  const double half = 2.0 * std::asin(std::min(1.0, rho / (2.0 * R)));
  auto integrand = [&](double th) {
    const double px = R * std::cos(th), py = R * std::sin(th);
    const double d = std::hypot(px - cx, py - cy);
    const double b = bump(d / rho);
    const double xn = -(nx * std::cos(th) + ny * std::sin(th));  // N = -(cos, sin)
    return -(1.0 / R) * b * xn * R;
  };
  return simpson(integrand, theta0 - half, theta0 + half, 4000);
}

}  // namespace oracles
