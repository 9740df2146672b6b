#pragma once

// Finite-difference stencils shared by the geometry, flow and field code.
// Central stencils are used whenever the stencil fits into [lo, hi] (or the
// direction is periodic); otherwise a one-sided stencil of the same width.

#include <type_traits>

namespace shapecalc::detail {

/// First derivative, fourth order: central 5-point (equivalently one
/// Richardson step on the 3-point central difference) or one-sided 5-point.
template <class F>
auto diff1(F&& f, double t, double h, double lo, double hi, bool periodic)
    -> std::decay_t<decltype(f(t))> {
  if (periodic || (t - 2 * h >= lo && t + 2 * h <= hi)) {
    return (8.0 * (f(t + h) - f(t - h)) - (f(t + 2 * h) - f(t - 2 * h))) /
           (12.0 * h);
  }
  const double s = (t - 2 * h < lo) ? h : -h;
  return (-25.0 * f(t) + 48.0 * f(t + s) - 36.0 * f(t + 2 * s) +
          16.0 * f(t + 3 * s) - 3.0 * f(t + 4 * s)) /
         (12.0 * s);
}

/// Second derivative: central 5-point or one-sided 5-point (third order).
template <class F>
auto diff2(F&& f, double t, double h, double lo, double hi, bool periodic)
    -> std::decay_t<decltype(f(t))> {
  if (periodic || (t - 2 * h >= lo && t + 2 * h <= hi)) {
    return (-(f(t + 2 * h) + f(t - 2 * h)) + 16.0 * (f(t + h) + f(t - h)) -
            30.0 * f(t)) /
           (12.0 * h * h);
  }
  const double s = (t - 2 * h < lo) ? h : -h;
  return (35.0 * f(t) - 104.0 * f(t + s) + 114.0 * f(t + 2 * s) -
          56.0 * f(t + 3 * s) + 11.0 * f(t + 4 * s)) /
         (12.0 * h * h);
}

/// Second-order first derivative (3-point central or one-sided).
template <class F>
auto diff1_o2(F&& f, double t, double h, double lo, double hi, bool periodic)
    -> std::decay_t<decltype(f(t))> {
  if (periodic || (t - h >= lo && t + h <= hi)) {
    return (f(t + h) - f(t - h)) / (2.0 * h);
  }
  const double s = (t - h < lo) ? h : -h;
  return (-3.0 * f(t) + 4.0 * f(t + s) - f(t + 2 * s)) / (2.0 * s);
}

}  // namespace shapecalc::detail
