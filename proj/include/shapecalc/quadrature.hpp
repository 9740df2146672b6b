#pragma once

#include <array>

namespace shapecalc::quadrature {

// 5-point Gauss-Legendre rule on [-1, 1].
inline constexpr std::array<double, 5> kNodes = {
    -0.906179845938663992797626878299, -0.538469310105683091036314420700, 0.0,
    0.538469310105683091036314420700, 0.906179845938663992797626878299};
inline constexpr std::array<double, 5> kWeights = {
    0.236926885056189087514264040720, 0.478628670499366468041291514836,
    0.568888888888888888888888888889, 0.478628670499366468041291514836,
    0.236926885056189087514264040720};

/// Composite 5-point Gauss-Legendre over [lo, hi] with `panels` equal panels.
template <class F>
double gauss_legendre(F&& f, double lo, double hi, int panels) {
  const double width = (hi - lo) / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = lo + (p + 0.5) * width;
    double panel = 0.0;
    for (int k = 0; k < 5; ++k) {
      panel += kWeights[k] * f(mid + 0.5 * width * kNodes[k]);
    }
    sum += 0.5 * width * panel;
  }
  return sum;
}

/// Tensor-product composite rule over [u0, u1] x [v0, v1].
template <class F>
double gauss_legendre_2d(F&& f, double u0, double u1, int panels_u, double v0,
                         double v1, int panels_v) {
  const double wu = (u1 - u0) / panels_u;
  const double wv = (v1 - v0) / panels_v;
  double sum = 0.0;
  for (int pu = 0; pu < panels_u; ++pu) {
    const double mu = u0 + (pu + 0.5) * wu;
    for (int pv = 0; pv < panels_v; ++pv) {
      const double mv = v0 + (pv + 0.5) * wv;
      double cell = 0.0;
      for (int i = 0; i < 5; ++i) {
        const double u = mu + 0.5 * wu * kNodes[i];
        for (int j = 0; j < 5; ++j) {
          cell += kWeights[i] * kWeights[j] * f(u, mv + 0.5 * wv * kNodes[j]);
        }
      }
      sum += 0.25 * wu * wv * cell;
    }
  }
  return sum;
}

}  // namespace shapecalc::quadrature
