#pragma once

#include "shapecalc/flow.hpp"
#include "shapecalc/functionals.hpp"

#include <optional>
#include <string>
#include <vector>

namespace shapecalc {

/// Halving schedule t_k = t0 / 2^k, k = 0 .. levels-1. Each flowed shape is
/// integrated with `flow` (its t_final is overwritten per level).
struct FDConfig {
  double t0 = 1e-2;
  int levels = 5;
  bool richardson = true;
  FlowConfig flow{0.0, 1, 0.01};

  void validate() const;
};

struct FDSeriesPoint {
  double t = 0.0;
  double quotient = 0.0;
  /// Richardson value 2 q(t) - q(2t); absent at the first level.
  std::optional<double> extrapolant;
};

struct FDResult {
  double value = 0.0;
  double error_estimate = 0.0;
  double base_value = 0.0;  // J(M)
  std::vector<FDSeriesPoint> series;
};

/// One-sided difference quotients (J(Phi_t M) - J(M)) / t on the halving
/// schedule, extrapolated once assuming q(t) = dJ + c t + O(t^2).
/// Throws NoConvergence when successive extrapolants stop contracting above
/// the round-off level.
FDResult eulerian_fd(const ShapeFunctional& j, const Manifold& m,
                     const AmbientField& x, const FDConfig& cfg = {});

struct Tolerances {
  double rel = 1e-5;
  double abs = 1e-8;
  double nullity = 1e-7;
  double locality = 1e-6;
  double decomposition = 1e-6;
  double crack = 1e-5;

  void validate() const;
};

struct DerivativeReport {
  std::string functional;
  std::string manifold;
  std::string field;
  double fd_value = 0.0;
  double fd_error_estimate = 0.0;
  std::optional<double> analytic_value;
  double abs_diff = 0.0;
  double rel_diff = 0.0;
  bool verdict = false;
  std::vector<FDSeriesPoint> series;
};

/// Fills the difference columns and the verdict: pass iff rel_diff <= rel or
/// abs_diff <= abs. Without an analytic value the verdict is false.
DerivativeReport make_report(std::string functional, std::string manifold,
                             std::string field, const FDResult& fd,
                             std::optional<double> analytic, const Tolerances& tol);

/// FD oracle against the closed form; requires j.analytic_derivative.
DerivativeReport compare(const ShapeFunctional& j, const Manifold& m,
                         const AmbientField& x, const FDConfig& cfg = {},
                         const Tolerances& tol = {});

}  // namespace shapecalc
