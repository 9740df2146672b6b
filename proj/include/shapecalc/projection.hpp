#pragma once

#include "shapecalc/geometry.hpp"

#include <vector>

namespace shapecalc {

/**
 * Nearest-point problem on a parametric manifold: coarse sampling of seed
 * parameters followed by Newton refinement of the first-order condition
 * (phi(w) - x) . d phi(w) = 0.
 *
 * In `clamped` mode the parameter stays in the chart domain, so the result is
 * the distance to the point set M. In `extended` mode open parameter
 * directions are continued analytically by `margin` (a fraction of the
 * range) on each side, which keeps the foot-point map smooth near dM.
 */
class ManifoldProjector {
public:
  enum class Mode { clamped, extended };

  struct Options {
    Mode mode = Mode::clamped;
    int seeds = 1024;       // total number of coarse candidates
    int max_iterations = 20;
    double tolerance = 1e-12;  // on the parameter update, relative to the range
    double margin = 0.25;
  };

  struct Result {
    Param param = Param::Zero();
    Vec point = Vec::Zero();
    double distance = 0.0;
  };

  ManifoldProjector(Manifold m, Options opts);

  Result project(const Vec& x) const;

  const Manifold& manifold() const { return m_; }
  const Options& options() const { return opts_; }

  /// Parameter window searched by the projector: [lo, hi] per direction.
  Param lower() const { return lo_; }
  Param upper() const { return hi_; }
  bool periodic(int dir) const { return periodic_[dir]; }

private:
  Result refine_curve(const Vec& x, double t0) const;
  Result refine_surface(const Vec& x, Param w0) const;
  Param admissible(Param w) const;

  Manifold m_;
  Options opts_;
  Param lo_, hi_;
  bool periodic_[2] = {false, false};
  std::vector<Param> seed_params_;
  std::vector<Vec> seed_points_;
};

/// dist(x, M) with 1024 coarse candidates and 20 Newton iterations (tol 1e-12).
double distance_to_manifold(const Manifold& m, const Vec& x);

}  // namespace shapecalc
