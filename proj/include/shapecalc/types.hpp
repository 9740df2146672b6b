#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace shapecalc {

// Points and vectors of R^2 are stored with z = 0; the owning object carries
// the ambient dimension.
using Vec = Eigen::Vector3d;
using Mat = Eigen::Matrix3d;

/// Parameter of a manifold chart: (t, unused) for curves, (u, v) for surfaces.
using Param = Eigen::Vector2d;

/// Ball in R^d; used for field supports and the hold-all domain.
struct Ball {
  Vec center = Vec::Zero();
  double radius = 0.0;

  bool contains(const Ball& other) const {
    return (other.center - center).norm() + other.radius <= radius;
  }
  bool contains(const Vec& p) const { return (p - center).norm() <= radius; }
};

/// Default hold-all domain D: all catalog fields are supported inside it.
inline Ball default_hold_all() { return Ball{Vec::Zero(), 10.0}; }

class ShapeError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

#define SHAPECALC_ERROR(Name)                                                  \
  class Name : public ShapeError {                                             \
  public:                                                                      \
    using ShapeError::ShapeError;                                              \
  }

SHAPECALC_ERROR(InvalidManifold);
SHAPECALC_ERROR(DegenerateFrame);
SHAPECALC_ERROR(DegenerateImmersion);
SHAPECALC_ERROR(IllConditioned);
SHAPECALC_ERROR(NoBoundary);
SHAPECALC_ERROR(SupportViolation);
SHAPECALC_ERROR(NonFinite);
SHAPECALC_ERROR(NoConvergence);
SHAPECALC_ERROR(NotArcLength);
SHAPECALC_ERROR(CrackNotInterior);
SHAPECALC_ERROR(ProbeOverlap);
SHAPECALC_ERROR(ConfigError);

#undef SHAPECALC_ERROR

}  // namespace shapecalc
