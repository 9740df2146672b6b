#pragma once

#include "shapecalc/geometry.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace shapecalc {

/// Value and Jacobian of a vector field at one point.
struct FieldJet {
  Vec value = Vec::Zero();
  Mat jacobian = Mat::Zero();
};

/**
 * Smooth vector field X : R^d -> R^d with compact support inside a ball of
 * the hold-all domain. Value-only evaluation and the (value, Jacobian) jet
 * are separate callables so that cheap point queries do not pay for dX.
 */
class AmbientField {
public:
  using ValueFn = std::function<Vec(const Vec&)>;
  using JetFn = std::function<FieldJet(const Vec&)>;

  AmbientField(int dim, ValueFn value, JetFn jet, Ball support,
               std::string name);

  int dim() const { return dim_; }
  const Ball& support() const { return support_; }
  const std::string& name() const { return name_; }

  Vec operator()(const Vec& x) const { return value_(x); }
  FieldJet jet(const Vec& x) const { return jet_(x); }
  Mat jacobian(const Vec& x) const { return jet_(x).jacobian; }

  AmbientField renamed(std::string name) const;

  friend AmbientField operator+(const AmbientField& x, const AmbientField& y);
  friend AmbientField operator*(double s, const AmbientField& x);

private:
  int dim_;
  ValueFn value_;
  JetFn jet_;
  Ball support_;
  std::string name_;
};

AmbientField operator-(const AmbientField& x, const AmbientField& y);

/// Scalar function with gradient, for modulating fields.
struct ScalarJet {
  double value = 0.0;
  Vec gradient = Vec::Zero();
};
using ScalarField = std::function<ScalarJet(const Vec&)>;

/// g(x) X(x); the support is that of X.
AmbientField modulate(const ScalarField& g, const AmbientField& x,
                      std::string name);

// Smooth cutoffs ------------------------------------------------------------

/// C-infinity step: 0 for s <= 0, 1 for s >= 1; returns value and derivative.
std::pair<double, double> smooth_step(double s);

/// 1 on [0, inner], smooth decay to 0 at `outer`; value and derivative.
std::pair<double, double> plateau(double r, double inner, double outer);

/// beta(s) = exp(1 - 1/(1 - s^2)) for |s| < 1, else 0; value and derivative.
std::pair<double, double> bump_profile(double s);

// Catalog fields -------------------------------------------------------------
//
// All catalog fields are multiplied by the plateau in |x| that equals 1 for
// |x| <= kFieldPlateauInner and vanishes beyond kFieldPlateauOuter.

inline constexpr double kFieldPlateauInner = 4.0;
inline constexpr double kFieldPlateauOuter = 5.0;

AmbientField zero_field(int dim);
AmbientField constant_field(const Vec& v, int dim);
/// x/|x| for d = 2 (or d = 3 without axis); for d = 3 with an axis, the
/// cylindrical radial direction away from that axis. Smoothly switched off
/// within 0.25 of the origin/axis.
AmbientField radial_field(int dim, std::optional<Vec> axis = std::nullopt);
/// (-y, x) for d = 2; axis x x for d = 3.
AmbientField rotation_field(int dim, const Vec& axis = Vec::UnitZ());
AmbientField linear_field(const Mat& a, int dim);

/// X(p) = beta(|p - center| / radius) direction.
AmbientField bump_field(const Vec& center, double radius, const Vec& direction,
                        int dim, const Ball& hold_all = default_hold_all());
/// X(p) = beta(|p - center| / radius) direction(p).
AmbientField bump_field(const Vec& center, double radius,
                        const AmbientField& direction,
                        const Ball& hold_all = default_hold_all());

/// Sampled consistency of a field: largest |X| and |dX| at exterior points of
/// its support, and the largest relative Jacobian error against central
/// differences at interior points.
struct FieldConsistency {
  double max_exterior = 0.0;
  double max_jacobian_error = 0.0;
};
FieldConsistency check_field(const AmbientField& x, int exterior_points = 64,
                             int interior_points = 32);

// Splitting along a manifold --------------------------------------------------

/// X_p minus its orthogonal projection onto T_p M.
Vec project_normal(const Manifold& m, const Param& w, const Vec& xp);

/// Parameter-space cutoff width for extending nu into M, as a fraction of
/// each parameter range.
inline constexpr double kConormalCutoff = 0.1;

/// Extension of the outward conormal nu from dM into M: nu at dM, tangent to
/// M everywhere, and zero farther than the cutoff width from dM.
Vec extended_conormal(const Manifold& m, const Param& w,
                      double cutoff = kConormalCutoff);

struct SplitSample {
  Param param = Param::Zero();
  Vec point = Vec::Zero();
  Vec x = Vec::Zero();
  Vec perp = Vec::Zero();
  Vec tangential = Vec::Zero();
  Vec nu_part = Vec::Zero();
  bool on_boundary = false;
  Vec nu = Vec::Zero();  // outward conormal at boundary samples
};

/// Sampled decomposition X = X^perp + X^t + X^nu along M.
struct FieldSplit {
  std::vector<SplitSample> samples;
};

/// The three parts at one parameter, from the field value there.
struct PartValues {
  Vec perp, tangential, nu_part;
};
PartValues split_at(const Manifold& m, const Param& w, const Vec& xp,
                    double cutoff = kConormalCutoff);

FieldSplit split_field(const Manifold& m, const AmbientField& x, int n_samples);

struct TangencyReport {
  double max_normal_residual = 0.0;
  double max_boundary_residual = 0.0;
  bool tangential(double tol) const {
    return max_normal_residual <= tol && max_boundary_residual <= tol;
  }
};
TangencyReport check_tangency(const Manifold& m, const AmbientField& x,
                              int n_samples);

/// Ambient realization of a field given along M: V(w) at the foot point w of
/// x, extended constantly along normals inside a tube around M (the chart
/// continued past dM) and cut off smoothly outside it.
using AlongManifold = std::function<Vec(const Param&)>;
AmbientField realize_along(const Manifold& m, AlongManifold values, std::string name);

struct SplitFields {
  AmbientField perp;
  AmbientField tangential;
  AmbientField nu_part;
};
/// Ambient realizations of X^perp, X^t and X^nu.
SplitFields realize_split(const Manifold& m, const AmbientField& x);

/// chi(dist(x, M)) X(x): equal to X within `inner` of M, zero beyond `outer`.
AmbientField tube_cutoff(const Manifold& m, const AmbientField& x, double inner,
                         double outer);

/// chi(dist) (x - pi(x)) scaled by `scale`: vanishes on M with nonzero
/// normal derivative.
AmbientField normal_offset_field(const Manifold& m, double scale, double outer);

}  // namespace shapecalc
