#pragma once

#include "shapecalc/types.hpp"

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace shapecalc {

/// How much of the construction-time invariant checking to run.
/// `trusted` is meant for images of already validated manifolds under a
/// diffeomorphism (for example flowed shapes), where the O(N^2) embedding
/// check would dominate the cost of a shape derivative evaluation.
enum class Validate { full, trusted };

/**
 * Embedded C^2 curve gamma : [a, b] -> R^d, d in {2, 3}, given by analytic
 * callables for gamma, gamma' and gamma''.
 *
 * The callables of open curves must be defined on a small neighbourhood of
 * [a, b]; closed curves are evaluated with the parameter wrapped into [a, b].
 */
class ParamCurve {
public:
  using Fn = std::function<Vec(double)>;

  ParamCurve(int dim, double a, double b, Fn gamma, Fn dgamma, Fn ddgamma,
             bool closed, std::string name = {},
             Validate validate = Validate::full);

  int dim() const { return dim_; }
  double a() const { return a_; }
  double b() const { return b_; }
  bool closed() const { return closed_; }
  const std::string& name() const { return name_; }

  Vec point(double t) const { return gamma_(wrap(t)); }
  Vec velocity(double t) const { return dgamma_(wrap(t)); }
  Vec acceleration(double t) const { return ddgamma_(wrap(t)); }
  double speed(double t) const { return velocity(t).norm(); }

  /// Maps t into [a, b) for closed curves; identity for open curves.
  double wrap(double t) const;

  /// The same point set traversed backwards, t -> a + b - t.
  ParamCurve reversed() const;

  /// Image under an arbitrary callable transformation, with no validation.
  ParamCurve with_callables(Fn gamma, Fn dgamma, Fn ddgamma,
                            std::string name) const;

private:
  void check_invariants() const;

  int dim_;
  double a_, b_;
  Fn gamma_, dgamma_, ddgamma_;
  bool closed_;
  std::string name_;
};

/// Point and first partials of a surface chart at one parameter.
struct SurfaceJet {
  Vec p, pu, pv;
};

/**
 * Immersed C^2 surface phi : [a,b] x [c,d] -> R^3. Cylinder-like surfaces are
 * periodic in v (phi, phi_v, phi_vv agree on v = c and v = d); the boundary
 * then consists of the two curves u = a and u = b. Non-periodic patches also
 * have the sides v = c and v = d as boundary.
 */
class ParamSurface {
public:
  using Fn = std::function<Vec(double, double)>;
  using JetFn = std::function<SurfaceJet(double, double)>;

  ParamSurface(double a, double b, double c, double d, Fn phi, Fn phi_u,
               Fn phi_v, Fn phi_vv, bool periodic_v, std::string name = {},
               Validate validate = Validate::full, JetFn jet = {});

  double a() const { return a_; }
  double b() const { return b_; }
  double c() const { return c_; }
  double d() const { return d_; }
  bool periodic_v() const { return periodic_v_; }
  const std::string& name() const { return name_; }
  double diameter() const;

  Vec point(double u, double v) const { return phi_(u, wrap_v(v)); }
  Vec du(double u, double v) const { return phi_u_(u, wrap_v(v)); }
  Vec dv(double u, double v) const { return phi_v_(u, wrap_v(v)); }
  Vec dvv(double u, double v) const { return phi_vv_(u, wrap_v(v)); }
  SurfaceJet jet(double u, double v) const;

  double wrap_v(double v) const;

  ParamSurface with_callables(Fn phi, Fn phi_u, Fn phi_v, Fn phi_vv,
                              JetFn jet, std::string name) const;

private:
  void check_invariants() const;

  double a_, b_, c_, d_;
  Fn phi_, phi_u_, phi_v_, phi_vv_;
  JetFn jet_;
  bool periodic_v_;
  std::string name_;
};

using Manifold = std::variant<ParamCurve, ParamSurface>;

/// Frenet data at one curve parameter. For d = 2, N = R T (counter-clockwise
/// rotation) and kappa is signed; for d = 3, N = T'/|T'| and kappa >= 0.
struct FrenetFrame {
  int dim = 2;
  Vec T = Vec::Zero();
  Vec N = Vec::Zero();
  Vec B = Vec::Zero();  // zero for d = 2
  double speed = 0.0;
  double kappa = 0.0;
};

FrenetFrame curve_frame(const ParamCurve& curve, double t);

/// Curvature and its first two arc-length derivatives.
struct CurvatureJet {
  double kappa = 0.0;
  double dkappa = 0.0;
  double ddkappa = 0.0;
};

/// kappa', kappa'' from finite differences of kappa in the curve parameter
/// (step h, default 1e-4 (b - a)), one Richardson step, converted to arc
/// length by the chain rule. Near the ends of open curves a one-sided
/// fifth-order stencil is used instead.
CurvatureJet curve_curvature_derivs(const ParamCurve& curve, double t,
                                    std::optional<double> h = std::nullopt);

/// Orthonormal basis of the normal space (T_p M)^perp along a curve: {R T}
/// for d = 2; the Frenet (N, B) for d = 3 where defined, otherwise a fixed
/// Gram-Schmidt completion of T.
std::vector<Vec> curve_normal_frame(const ParamCurve& curve, double t);

Vec surface_normal(const ParamSurface& surf, double u, double v);

/// Mean curvature as the trace of the Weingarten map, with dN obtained by
/// finite differences (step h, default 1e-5 diam(Q)) and projected onto
/// span{phi_u, phi_v} by least squares.
double surface_mean_curvature(const ParamSurface& surf, double u, double v,
                              std::optional<double> h = std::nullopt);

inline constexpr int kDefaultCurvePanels = 64;
inline constexpr int kDefaultSurfacePanels = 64;

double integrate_curve(const ParamCurve& curve,
                       const std::function<double(double)>& density,
                       int panels = kDefaultCurvePanels);

double integrate_surface(const ParamSurface& surf,
                         const std::function<double(double, double)>& density,
                         int panels_u = kDefaultSurfacePanels,
                         int panels_v = kDefaultSurfacePanels);

enum class CurveEnd { a, b };
enum class SurfaceSide { u_a, u_b, v_c, v_d };

/// Outward-pointing unit normal to the boundary: nu(a) = -T(a), nu(b) = T(b).
Vec boundary_outward_normal(const ParamCurve& curve, CurveEnd end);

/// Outward unit conormal along a boundary side; `s` is the free parameter
/// (v on the u-sides, u on the v-sides).
Vec boundary_outward_normal(const ParamSurface& surf, SurfaceSide side,
                            double s);

// Uniform access to curves and surfaces.

int ambient_dim(const Manifold& m);
int intrinsic_dim(const Manifold& m);
const std::string& manifold_name(const Manifold& m);
bool has_boundary(const Manifold& m);
Vec manifold_point(const Manifold& m, const Param& w);

/// Orthonormal basis of T_p M (one or two vectors).
std::vector<Vec> tangent_basis(const Manifold& m, const Param& w);

/// Rough extrinsic diameter from a coarse sample.
double manifold_diameter(const Manifold& m);

/// A sampled point of M. Boundary samples carry the outward conormal nu.
struct ManifoldSample {
  Param param = Param::Zero();
  Vec point = Vec::Zero();
  bool on_boundary = false;
  Vec nu = Vec::Zero();
};

/// n samples per parameter direction. Open curves include both ends; surface
/// grids include the boundary sides but never corners of non-periodic patches.
std::vector<ManifoldSample> sample_manifold(const Manifold& m, int n);

}  // namespace shapecalc
