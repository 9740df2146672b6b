#pragma once

#include "shapecalc/derivative.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace shapecalc {

struct SuiteCase {
  std::string description;
  double measured = 0.0;
  double bound = 0.0;
  bool pass = false;
};

struct StructureSuiteResult {
  std::string suite;
  std::vector<SuiteCase> cases;

  bool pass() const;
  /// Largest measured / bound over the cases (0 when empty).
  double worst_ratio() const;
};

// Tangential nullity -------------------------------------------------------------

inline constexpr double kTangencyTol = 1e-12;

/// For each field: |fd| <= rel_bound (1 + |J(M)|). A case passes only when the
/// field is also tangential (check_tangency residuals <= kTangencyTol), so
/// non-tangential fields are reported as failures.
StructureSuiteResult tangential_nullity_suite(const ShapeFunctional& j,
                                              const Manifold& m,
                                              const std::vector<AmbientField>& fields,
                                              const FDConfig& cfg,
                                              double rel_bound = 1e-7);

/// g(x) (axis x x) with g = 1 + sum of random Gaussians. Tangent to every
/// circle centred on the axis, hence to surfaces of revolution about it and
/// to circles about the origin in the plane.
std::vector<AmbientField> modulated_rotation_fields(int dim, int count,
                                                    std::uint64_t seed,
                                                    const Vec& axis = Vec::UnitZ());

/// Random tangent fields built in the chart: sum_k c_k(w) d phi / d w_k with
/// c_k vanishing on the boundary sides transverse to w_k, realized in a tube
/// around M. Works for any manifold.
std::vector<AmbientField> chart_tangential_fields(const Manifold& m, int count,
                                                  std::uint64_t seed);

// Locality ------------------------------------------------------------------------

struct LocalityPair {
  std::string description;
  AmbientField x;
  AmbientField y;
  /// Off-manifold points where x and y are known to differ.
  std::vector<Vec> witnesses;
};

/// Pairs that agree on M with x: x + bump away from M (twice), x cut off in a
/// tube around M, x + a normal offset field and x + a field vanishing to
/// second order on M.
std::vector<LocalityPair> standard_locality_pairs(const Manifold& m,
                                                  const AmbientField& x);

/// The negative control: x + a bump centred on M.
LocalityPair on_manifold_pair(const Manifold& m, const AmbientField& x);

/// |fd(x) - fd(y)| <= rel_bound (1 + |fd(x)|). A case also records whether the
/// pair agrees on M (to 1e-12 at sampled points) and differs at one of 16
/// off-manifold probes or a witness; the case passes only when both hold.
StructureSuiteResult locality_suite(const ShapeFunctional& j, const Manifold& m,
                                    const std::vector<LocalityPair>& pairs,
                                    const FDConfig& cfg, double rel_bound = 1e-6);

// Normal dependence ----------------------------------------------------------------

struct DecompositionCase {
  std::string field;
  double fd_total = 0.0;
  double fd_perp = 0.0;
  double fd_nu = 0.0;
  double fd_tangential = 0.0;
  double residual = 0.0;  // |fd_total - fd_perp - fd_nu|
  double scale = 1.0;     // max(1, |fd_total|, |fd_perp|, |fd_nu|)
};

DecompositionCase decompose_derivative(const ShapeFunctional& j, const Manifold& m,
                                       const AmbientField& x, const FDConfig& cfg);

/// Two cases per field: the additivity residual and the tangential part, each
/// against rel_bound * scale.
StructureSuiteResult normal_dependence_suite(const ShapeFunctional& j,
                                             const Manifold& m,
                                             const std::vector<AmbientField>& fields,
                                             const FDConfig& cfg,
                                             double rel_bound = 1e-6);

/// Random catalog fields (linear, constant, bumps near M, rotation and sums)
/// for the given manifold; deterministic in the seed.
std::vector<AmbientField> random_catalog_fields(const Manifold& m, int count,
                                                std::uint64_t seed);

// Cracks -------------------------------------------------------------------------

struct CrackStation {
  double param = 0.0;
  Vec point = Vec::Zero();
  std::vector<Vec> frame;        // orthonormal normal frame at the station
  std::vector<double> probe;     // FD derivative under a normal bump per frame vector
  std::vector<double> density;   // quadrature of the interior density against it
};

struct CrackCoefficients {
  double probe_radius = 0.0;
  double alpha1 = 0.0;  // start point A
  double alpha2 = 0.0;  // end point B
  std::vector<CrackStation> stations;
};

/// Endpoint coefficients from bumps at A and B along the outward conormal,
/// normalized by (X . nu) at the endpoint, and interior probe values at
/// `stations` equally spaced interior parameters. The FD step scales with the
/// probe radius (t0 = fd_scale * radius). The density column is the interior
/// pairing of the functional applied to the probe, NaN when it has none.
struct CrackProbeOptions {
  double probe_radius = 0.0;  // <= 0 selects the default radius
  int stations = 3;
  double fd_scale = 1e-2;
};

CrackCoefficients extract_crack_coefficients(const CrackFunctional& crack,
                                             const CrackProbeOptions& opts,
                                             const FDConfig& cfg);

}  // namespace shapecalc
