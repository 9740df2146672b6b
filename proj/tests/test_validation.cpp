#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "oracles.hpp"
#include "shapecalc/shapes.hpp"
#include "shapecalc/validation.hpp"

#include <cmath>

using namespace shapecalc;
using doctest::Approx;

namespace {

const Manifold kCircle = shapes::circle(1.0);
const Manifold kSegment = shapes::segment(Vec(0, 0, 0), Vec(1, 0, 0), 2);

}  // namespace

TEST_CASE("suite result bookkeeping") {
  StructureSuiteResult r;
  CHECK(r.pass());
  CHECK(r.worst_ratio() == 0.0);
  r.cases.push_back({"a", 1.0, 4.0, true});
  r.cases.push_back({"b", 3.0, 2.0, false});
  CHECK_FALSE(r.pass());
  CHECK(r.worst_ratio() == Approx(1.5));
}

TEST_CASE("tangential nullity and its negative control") {
  const FDConfig cfg;
  const auto fields = modulated_rotation_fields(2, 2, 3);
  for (const auto& f : fields) CHECK(check_tangency(kCircle, f, 64).tangential(kTangencyTol));
  const StructureSuiteResult ok =
      tangential_nullity_suite(length_functional(), kCircle, fields, cfg);
  CHECK(ok.pass());
  CHECK(ok.cases.size() == 2);
  const StructureSuiteResult bad =
      tangential_nullity_suite(length_functional(), kCircle, {radial_field(2)}, cfg);
  CHECK_FALSE(bad.pass());
  // Translation along a segment is tangent to M but not to its boundary.
  const StructureSuiteResult slide = tangential_nullity_suite(
      length_functional(256), kSegment, {constant_field(Vec(1, 0, 0), 2)}, cfg);
  CHECK_FALSE(slide.pass());
}

TEST_CASE("generators are deterministic in the seed") {
  const auto a = random_catalog_fields(kSegment, 6, 9);
  const auto b = random_catalog_fields(kSegment, 6, 9);
  const auto c = random_catalog_fields(kSegment, 6, 10);
  REQUIRE(a.size() == 6);
  for (size_t i = 0; i < a.size(); ++i) CHECK(a[i].name() == b[i].name());
  CHECK(a[0].name() != c[0].name());
  const auto t = chart_tangential_fields(kSegment, 2, 4);
  for (const auto& f : t) CHECK(check_tangency(kSegment, f, 64).tangential(kTangencyTol));
}

TEST_CASE("locality: pairs agreeing on M, and the on-manifold negative control") {
  const FDConfig cfg;
  Mat a;
  a << 0.3, 0.5, 0, -0.2, 0.1, 0, 0, 0, 0;
  const AmbientField x = linear_field(a, 2);
  const auto pairs = standard_locality_pairs(kCircle, x);
  CHECK(pairs.size() == 5);
  const StructureSuiteResult ok = locality_suite(length_functional(), kCircle, pairs, cfg);
  CHECK(ok.pass());
  const StructureSuiteResult neg =
      locality_suite(length_functional(), kCircle, {on_manifold_pair(kCircle, x)}, cfg);
  CHECK_FALSE(neg.pass());
}

TEST_CASE("normal dependence on closed and open curves") {
  FDConfig cfg;
  cfg.t0 = 1e-3;
  const ShapeFunctional j = length_functional(256);
  // Boundaryless: fd(X) = fd(X^perp), no nu part.
  const DecompositionCase c =
      decompose_derivative(j, kCircle, constant_field(Vec(1, 0, 0), 2), cfg);
  CHECK(c.fd_nu == 0.0);
  CHECK(c.residual <= 1e-6 * c.scale);
  CHECK(std::abs(c.fd_tangential) <= 1e-6 * c.scale);
  // Straight segment: kappa = 0, so only the boundary term contributes.
  const DecompositionCase s =
      decompose_derivative(j, kSegment, linear_field(Mat::Identity(), 2), cfg);
  CHECK(std::abs(s.fd_perp) <= 1e-6);
  CHECK(s.fd_nu == Approx(oracles::segment_dlength_identity(1.0)).epsilon(1e-6));
  CHECK(s.residual <= 1e-6 * s.scale);
}

TEST_CASE("crack coefficients on a straight crack") {
  const CrackFunctional crack = crack_functional(
      Ball{Vec::Zero(), 3.0}, shapes::segment(Vec(0, 0, 0), Vec(1, 0, 0), 2),
      length_functional(256));
  CrackProbeOptions opts;
  opts.probe_radius = 0.1;
  const CrackCoefficients c = extract_crack_coefficients(crack, opts, FDConfig{});
  CHECK(c.alpha1 == Approx(1.0).epsilon(1e-5));
  CHECK(c.alpha2 == Approx(1.0).epsilon(1e-5));
  REQUIRE(c.stations.size() == 3);
  for (const auto& st : c.stations) {
    REQUIRE(st.probe.size() == 1);
    CHECK(std::abs(st.probe[0]) <= 1e-8);  // kappa = 0
    CHECK(std::abs(st.density[0]) <= 1e-12);
  }
}

TEST_CASE("crack probe preconditions") {
  const ParamCurve seg = shapes::segment(Vec(0, 0, 0), Vec(1, 0, 0), 2);
  const CrackFunctional crack =
      crack_functional(Ball{Vec::Zero(), 3.0}, seg, length_functional());
  CrackProbeOptions big;
  big.probe_radius = 0.6;
  CHECK_THROWS_AS(extract_crack_coefficients(crack, big, FDConfig{}), ProbeOverlap);
  CrackProbeOptions crowded;
  crowded.probe_radius = 0.2;
  crowded.stations = 9;
  CHECK_THROWS_AS(extract_crack_coefficients(crack, crowded, FDConfig{}), ProbeOverlap);
  CrackProbeOptions wide;
  wide.probe_radius = 2.5;
  CHECK_THROWS_AS(extract_crack_coefficients(crack, wide, FDConfig{}), CrackNotInterior);
  const CrackFunctional loop =
      crack_functional(Ball{Vec::Zero(), 3.0}, shapes::circle(1.0), length_functional());
  CHECK_THROWS_AS(extract_crack_coefficients(loop, CrackProbeOptions{}, FDConfig{}), NoBoundary);
}
