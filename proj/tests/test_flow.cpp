#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "oracles.hpp"
#include "shapecalc/flow.hpp"
#include "shapecalc/shapes.hpp"
#include "shapecalc/validation.hpp"

#include <cmath>
#include <limits>

using namespace shapecalc;
using doctest::Approx;

namespace {

double rotation_error(int steps) {
  FlowConfig cfg{1.0, steps, 0.0};
  const Vec p = flow_point(rotation_field(2), Vec(1.0, 0.5, 0.0), cfg);
  double ex = 0, ey = 0;
  oracles::rotate(1.0, 0.5, 1.0, ex, ey);
  return (p - Vec(ex, ey, 0.0)).norm();
}

}  // namespace

TEST_CASE("step count honours the step cap") {
  CHECK(FlowConfig{0.05, 1, 0.01}.steps() == 5);
  CHECK(FlowConfig{0.05, 8, 0.01}.steps() == 8);
  CHECK(FlowConfig{0.5, 3, 0.0}.steps() == 3);
  CHECK(FlowConfig{-0.03, 1, 0.01}.steps() == 3);
  CHECK_THROWS_AS(FlowConfig({0.1, 0, 0.01}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(FlowConfig({std::nan(""), 1, 0.01}).validate(), std::invalid_argument);
}

TEST_CASE("RK4 reproduces a rotation with fourth-order convergence") {
  CHECK(rotation_error(256) < 1e-10);
  for (int n : {8, 16, 32}) {
    const double ratio = rotation_error(n) / rotation_error(2 * n);
    CAPTURE(n);
    CHECK(ratio == Approx(16.0).epsilon(2.0 / 16.0));
  }
}

TEST_CASE("flow Jacobian matches differences of the flow map") {
  Mat a;
  a << 0.2, -0.5, 0.1, 0.4, 0.1, 0.0, -0.3, 0.2, 0.3;
  const AmbientField x = linear_field(a, 3) + bump_field(Vec(0.5, 0, 0), 1.0, Vec(0, 1, 1), 3);
  const FlowConfig cfg{0.3, 30, 0.0};
  const Vec x0(0.4, 0.2, -0.1);
  const FlowJet jet = flow_jet(x, x0, cfg);
  CHECK((jet.point - flow_point(x, x0, cfg)).norm() < 1e-14);
  const double h = 1e-6;
  for (int k = 0; k < 3; ++k) {
    const Vec e = Vec::Unit(k);
    const Vec fd = (flow_point(x, x0 + h * e, cfg) - flow_point(x, x0 - h * e, cfg)) / (2 * h);
    CHECK((jet.jacobian.col(k) - fd).norm() < 1e-8);
  }
}

TEST_CASE("non-finite fields are reported") {
  const AmbientField bad(
      2, [](const Vec&) { return Vec(std::numeric_limits<double>::quiet_NaN(), 0, 0); },
      [](const Vec&) {
        return FieldJet{Vec(std::numeric_limits<double>::quiet_NaN(), 0, 0), Mat::Zero()};
      },
      Ball{Vec::Zero(), 1.0}, "nan");
  CHECK_THROWS_AS(flow_point(bad, Vec(0.1, 0, 0), FlowConfig{0.1, 1, 0.01}), NonFinite);
}

TEST_CASE("flowed circle under the radial field is a larger circle") {
  const ParamCurve c = shapes::circle(1.0);
  const ParamCurve f = flow_manifold(radial_field(2), c, FlowConfig{0.1, 1, 0.01});
  CHECK(f.name().find("@flow") != std::string::npos);
  for (double t : {0.0, 1.0, 4.0}) {
    CHECK(f.point(t).norm() == Approx(1.1).epsilon(1e-9));
    // Velocity scales with the radius.
    CHECK(f.velocity(t).norm() == Approx(1.1).epsilon(1e-9));
    // Second derivative: centripetal, |gamma''| = 1.1.
    CHECK(f.acceleration(t).norm() == Approx(1.1).epsilon(1e-6));
  }
}

TEST_CASE("flowed cylinder under the axial stretch") {
  Mat a = Mat::Zero();
  a(2, 2) = 1.0;
  const ParamSurface s = shapes::cylinder(1.0, 2.0);
  const ParamSurface f = flow_manifold(linear_field(a, 3), s, FlowConfig{0.2, 1, 0.01});
  CHECK(f.point(2.0, 0.3).z() == Approx(2.0 * std::exp(0.2)).epsilon(1e-9));
  CHECK(f.du(1.0, 0.3).z() == Approx(std::exp(0.2)).epsilon(1e-9));
}

TEST_CASE("tangent flows keep the manifold invariant") {
  const FlowConfig cfg{0.5, 1, 0.01};
  const Manifold circle = shapes::circle(1.0);
  for (const AmbientField& x : modulated_rotation_fields(2, 2, 5)) {
    CHECK(invariance_residual(x, circle, cfg, 32) <= 1e-7);
  }
  const Manifold seg = shapes::segment(Vec(0, 0, 0), Vec(1, 0, 0), 2);
  for (const AmbientField& x : chart_tangential_fields(seg, 2, 6)) {
    CHECK(invariance_residual(x, seg, cfg, 32) <= 1e-7);
  }
  // A non-tangent field moves the circle off itself.
  CHECK(invariance_residual(radial_field(2), circle, cfg, 32) == Approx(0.5).epsilon(1e-6));
}
