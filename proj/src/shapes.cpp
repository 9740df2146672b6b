#include "shapecalc/shapes.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace shapecalc::shapes {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string fmt_name(const std::string& kind,
                     std::initializer_list<std::pair<const char*, double>> args) {
  std::ostringstream os;
  os.precision(6);
  os << kind << '{';
  bool first = true;
  for (const auto& [key, value] : args) {
    if (!first) os << ',';
    os << key << '=' << value;
    first = false;
  }
  os << '}';
  return os.str();
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw InvalidManifold(msg);
}

}  // namespace

ParamCurve circle(double r, const Vec& center) {
  require(r > 0, "circle: radius must be positive");
  const Vec c(center.x(), center.y(), 0.0);
  return ParamCurve(
      2, 0.0, kTwoPi * r,
      [r, c](double s) { return Vec(c + r * Vec(std::cos(s / r), std::sin(s / r), 0.0)); },
      [r](double s) { return Vec(-std::sin(s / r), std::cos(s / r), 0.0); },
      [r](double s) { return Vec(Vec(-std::cos(s / r), -std::sin(s / r), 0.0) / r); },
      true, fmt_name("circle", {{"r", r}}));
}

ParamCurve arc(double r, double angle0, double angle1, const Vec& center) {
  require(r > 0, "arc: radius must be positive");
  require(angle1 > angle0 && angle1 - angle0 < kTwoPi,
          "arc: need angle0 < angle1 < angle0 + 2 pi");
  const Vec c(center.x(), center.y(), 0.0);
  const double a0 = angle0;
  return ParamCurve(
      2, 0.0, r * (angle1 - angle0),
      [r, c, a0](double s) {
        const double th = a0 + s / r;
        return Vec(c + r * Vec(std::cos(th), std::sin(th), 0.0));
      },
      [r, a0](double s) {
        const double th = a0 + s / r;
        return Vec(-std::sin(th), std::cos(th), 0.0);
      },
      [r, a0](double s) {
        const double th = a0 + s / r;
        return Vec(Vec(-std::cos(th), -std::sin(th), 0.0) / r);
      },
      false, fmt_name("arc", {{"r", r}, {"angle0", angle0}, {"angle1", angle1}}));
}

ParamCurve segment(const Vec& p0, const Vec& p1, int dim) {
  Vec q0 = p0, q1 = p1;
  if (dim == 2) q0.z() = q1.z() = 0.0;
  const double len = (q1 - q0).norm();
  require(len > 0, "segment: endpoints coincide");
  const Vec dir = (q1 - q0) / len;
  std::ostringstream os;
  os.precision(6);
  os << "segment{(" << q0.x() << ',' << q0.y();
  if (dim == 3) os << ',' << q0.z();
  os << ")-(" << q1.x() << ',' << q1.y();
  if (dim == 3) os << ',' << q1.z();
  os << ")}";
  return ParamCurve(
      dim, 0.0, len, [q0, dir](double s) { return Vec(q0 + s * dir); },
      [dir](double) { return dir; }, [](double) { return Vec(Vec::Zero()); },
      false, os.str());
}

ParamCurve ellipse(double a, double b) {
  require(a > 0 && b > 0, "ellipse: semi-axes must be positive");
  return ParamCurve(
      2, 0.0, kTwoPi,
      [a, b](double t) { return Vec(a * std::cos(t), b * std::sin(t), 0.0); },
      [a, b](double t) { return Vec(-a * std::sin(t), b * std::cos(t), 0.0); },
      [a, b](double t) { return Vec(-a * std::cos(t), -b * std::sin(t), 0.0); },
      true, fmt_name("ellipse", {{"a", a}, {"b", b}}));
}

ParamCurve helix(double r, double pitch, double turns) {
  require(r > 0 && turns > 0, "helix: need r > 0 and turns > 0");
  return ParamCurve(
      3, 0.0, kTwoPi * turns,
      [r, pitch](double t) { return Vec(r * std::cos(t), r * std::sin(t), pitch * t); },
      [r, pitch](double t) { return Vec(-r * std::sin(t), r * std::cos(t), pitch); },
      [r](double t) { return Vec(-r * std::cos(t), -r * std::sin(t), 0.0); },
      false, fmt_name("helix", {{"r", r}, {"pitch", pitch}, {"turns", turns}}));
}

ParamSurface cylinder(double r, double h) {
  require(r > 0 && h > 0, "cylinder: need r > 0 and h > 0");
  return ParamSurface(
      0.0, h, 0.0, kTwoPi,
      [r](double u, double v) { return Vec(r * std::cos(v), r * std::sin(v), u); },
      [](double, double) { return Vec(0.0, 0.0, 1.0); },
      [r](double, double v) { return Vec(-r * std::sin(v), r * std::cos(v), 0.0); },
      [r](double, double v) { return Vec(-r * std::cos(v), -r * std::sin(v), 0.0); },
      true, fmt_name("cylinder", {{"r", r}, {"h", h}}), Validate::full,
      [r](double u, double v) {
        const double cv = std::cos(v), sv = std::sin(v);
        return SurfaceJet{Vec(r * cv, r * sv, u), Vec(0.0, 0.0, 1.0),
                          Vec(-r * sv, r * cv, 0.0)};
      });
}

ParamSurface sphere_band(double r, double theta0, double theta1) {
  require(r > 0, "sphere_band: radius must be positive");
  require(0 < theta0 && theta0 < theta1 && theta1 < std::numbers::pi,
          "sphere_band: need 0 < theta0 < theta1 < pi");
  return ParamSurface(
      theta0, theta1, 0.0, kTwoPi,
      [r](double u, double v) {
        return Vec(r * std::sin(u) * std::cos(v), r * std::sin(u) * std::sin(v),
                   r * std::cos(u));
      },
      [r](double u, double v) {
        return Vec(r * std::cos(u) * std::cos(v), r * std::cos(u) * std::sin(v),
                   -r * std::sin(u));
      },
      [r](double u, double v) {
        return Vec(-r * std::sin(u) * std::sin(v), r * std::sin(u) * std::cos(v), 0.0);
      },
      [r](double u, double v) {
        return Vec(-r * std::sin(u) * std::cos(v), -r * std::sin(u) * std::sin(v), 0.0);
      },
      true, fmt_name("sphere_band", {{"r", r}, {"theta0", theta0}, {"theta1", theta1}}));
}

ParamSurface plane(double w, double h) {
  require(w > 0 && h > 0, "plane: need w > 0 and h > 0");
  return ParamSurface(
      0.0, w, 0.0, h, [](double u, double v) { return Vec(u, v, 0.0); },
      [](double, double) { return Vec(1.0, 0.0, 0.0); },
      [](double, double) { return Vec(0.0, 1.0, 0.0); },
      [](double, double) { return Vec(Vec::Zero()); }, false,
      fmt_name("plane", {{"w", w}, {"h", h}}));
}

}  // namespace shapecalc::shapes
