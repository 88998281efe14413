#include "droplet/shape.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "droplet/errors.hpp"

namespace droplet {

AngularGrid::AngularGrid(int n_nodes) : n_(n_nodes) {
  if (n_nodes < 16 || n_nodes % 2 != 0) {
    throw ValidationError("angular grid needs an even node count >= 16, got " +
                          std::to_string(n_nodes));
  }
}

std::vector<double> AngularGrid::nodes() const {
  std::vector<double> t(static_cast<std::size_t>(n_));
  for (int j = 0; j < n_; ++j) t[j] = node(j);
  return t;
}

ShapeFunction::ShapeFunction(double base_radius, PeriodicField rho)
    : r_e_(base_radius), rho_(std::move(rho)) {
  if (!(r_e_ > 0.0) || !std::isfinite(r_e_)) {
    throw ValidationError("base radius must be positive and finite");
  }
  AngularGrid check(rho_.size());
  for (int j = 0; j < rho_.size(); ++j) {
    if (!(r_e_ + rho_[j] > 0.0)) {
      std::ostringstream msg;
      msg << "shape is not star-shaped about the origin: r_e + rho = " << r_e_ + rho_[j]
          << " at node " << j;
      throw ValidationError(msg.str());
    }
  }
}

ShapeFunction ShapeFunction::from_samples(double base_radius, std::vector<double> samples) {
  return ShapeFunction(base_radius, PeriodicField::from_samples(std::move(samples)));
}

ShapeFunction ShapeFunction::from_coeffs(double base_radius, FourierCoeffs coeffs) {
  return ShapeFunction(base_radius, PeriodicField::from_coeffs(std::move(coeffs)));
}

ShapeFunction ShapeFunction::circle(double base_radius, int n_nodes) {
  return ShapeFunction(base_radius, PeriodicField::zero(n_nodes));
}

Vec2 ShapeFunction::point(int j) const {
  const double t = kTwoPi * j / size();
  return radius(j) * Vec2(std::cos(t), std::sin(t));
}

double ShapeFunction::min_radius() const {
  double m = radius(0);
  for (int j = 1; j < size(); ++j) m = std::min(m, radius(j));
  return m;
}

double ShapeFunction::max_radius() const {
  double m = radius(0);
  for (int j = 1; j < size(); ++j) m = std::max(m, radius(j));
  return m;
}

ShapeFunction ShapeFunction::resampled(int m) const {
  return ShapeFunction(r_e_, rho_.resampled(m));
}

PeriodicField derivative(const ShapeFunction& shape) { return shape.rho().derivative(); }

BoundaryFrame boundary_frame(const ShapeFunction& shape, MetricMode mode) {
  const int n = shape.size();
  const PeriodicField d = derivative(shape);
  BoundaryFrame f;
  f.normal.resize(n);
  f.radial.resize(n);
  f.tangent.resize(n);
  f.metric.resize(n);
  for (int j = 0; j < n; ++j) {
    const double t = kTwoPi * j / n;
    const Vec2 ne(std::cos(t), std::sin(t));
    const Vec2 te(-std::sin(t), std::cos(t));
    const double r = shape.radius(j);
    const double norm = std::hypot(r, d[j]);
    f.radial[j] = ne;
    f.tangent[j] = te;
    f.normal[j] = (r * ne - d[j] * te) / norm;
    f.metric[j] = mode == MetricMode::geometric ? norm / r : norm;
  }
  return f;
}

namespace {

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

struct CurvePoint {
  Vec2 y;      // translated point
  Vec2 dy;     // d/dθ of the translated point
};

CurvePoint translated_point(const PeriodicField& rho, double r_e, const Vec2& v, double theta) {
  double value = 0.0, slope = 0.0;
  rho.evaluate(theta, value, slope);
  const Vec2 ne(std::cos(theta), std::sin(theta));
  const Vec2 te(-ne.y(), ne.x());
  const double r = r_e + value;
  return {r * ne - v, slope * ne + r * te};
}

// Angle of y(θ) measured from the ray φ, in (−π, π).
double angle_from(const Vec2& y, const Vec2& ray) { return std::atan2(cross(ray, y), ray.dot(y)); }

double solve_source_angle(const PeriodicField& rho, double r_e, const Vec2& v, double phi) {
  const Vec2 ray(std::cos(phi), std::sin(phi));
  double lo = phi - 0.5 * std::numbers::pi;
  double hi = phi + 0.5 * std::numbers::pi;
  while (hi - lo > 1e-3) {
    const double mid = 0.5 * (lo + hi);
    if (angle_from(translated_point(rho, r_e, v, mid).y, ray) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  double theta = 0.5 * (lo + hi);
  for (int it = 0; it < 30; ++it) {
    const CurvePoint p = translated_point(rho, r_e, v, theta);
    const double f = angle_from(p.y, ray);
    if (f == 0.0) break;
    if (f < 0.0) {
      lo = theta;
    } else {
      hi = theta;
    }
    const double slope = cross(p.y, p.dy) / p.y.squaredNorm();
    double next = theta - f / slope;
    // A Newton step below the spacing of doubles leaves θ where it is.
    if (next == theta) break;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double step = std::abs(next - theta);
    theta = next;
    if (step < 1e-15 || hi - lo < 1e-15) break;
  }
  return theta;
}

void check_translation(const ShapeFunction& shape, const Vec2& v) {
  const double limit = shape.min_radius();
  if (v.norm() >= limit) {
    std::ostringstream msg;
    msg << "translation |v| = " << v.norm()
        << " loses star-shapedness; keep |v| below the minimum radius " << limit;
    throw ValidationError(msg.str());
  }
  // The angle map θ ↦ φ must be strictly increasing along the curve.
  const int m = 4 * shape.size();
  for (int j = 0; j < m; ++j) {
    const CurvePoint p =
        translated_point(shape.rho(), shape.base_radius(), v, kTwoPi * j / m);
    if (!(cross(p.y, p.dy) > 0.0)) {
      std::ostringstream msg;
      msg << "translated curve is not star-shaped about the origin (|v| = " << v.norm()
          << "); reduce |v| well below the minimum radius " << limit;
      throw ValidationError(msg.str());
    }
  }
}

}  // namespace

std::vector<double> recenter_source_angles(const ShapeFunction& shape, const Vec2& v) {
  check_translation(shape, v);
  const int n = shape.size();
  std::vector<double> theta(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    theta[j] = solve_source_angle(shape.rho(), shape.base_radius(), v, kTwoPi * j / n);
  }
  return theta;
}

ShapeFunction recenter(const ShapeFunction& shape, const Vec2& v) {
  if (v.x() == 0.0 && v.y() == 0.0) return shape;
  const std::vector<double> theta = recenter_source_angles(shape, v);
  const double r_e = shape.base_radius();
  std::vector<double> out(theta.size());
  for (std::size_t j = 0; j < theta.size(); ++j) {
    out[j] = translated_point(shape.rho(), r_e, v, theta[j]).y.norm() - r_e;
  }
  return ShapeFunction::from_samples(r_e, std::move(out));
}

double area(const ShapeFunction& shape) {
  const ShapeFunction fine = shape.resampled(2 * shape.size());
  double s = 0.0;
  for (int j = 0; j < fine.size(); ++j) s += fine.radius(j) * fine.radius(j);
  return 0.5 * s * kTwoPi / fine.size();
}

double mean(const ShapeFunction& shape) { return shape.rho().mean(); }

}  // namespace droplet
