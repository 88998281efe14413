#pragma once

#include <Eigen/Core>
#include <vector>

#include "droplet/fourier.hpp"

namespace droplet {

using Vec2 = Eigen::Vector2d;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Equispaced angles θ_j = 2πj/N on [0, 2π). N is even and at least 16.
class AngularGrid {
 public:
  explicit AngularGrid(int n_nodes);

  int size() const { return n_; }
  double node(int j) const { return kTwoPi * j / n_; }
  std::vector<double> nodes() const;

 private:
  int n_;
};

/// Radial offset ρ(θ) of a star-shaped curve r = r_e + ρ(θ) over the circle of
/// radius r_e centred at the origin.
class ShapeFunction {
 public:
  /// Unit circle on the smallest admissible grid.
  ShapeFunction() : ShapeFunction(1.0, PeriodicField::zero(16)) {}
  /// Throws ValidationError unless r_e > 0, N is admissible, and r_e + ρ > 0
  /// at every node.
  ShapeFunction(double base_radius, PeriodicField rho);

  static ShapeFunction from_samples(double base_radius, std::vector<double> samples);
  static ShapeFunction from_coeffs(double base_radius, FourierCoeffs coeffs);
  static ShapeFunction circle(double base_radius, int n_nodes);

  double base_radius() const { return r_e_; }
  int size() const { return rho_.size(); }
  AngularGrid grid() const { return AngularGrid(size()); }
  const PeriodicField& rho() const { return rho_; }
  std::span<const double> samples() const { return rho_.samples(); }
  const FourierCoeffs& coeffs() const { return rho_.coeffs(); }

  double radius(int j) const { return r_e_ + rho_[j]; }
  double radius_at(double theta) const { return r_e_ + rho_(theta); }
  Vec2 point(int j) const;
  double min_radius() const;
  double max_radius() const;

  /// Same curve, band-limited interpolant evaluated on an m-point grid.
  ShapeFunction resampled(int m) const;

 private:
  double r_e_;
  PeriodicField rho_;
};

/// Samples of ρ′(θ) by spectral differentiation.
PeriodicField derivative(const ShapeFunction& shape);

/// How ρ_t relates to the normal front speed V.
///  - geometric: ρ_t = m V with m = sqrt(1 + (ρ′/(r_e+ρ))²), the exact
///    kinematics of a polar graph.
///  - paper: ρ_t = |∇N_ρ| V with |∇N_ρ| = sqrt((r_e+ρ)² + ρ′²) = (r_e+ρ) m.
enum class MetricMode { geometric, paper };

struct BoundaryFrame {
  std::vector<Vec2> normal;   ///< unit outward normal ν_ρ
  std::vector<Vec2> radial;   ///< ν_e = (cos θ, sin θ)
  std::vector<Vec2> tangent;  ///< τ_e = (−sin θ, cos θ)
  std::vector<double> metric; ///< kinematic factor in the requested mode
};

BoundaryFrame boundary_frame(const ShapeFunction& shape, MetricMode mode = MetricMode::geometric);

/// Polar graph of Γ_ρ − v over the same grid. Throws ValidationError when the
/// translated curve is no longer star-shaped about the origin.
ShapeFunction recenter(const ShapeFunction& shape, const Vec2& v);

/// For each target node φ_j of recenter(shape, v), the source angle θ with
/// (r_e+ρ(θ))ν_e(θ) − v on the ray of angle φ_j.
std::vector<double> recenter_source_angles(const ShapeFunction& shape, const Vec2& v);

/// Enclosed area ∫(r_e+ρ)²/2 dθ.
double area(const ShapeFunction& shape);
/// Mean offset ĥ₀ = (1/2π)∫ρ dθ.
double mean(const ShapeFunction& shape);

}  // namespace droplet
