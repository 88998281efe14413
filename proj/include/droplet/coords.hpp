#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

#include "droplet/dynamics.hpp"
#include "droplet/shape.hpp"

namespace droplet {

/// ρ ↔ (v, ρ̄): Γ_ρ = v + Γ_ρ̄ with ⟨ρ̄, cos⟩ = ⟨ρ̄, sin⟩ = 0, where
/// ⟨f, g⟩ = (1/2π)∫ f g dθ.
struct CoordDecomposition {
  Vec2 v = Vec2::Zero();
  ShapeFunction rho_bar;
  int newton_iters = 0;
  double residual = 0.0;  ///< ‖Φ(v)‖ at the returned v
};

/// Orthogonality conditions Φ(v) = (⟨ρ̄_v, cos⟩, ⟨ρ̄_v, sin⟩), ρ̄_v = recenter(ρ, v).
Vec2 phi(const ShapeFunction& shape, const Vec2& v);
/// Central-difference Jacobian of Φ. Equals −Id/2 + O(‖ρ‖) at v = 0.
Eigen::Matrix2d phi_jacobian(const ShapeFunction& shape, const Vec2& v, double step);

/// Newton solve of Φ(v) = 0. Throws ValidationError when ‖ρ‖∞ > 0.3 r_e and
/// DecompositionError when Newton fails within 25 iterations.
CoordDecomposition decompose(const ShapeFunction& shape);

/// Inverse of decompose: the polar graph of v + Γ_ρ̄.
ShapeFunction recompose(const Vec2& v, const ShapeFunction& rho_bar);

/// M(ρ̄) = Id + 2 [[⟨q sc⟩, −⟨q c²⟩], [⟨q s²⟩, −⟨q sc⟩]], q = ρ̄′/(r_e + ρ̄).
/// Throws ValidationError if det M < 0.1.
Eigen::Matrix2d matrix_M(const ShapeFunction& rho_bar);

struct ReducedState {
  Vec2 v_dot = Vec2::Zero();
  PeriodicField rho_bar_dot;
  Eigen::Matrix2d M = Eigen::Matrix2d::Identity();
  Velocity g;
};

/// Right-hand side of the (v, ρ̄) system:
///   v̇ = M(ρ̄)⁻¹ (π₁ᶜ G, π₁ˢ G),   ρ̄̇ = π₁^⊥ [G + q τ_e·v̇],
/// with G = G(ρ̄). Geometric metric mode only.
ReducedState reduced_rhs(const ShapeFunction& rho_bar, const DynamicsConfig& config);

/// Sup over the nodes of ρ of |∂_ν ū_ρ − ∂_ν ū_{ρ̄}| at matching boundary
/// points, where ρ̄ = recenter(ρ, v).
double invariance_check(const ShapeFunction& shape, const Vec2& v, double V0,
                        const SolverOptions& options = {});

struct TrackPoint {
  double t = 0.0;
  bool ok = false;
  std::string error;
  Vec2 v = Vec2::Zero();
  double rho_bar_l2 = 0.0;
  double rho_bar_max = 0.0;
  /// √(a_k² + b_k²) of ρ̄ for k = 0..4 (mode 0 is a_0 itself).
  std::vector<double> modes;
  double orthogonality = 0.0;
};

struct TrackReport {
  std::vector<TrackPoint> points;
  std::optional<double> decay_rate;
  bool rate_reliable = false;
  std::string rate_note;
  std::optional<double> center_rate;
  Vec2 v_final = Vec2::Zero();
  Vec2 v_inf = Vec2::Zero();
};

/// Decomposes every snapshot, fits the decay rate of ‖ρ̄‖ over the final third
/// of the trajectory, and extrapolates the limiting center.
TrackReport track(const TrajectoryRecord& trajectory, Exec exec = default_exec());

}  // namespace droplet
