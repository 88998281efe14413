#pragma once

#include <optional>
#include <string>
#include <vector>

#include "droplet/shape.hpp"
#include "droplet/solver.hpp"

namespace droplet {

/// Contact-angle law F with F(1) = 0 and F' > 0. Either a power law
/// F(s) = s^p − 1 or a monotone cubic (PCHIP) interpolant of tabulated data.
class ContactLaw {
 public:
  static constexpr double kRangeLow = 0.2;
  static constexpr double kRangeHigh = 5.0;

  static ContactLaw power(double p);
  /// Knots must be strictly increasing, bracket [0.2, 5], include s = 1 with
  /// F = 0, and be strictly increasing in F.
  static ContactLaw table(std::vector<double> s, std::vector<double> f);

  double operator()(double s) const;
  double derivative(double s) const;

  bool is_power() const { return knots_.empty(); }
  double exponent() const { return p_; }
  const std::vector<double>& knots() const { return knots_; }
  const std::vector<double>& values() const { return values_; }

 private:
  ContactLaw() = default;
  void validate() const;
  std::size_t interval(double s) const;

  double p_ = 0.0;
  std::vector<double> knots_;
  std::vector<double> values_;
  std::vector<double> slopes_;
};

struct DynamicsConfig {
  double V0 = 0.7853981633974483;  // π/4, so that r_e = 1
  ContactLaw law = ContactLaw::power(3.0);
  MetricMode metric = MetricMode::geometric;
  int n_nodes = 256;
  /// Fixed step; when unset, dt = cfl_c · r_e / (F'(1) K) with K = N/2
  /// (further divided by r_e in paper mode).
  std::optional<double> dt;
  double cfl_c = 1.0;
  double final_time = 1.0;
  int snapshot_stride = 1;
  bool dealias = true;
  SolverOptions solver;

  /// r_e = (4 V0 / π)^{1/3}.
  double base_radius() const;
  /// Step actually used before adjusting to land on final_time.
  double time_step() const;
  /// Throws ValidationError on inconsistent settings.
  void validate() const;
};

/// Velocity G(ρ) = m(ρ) F(−λ(ρ) ∂_ν ū_ρ) with its solver diagnostics.
struct Velocity {
  PeriodicField g;
  double lambda = 0.0;
  double I = 0.0;
  double cond = 1.0;
  double residual = 0.0;
};

Velocity velocity(const ShapeFunction& shape, const DynamicsConfig& config);

/// dr/dt for a circle of radius r centred at the origin: F(4V₀/(π r³)),
/// times r in paper mode.
double radial_rhs(double r, const DynamicsConfig& config);

enum class HaltReason { none, star_shape_loss, solver_ill_conditioned, contact_law_range, non_finite };

std::string to_string(HaltReason reason);

struct Snapshot {
  double t = 0.0;
  ShapeFunction shape;
  double lambda = 0.0;
  double I = 0.0;
  double g_max = 0.0;
  double cond = 1.0;
};

struct TrajectoryRecord {
  std::vector<Snapshot> snapshots;
  HaltReason halt = HaltReason::none;
  std::string halt_message;
  int steps = 0;
  double dt = 0.0;

  bool completed() const { return halt == HaltReason::none; }
};

/// Classical RK4 integration of ρ_t = G(ρ) up to config.final_time.
/// Snapshots are taken at t = 0, every snapshot_stride steps, and at the
/// final time. Failures halt the run and return the partial trajectory.
TrajectoryRecord evolve(const ShapeFunction& shape0, const DynamicsConfig& config);

struct EquilibriumOptions {
  int max_iterations = 50;
  double tolerance = 1e-10;
  /// Forward-difference step for the Jacobian columns, relative to r_e.
  double fd_step = 1e-7;
  /// Solver residual tolerance for the Jacobian columns only.
  double jacobian_residual_tol = 1e-6;
  Exec exec = default_exec();
};

struct EquilibriumReport {
  ShapeFunction rho_bar;
  Vec2 center = Vec2::Zero();
  int iterations = 0;
  double residual = 0.0;  ///< ‖G(ρ̄)‖∞ at the returned shape
  bool converged = false;
  std::string message;
};

/// Damped Newton search for a zero of G near shape0, carried out on the
/// recentred shape with the translational modes removed.
EquilibriumReport find_equilibrium(const ShapeFunction& shape0, const DynamicsConfig& config,
                                   const EquilibriumOptions& options = {});

}  // namespace droplet
