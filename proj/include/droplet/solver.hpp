#pragma once

#include <complex>
#include <span>
#include <vector>

#include "droplet/fourier.hpp"
#include "droplet/kernels.hpp"
#include "droplet/shape.hpp"

namespace droplet {

struct SolverOptions {
  enum class Method {
    /// Double-layer Nyström solve on the boundary; the default.
    boundary_integral,
    /// Least-squares collocation in the scaled harmonic polynomial basis.
    /// Only reliable for small grids or near-circular domains.
    collocation,
  };

  Method method = Method::boundary_integral;
  /// r_* = scale_factor · max boundary radius.
  double scale_factor = 1.05;
  /// Allowed misfit (collocation) or unresolved density tail (Nyström),
  /// relative to ‖g‖∞.
  double residual_tol = 1e-9;
  Exec exec = default_exec();
};

/// Scaled harmonic polynomial basis 1, (r/r_*)^k cos kθ, (r/r_*)^k sin kθ.
struct HarmonicBasis {
  int max_mode = 0;
  double r_star = 1.0;
};

/// A harmonic function on a star-shaped domain, evaluable at interior points.
///
/// Either a polynomial in the scaled basis (collocation) or the boundary
/// values of an analytic function f with w = Re f, evaluated through the
/// barycentric Cauchy integral formula (boundary integral route).
class HarmonicField {
 public:
  HarmonicField() = default;
  static HarmonicField polynomial(HarmonicBasis basis, std::vector<double> coeffs);
  static HarmonicField cauchy(std::vector<std::complex<double>> nodes,
                              std::vector<std::complex<double>> weights,
                              std::vector<std::complex<double>> boundary_values);

  double value(const Vec2& x) const;
  Vec2 gradient(const Vec2& x) const;

  std::vector<double> values(std::span<const Vec2> x, Exec exec = default_exec()) const;
  std::vector<Vec2> gradients(std::span<const Vec2> x, Exec exec = default_exec()) const;

 private:
  bool is_polynomial_ = true;
  HarmonicBasis basis_;
  std::vector<double> coeffs_;
  std::vector<std::complex<double>> nodes_;
  std::vector<std::complex<double>> weights_;
  std::vector<std::complex<double>> boundary_;
};

struct HarmonicExtension {
  HarmonicField field;
  /// ∂_n w at the boundary nodes, as a function of the polar angle.
  PeriodicField normal_derivative;
  /// Coefficients [c0, c1, s1, ..., cK, sK] of w in the scaled basis, K = N/2 − 1.
  HarmonicBasis basis;
  std::vector<double> harmonic_coeffs;
  double residual = 0.0;
  double cond_estimate = 1.0;
};

/// Harmonic function on Ω_ρ with boundary values g at the N nodes. Throws
/// SolverError when the domain cannot be resolved to residual_tol · ‖g‖∞.
HarmonicExtension harmonic_extend(const ShapeFunction& shape, std::span<const double> g,
                                  const SolverOptions& options = {});

/// Solution of −Δū = 1 in Ω_ρ, ū = 0 on Γ_ρ, written as ū = w + (r_e² − |x|²)/4
/// with w harmonic, together with I = ∫ū and λ = V₀ / I.
struct SolveResult {
  double base_radius = 1.0;
  /// ∂_ν ū at the grid nodes (negative on the supported regime).
  std::vector<double> flux;
  /// The same flux as a trigonometric interpolant in the polar angle.
  PeriodicField flux_field;
  double I = 0.0;
  double lambda = 0.0;
  HarmonicField w;
  PeriodicField dn_w;
  HarmonicBasis basis;
  std::vector<double> harmonic_coeffs;
  double residual = 0.0;
  double cond_estimate = 1.0;

  double u_bar(const Vec2& x) const;
  Vec2 grad_u_bar(const Vec2& x) const;
};

SolveResult solve_base(const ShapeFunction& shape, double V0, const SolverOptions& options = {});

/// ∂_ν ū at the nodes of `on`, which must describe the same curve the solve
/// was performed on (typically a finer resampling of it).
std::vector<double> boundary_flux(const SolveResult& result, const ShapeFunction& on);

/// Dirichlet-to-Neumann map of the disk of radius r_e: multiplier k/r_e.
FourierCoeffs dtn_disk(const FourierCoeffs& h, double r_e);

}  // namespace droplet
